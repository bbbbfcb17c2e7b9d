#pragma once

// One step of the biomass transport subsystem
//   dY/dt - a(z) v1(t) dY/dz = F,   a(z) = z (scaled) or 1 (unscaled),
// solved by tracing characteristics backward from every node and integrating
// the source along them with the trapezoid rule.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "biofilm/error.hpp"
#include "biofilm/grid.hpp"

namespace biofilm {

enum class TransportCoefficient { scaled, unscaled };

/// Velocity trace v(1, t) at both ends of a step; linear in between.
struct V1Segment {
  double v1_old = 0.0;
  double v1_new = 0.0;
  double dt = 0.0;

  void check() const {
    if (!std::isfinite(v1_old) || !std::isfinite(v1_new) || !std::isfinite(dt)) {
      throw Error(ErrorCode::nonfinite, "velocity segment has non-finite entries");
    }
    if (!(dt > 0.0)) throw Error(ErrorCode::nonpositive_param, "time step must be > 0");
  }

  /// Integral of v1 over the step.
  double integral() const { return 0.5 * dt * (v1_old + v1_new); }
};

struct CharacteristicFoot {
  double z = 0.0;
  bool clamped = false;
};

/// Position at the start of the step of the characteristic that reaches `z` at its end.
/// Feet leaving [0, 1] are clamped to the nearest boundary.
inline CharacteristicFoot characteristic_foot(double z, const V1Segment& seg,
                                              TransportCoefficient coefficient = TransportCoefficient::scaled) {
  seg.check();
  if (!std::isfinite(z)) throw Error(ErrorCode::nonfinite, "characteristic start is not finite");
  const double foot = coefficient == TransportCoefficient::scaled ? z * std::exp(seg.integral())
                                                                  : z + seg.integral();
  if (!std::isfinite(foot)) throw Error(ErrorCode::nonfinite, "characteristic foot is not finite");
  if (foot > 1.0) return {1.0, true};
  if (foot < 0.0) return {0.0, true};
  return {foot, false};
}

enum class SourceStage { start, end };

/// Fills `out` (n entries) with the already R^2-scaled biomass source at `z`.
/// `start` is queried at characteristic feet, `end` at grid nodes.
using TransportSource = std::function<void(double z, SourceStage stage, std::span<double> out)>;

struct TransportDiagnostics {
  std::size_t clamped_feet = 0;
};

struct TransportResult {
  std::vector<Profile> Y;
  TransportDiagnostics diagnostics;
};

inline TransportResult transport_step(const std::vector<Profile>& Y, const TransportSource& sources,
                                      const V1Segment& seg,
                                      TransportCoefficient coefficient = TransportCoefficient::scaled) {
  seg.check();
  if (Y.empty()) throw Error(ErrorCode::dimension_mismatch, "transport step needs at least one species");
  const Grid grid = Y.front().grid();
  const std::size_t n = Y.size();
  for (const auto& p : Y) {
    if (!(p.grid() == grid)) throw Error(ErrorCode::dimension_mismatch, "species live on different grids");
  }

  TransportResult result;
  result.Y.assign(n, Profile(grid));
  std::vector<double> start(n);
  std::vector<double> end(n);
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    const double z = grid.node(k);
    const auto foot = characteristic_foot(z, seg, coefficient);
    if (foot.clamped) ++result.diagnostics.clamped_feet;
    sources(foot.z, SourceStage::start, start);
    sources(z, SourceStage::end, end);
    for (std::size_t i = 0; i < n; ++i) {
      const double value = interp_linear(Y[i], foot.z) + 0.5 * seg.dt * (start[i] + end[i]);
      if (!std::isfinite(value)) throw Error(ErrorCode::nonfinite, "transport produced a non-finite value");
      result.Y[i][k] = value;
    }
  }
  return result;
}

}  // namespace biofilm
