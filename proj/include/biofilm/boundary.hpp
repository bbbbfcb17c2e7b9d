#pragma once

// Velocity reconstruction v(z) = R^2 int_0^z g dz' and the thickness ODE
//   dR/dt = R^2 v(1, t) - lambda R^4.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "biofilm/error.hpp"
#include "biofilm/grid.hpp"
#include "biofilm/model.hpp"

namespace biofilm {

inline constexpr double default_r_floor = 1e-10;

struct BoundaryState {
  double R = 1.0;
  double v1 = 0.0;
};

inline Profile velocity_profile(const std::vector<Profile>& Y, const std::vector<Profile>& C, double R,
                                const KineticsModel& kin) {
  if (Y.size() != kin.species() || C.size() != kin.substrates() || Y.empty()) {
    throw Error(ErrorCode::dimension_mismatch, "velocity profile inputs disagree with the kinetics");
  }
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorCode::nonpositive_thickness, "R must be > 0");
  const Grid grid = Y.front().grid();
  std::vector<double> y(Y.size());
  std::vector<double> c(C.size());
  Profile g(grid);
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = Y[i][k];
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = C[j][k];
    g[k] = kin.velocity_source(y, c);
  }
  Profile v = cumtrapz(g);
  const double scale = R * R;
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] *= scale;
    if (!std::isfinite(v[k])) throw Error(ErrorCode::nonfinite, "velocity is not finite");
  }
  return v;
}

inline double detachment_rhs(double R, double v1, double lambda) {
  const double R2 = R * R;
  return R2 * v1 - lambda * R2 * R2;
}

/// Classical RK4 step of dR/ds = rhs(s, R) for s in [0, dt].
template <class Rhs>
double rk4_step(double R, double dt, Rhs&& rhs) {
  const double k1 = rhs(0.0, R);
  const double k2 = rhs(0.5 * dt, R + 0.5 * dt * k1);
  const double k3 = rhs(0.5 * dt, R + 0.5 * dt * k2);
  const double k4 = rhs(dt, R + dt * k3);
  return R + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// One RK4 step with v1 linear in time between `state.v1` and `v1_new`.
/// Throws THICKNESS_COLLAPSE when the result falls to `r_floor` or below.
/// Raw RK4 update with no floor check. The exact flow never crosses zero, so a
/// non-positive result here means dt is too large for the current v1.
inline double boundary_update(const BoundaryState& state, double v1_new, double lambda, double dt) {
  if (!(state.R > 0.0) || !std::isfinite(state.R)) {
    throw Error(ErrorCode::nonpositive_thickness, "thickness must be positive");
  }
  if (dt == 0.0) return state.R;
  if (!(dt > 0.0)) throw Error(ErrorCode::nonpositive_param, "dt must be >= 0");
  const double v1_old = state.v1;
  const double slope = (v1_new - v1_old) / dt;
  return rk4_step(state.R, dt, [&](double s, double R) {
    return detachment_rhs(R, v1_old + slope * s, lambda);
  });
}

inline double boundary_step(const BoundaryState& state, double v1_new, double lambda, double dt,
                            double r_floor = default_r_floor) {
  if (!(state.R > 0.0) || !std::isfinite(state.R)) {
    throw Error(ErrorCode::nonpositive_thickness, "thickness must be positive");
  }
  const double R_new = boundary_update(state, v1_new, lambda, dt);
  if (!std::isfinite(R_new)) throw Error(ErrorCode::nonfinite, "thickness update is not finite");
  if (R_new <= r_floor) {
    throw Error(ErrorCode::thickness_collapse, "thickness fell to " + std::to_string(R_new));
  }
  return R_new;
}

/// Above sqrt(v1_max / lambda) the thickness cannot grow, so max(R0, that level)
/// bounds every trajectory whose |v1| stays below v1_max.
inline double r_max_bound(double R0, double lambda, double v1_max) {
  return std::max(R0, std::sqrt(std::max(v1_max, 0.0) / lambda));
}

}  // namespace biofilm
