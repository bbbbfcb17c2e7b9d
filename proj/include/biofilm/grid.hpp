#pragma once

// Uniform node-centred grid on the rescaled domain [0, 1] together with the
// quadrature and interpolation primitives shared by the solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "biofilm/error.hpp"

namespace biofilm {

class Grid {
 public:
  /// Nodes are z_k = k / cells for k = 0..cells.
  explicit Grid(std::size_t cells) : cells_(cells) {
    if (cells < 4) {
      throw Error(ErrorCode::too_coarse,
                  "grid needs at least 4 cells, got " + std::to_string(cells));
    }
  }

  std::size_t cells() const noexcept { return cells_; }
  std::size_t nodes() const noexcept { return cells_ + 1; }
  double dz() const noexcept { return 1.0 / static_cast<double>(cells_); }

  double node(std::size_t k) const noexcept {
    if (k == cells_) return 1.0;
    return static_cast<double>(k) / static_cast<double>(cells_);
  }

  std::vector<double> coordinates() const {
    std::vector<double> z(nodes());
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = node(k);
    return z;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t cells_;
};

inline Grid build_grid(std::size_t cells) { return Grid(cells); }

/// Nodal values of one field on a grid.
class Profile {
 public:
  explicit Profile(Grid grid, double fill = 0.0) : grid_(grid), values_(grid.nodes(), fill) {}

  Profile(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.nodes()) {
      throw Error(ErrorCode::dimension_mismatch,
                  "profile has " + std::to_string(values_.size()) + " values for " +
                      std::to_string(grid_.nodes()) + " nodes");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::nonfinite, "profile value is not finite");
    }
  }

  /// Samples `fn` at every node.
  static Profile sample(Grid grid, const std::function<double(double)>& fn) {
    Profile p(grid);
    for (std::size_t k = 0; k < p.size(); ++k) p.values_[k] = fn(grid.node(k));
    return p;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

  bool all_finite() const {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  friend bool operator==(const Profile&, const Profile&) = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

inline double sup_norm(const Profile& p) {
  double m = 0.0;
  for (double v : p.values()) m = std::max(m, std::abs(v));
  return m;
}

inline double sup_distance(const Profile& a, const Profile& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

inline double min_value(const Profile& p) {
  double m = p[0];
  for (double v : p.values()) m = std::min(m, v);
  return m;
}

inline double max_value(const Profile& p) {
  double m = p[0];
  for (double v : p.values()) m = std::max(m, v);
  return m;
}

/// Composite-trapezoid cumulative integral from z = 0; result[0] is 0.
inline Profile cumtrapz(const Profile& p) {
  Profile out(p.grid());
  const double half_dz = 0.5 * p.grid().dz();
  double acc = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    acc += half_dz * (p[k - 1] + p[k]);
    out[k] = acc;
  }
  return out;
}

/// Composite-trapezoid integral over [0, 1].
inline double trapz(const Profile& p) {
  double acc = 0.5 * (p.front() + p.back());
  for (std::size_t k = 1; k + 1 < p.size(); ++k) acc += p[k];
  return acc * p.grid().dz();
}

/// Piecewise-linear interpolation. Exact at nodes; queries further than
/// 1e-12 outside [0, 1] are rejected.
inline double interp_linear(const Profile& p, double z) {
  constexpr double slack = 1e-12;
  if (!std::isfinite(z) || z < -slack || z > 1.0 + slack) {
    throw Error(ErrorCode::out_of_domain, "interpolation point " + std::to_string(z) +
                                              " lies outside [0, 1]");
  }
  const std::size_t cells = p.grid().cells();
  const double s = std::clamp(z, 0.0, 1.0) * static_cast<double>(cells);
  const auto k = static_cast<std::size_t>(std::floor(s));
  if (k >= cells) return p[cells];
  const double w = s - static_cast<double>(k);
  if (w == 0.0) return p[k];
  return (1.0 - w) * p[k] + w * p[k + 1];
}

}  // namespace biofilm
