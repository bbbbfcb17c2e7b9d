#pragma once

// Manufactured-solution convergence study for the three solver components.
// Exact fields (derivation in docs/mms.md):
//   C*(z, t) = e^{-t} cos(pi z / 2) + psi*(t),   psi*(t) = 1 + sin(2t) / 2
//   Y*(z, t) = e^{-t} (1 + z^2)
//   R*(t)    = 1 + e^{-t} / 2
// Each component is driven by the matching forcing term and a prescribed v(1, t).

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "biofilm/boundary.hpp"
#include "biofilm/error.hpp"
#include "biofilm/grid.hpp"
#include "biofilm/parabolic.hpp"
#include "biofilm/transport.hpp"

namespace biofilm {

struct ConvergenceCase {
  std::string name;
  std::vector<std::size_t> cells;
  std::vector<double> errors;
  double order = 0.0;
  double floor = 0.0;
  bool passed = false;
};

struct ConvergenceReport {
  std::vector<ConvergenceCase> cases;

  bool ok() const {
    for (const auto& c : cases) {
      if (!c.passed) return false;
    }
    return !cases.empty();
  }
  const ConvergenceCase& at(const std::string& name) const {
    for (const auto& c : cases) {
      if (c.name == name) return c;
    }
    throw Error(ErrorCode::schema_violation, "no convergence case " + name);
  }
};

struct MmsConfig {
  std::vector<std::size_t> cells{25, 50, 100, 200};
  double substrate_floor = 1.8;
  double biomass_floor = 0.9;
  double thickness_floor = 3.5;
};

/// Least-squares slope of log(error) against log(h).
inline double observed_order(const std::vector<double>& h, const std::vector<double>& errors) {
  const std::size_t n = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

namespace mms {

inline constexpr double half_pi = 0.5 * std::numbers::pi;

inline double psi(double t) { return 1.0 + 0.5 * std::sin(2.0 * t); }
inline double dpsi(double t) { return std::cos(2.0 * t); }
inline double substrate_exact(double z, double t) { return std::exp(-t) * std::cos(half_pi * z) + psi(t); }
inline double substrate_v1(double t) { return 0.3 + 0.2 * t; }
inline constexpr double substrate_D = 1.0;

/// dC*/dt - z v1 dC*/dz - D d2C*/dz2.
inline double substrate_forcing(double z, double t) {
  const double decay = std::exp(-t);
  return decay * std::cos(half_pi * z) * (substrate_D * half_pi * half_pi - 1.0) + dpsi(t) +
         z * substrate_v1(t) * decay * half_pi * std::sin(half_pi * z);
}

inline double biomass_exact(double z, double t) { return std::exp(-t) * (1.0 + z * z); }
inline double biomass_v1(double t) { return -0.25 * (1.0 + t); }

/// dY*/dt - z v1 dY*/dz.
inline double biomass_forcing(double z, double t) {
  return -std::exp(-t) * (1.0 + z * z + 2.0 * biomass_v1(t) * z * z);
}

inline double thickness_exact(double t) { return 1.0 + 0.5 * std::exp(-t); }
inline double thickness_v1(double t) { return 0.5 + 0.25 * t; }
inline constexpr double thickness_lambda = 0.5;

/// dR*/dt - (R*^2 v1 - lambda R*^4).
inline double thickness_forcing(double t) {
  const double R = thickness_exact(t);
  return -0.5 * std::exp(-t) - detachment_rhs(R, thickness_v1(t), thickness_lambda);
}

/// Sup-norm error at t = 1 of the Crank-Nicolson substrate solver with dt = dz.
inline double substrate_error(std::size_t cells) {
  const Grid grid(cells);
  const double T = 1.0;
  const double dt = T / static_cast<double>(cells);
  std::vector<Profile> C{Profile::sample(grid, [](double z) { return substrate_exact(z, 0.0); })};
  for (std::size_t k = 0; k < cells; ++k) {
    const double t0 = static_cast<double>(k) * dt;
    const double t1 = static_cast<double>(k + 1) * dt;
    std::vector<Profile> H0{Profile::sample(grid, [t0](double z) { return substrate_forcing(z, t0); })};
    std::vector<Profile> H1{Profile::sample(grid, [t1](double z) { return substrate_forcing(z, t1); })};
    C = parabolic_step(C, H0, H1, substrate_v1(t0), substrate_v1(t1), {substrate_D}, {psi(t1)}, dt, 0.5);
  }
  double err = 0.0;
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    err = std::max(err, std::abs(C[0][k] - substrate_exact(grid.node(k), T)));
  }
  return err;
}

/// Sup-norm error at t = 1 of the characteristic transport solver with dt = dz.
inline double biomass_error(std::size_t cells) {
  const Grid grid(cells);
  const double T = 1.0;
  const double dt = T / static_cast<double>(cells);
  std::vector<Profile> Y{Profile::sample(grid, [](double z) { return biomass_exact(z, 0.0); })};
  for (std::size_t k = 0; k < cells; ++k) {
    const double t0 = static_cast<double>(k) * dt;
    const double t1 = static_cast<double>(k + 1) * dt;
    TransportSource src = [t0, t1](double z, SourceStage stage, std::span<double> out) {
      out[0] = biomass_forcing(z, stage == SourceStage::start ? t0 : t1);
    };
    Y = transport_step(Y, src, {biomass_v1(t0), biomass_v1(t1), dt}).Y;
  }
  double err = 0.0;
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    err = std::max(err, std::abs(Y[0][k] - biomass_exact(grid.node(k), T)));
  }
  return err;
}

/// Error at t = 2 of the RK4 thickness integrator with dt = 2 / cells.
inline double thickness_error(std::size_t cells) {
  const double T = 2.0;
  const double dt = T / static_cast<double>(cells);
  double R = thickness_exact(0.0);
  for (std::size_t k = 0; k < cells; ++k) {
    const double t0 = static_cast<double>(k) * dt;
    R = rk4_step(R, dt, [t0](double s, double r) {
      const double t = t0 + s;
      return detachment_rhs(r, thickness_v1(t), thickness_lambda) + thickness_forcing(t);
    });
  }
  return std::abs(R - thickness_exact(T));
}

}  // namespace mms

inline ConvergenceReport mms_study(const MmsConfig& cfg = {}) {
  if (cfg.cells.size() < 2) throw Error(ErrorCode::schema_violation, "convergence study needs two or more grids");
  ConvergenceReport report;
  auto run = [&](std::string name, double floor, double (*error)(std::size_t)) {
    ConvergenceCase c;
    c.name = std::move(name);
    c.floor = floor;
    c.cells = cfg.cells;
    std::vector<double> h;
    for (std::size_t n : cfg.cells) {
      h.push_back(1.0 / static_cast<double>(n));
      c.errors.push_back(error(n));
    }
    c.order = observed_order(h, c.errors);
    c.passed = std::isfinite(c.order) && c.order >= floor;
    report.cases.push_back(std::move(c));
  };
  run("substrate", cfg.substrate_floor, mms::substrate_error);
  run("biomass", cfg.biomass_floor, mms::biomass_error);
  run("thickness", cfg.thickness_floor, mms::thickness_error);
  return report;
}

/// Throws ORDER_REGRESSION naming every case below its floor.
inline void require_orders(const ConvergenceReport& report) {
  std::string failed;
  for (const auto& c : report.cases) {
    if (!c.passed) failed += " " + c.name + " (order " + std::to_string(c.order) + " < " + std::to_string(c.floor) + ")";
  }
  if (!failed.empty()) throw Error(ErrorCode::order_regression, "observed order below floor:" + failed);
}

}  // namespace biofilm
