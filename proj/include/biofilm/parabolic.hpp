#pragma once

// Theta-scheme step for the substrate equations
//   dC/dt - z v1(t) dC/dz - D d2C/dz2 = H
// with dC/dz = 0 at z = 0 (ghost node C_{-1} = C_1) and C = psi at z = 1.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "biofilm/error.hpp"
#include "biofilm/grid.hpp"

namespace biofilm {

/// Row k reads sub[k] x[k-1] + diag[k] x[k] + super[k] x[k+1] = rhs[k].
/// sub[0] and super[N] are unused and kept at zero.
struct TridiagonalSystem {
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> super;
  std::vector<double> rhs;

  std::size_t size() const noexcept { return diag.size(); }
};

struct SubstrateStepParams {
  double v1_old = 0.0;
  double v1_new = 0.0;
  double diffusivity = 1.0;
  double psi_end = 0.0;
  double dt = 0.0;
  double theta_scheme = 0.5;
};

/// `source` is the R^2-scaled reaction already blended between the step ends
/// with the theta weights.
inline TridiagonalSystem assemble_step(const Profile& C, const Profile& source, const SubstrateStepParams& p) {
  if (!(p.dt > 0.0) || !std::isfinite(p.dt)) throw Error(ErrorCode::nonpositive_param, "dt must be > 0");
  if (!(p.theta_scheme >= 0.5 && p.theta_scheme <= 1.0)) {
    throw Error(ErrorCode::schema_violation, "theta_scheme must lie in [0.5, 1]");
  }
  if (!(p.diffusivity > 0.0)) throw Error(ErrorCode::nonpositive_param, "diffusivity must be > 0");
  if (!std::isfinite(p.v1_old) || !std::isfinite(p.v1_new) || !std::isfinite(p.psi_end)) {
    throw Error(ErrorCode::nonfinite, "substrate step parameters are not finite");
  }
  if (!(source.grid() == C.grid())) throw Error(ErrorCode::dimension_mismatch, "source on a different grid");

  const Grid& grid = C.grid();
  const std::size_t N = grid.cells();
  const double dz = grid.dz();
  const double diff = p.diffusivity / (dz * dz);
  const double implicit = p.theta_scheme * p.dt;
  const double explicit_weight = (1.0 - p.theta_scheme) * p.dt;

  TridiagonalSystem sys;
  sys.sub.assign(N + 1, 0.0);
  sys.diag.assign(N + 1, 0.0);
  sys.super.assign(N + 1, 0.0);
  sys.rhs.assign(N + 1, 0.0);

  // Neumann row: the ghost node folds the advection term away (z = 0) and doubles the coupling.
  sys.diag[0] = 1.0 + 2.0 * implicit * diff;
  sys.super[0] = -2.0 * implicit * diff;
  sys.rhs[0] = C[0] + explicit_weight * 2.0 * diff * (C[1] - C[0]) + p.dt * source[0];

  for (std::size_t k = 1; k < N; ++k) {
    const double z = grid.node(k);
    const double adv_new = z * p.v1_new / (2.0 * dz);
    const double adv_old = z * p.v1_old / (2.0 * dz);
    sys.sub[k] = -implicit * (diff - adv_new);
    sys.diag[k] = 1.0 + 2.0 * implicit * diff;
    sys.super[k] = -implicit * (diff + adv_new);
    const double old_operator =
        diff * (C[k + 1] - 2.0 * C[k] + C[k - 1]) + adv_old * (C[k + 1] - C[k - 1]);
    sys.rhs[k] = C[k] + explicit_weight * old_operator + p.dt * source[k];
  }

  sys.diag[N] = 1.0;
  sys.rhs[N] = p.psi_end;

  for (std::size_t k = 0; k < N; ++k) {
    if (!(std::abs(sys.diag[k]) > std::abs(sys.sub[k]) + std::abs(sys.super[k]))) {
      throw Error(ErrorCode::unstable_assembly,
                  "row " + std::to_string(k) +
                      " is not diagonally dominant; advection is too strong for centred differences, "
                      "use a finer grid or a smaller time step");
    }
  }
  return sys;
}

/// Thomas algorithm.
inline std::vector<double> solve_tridiagonal(const TridiagonalSystem& sys) {
  const std::size_t n = sys.size();
  if (sys.sub.size() != n || sys.super.size() != n || sys.rhs.size() != n || n == 0) {
    throw Error(ErrorCode::dimension_mismatch, "tridiagonal arrays have inconsistent lengths");
  }
  std::vector<double> c(n, 0.0);
  std::vector<double> d(n, 0.0);
  double pivot = sys.diag[0];
  if (pivot == 0.0 || !std::isfinite(pivot)) throw Error(ErrorCode::zero_pivot, "zero pivot in row 0");
  c[0] = sys.super[0] / pivot;
  d[0] = sys.rhs[0] / pivot;
  for (std::size_t k = 1; k < n; ++k) {
    pivot = sys.diag[k] - sys.sub[k] * c[k - 1];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw Error(ErrorCode::zero_pivot, "zero pivot in row " + std::to_string(k));
    }
    c[k] = k + 1 < n ? sys.super[k] / pivot : 0.0;
    d[k] = (sys.rhs[k] - sys.sub[k] * d[k - 1]) / pivot;
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) x[k] = d[k] - c[k] * x[k + 1];
  return x;
}

/// Sup-norm of A x - rhs.
inline double tridiagonal_residual(const TridiagonalSystem& sys, const std::vector<double>& x) {
  double r = 0.0;
  const std::size_t n = sys.size();
  for (std::size_t k = 0; k < n; ++k) {
    double ax = sys.diag[k] * x[k];
    if (k > 0) ax += sys.sub[k] * x[k - 1];
    if (k + 1 < n) ax += sys.super[k] * x[k + 1];
    r = std::max(r, std::abs(ax - sys.rhs[k]));
  }
  return r;
}

/// Advances every substrate independently. `H_start` and `H_end` are the R^2-scaled
/// reactions at the two ends of the step; `psi_end` holds the Dirichlet values at t_new.
inline std::vector<Profile> parabolic_step(const std::vector<Profile>& C, const std::vector<Profile>& H_start,
                                           const std::vector<Profile>& H_end, double v1_old, double v1_new,
                                           const std::vector<double>& D, const std::vector<double>& psi_end,
                                           double dt, double theta_scheme) {
  const std::size_t m = C.size();
  if (H_start.size() != m || H_end.size() != m || D.size() != m || psi_end.size() != m) {
    throw Error(ErrorCode::dimension_mismatch, "parabolic step inputs disagree on the substrate count");
  }
  std::vector<Profile> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    Profile blended(C[j].grid());
    for (std::size_t k = 0; k < blended.size(); ++k) {
      blended[k] = theta_scheme * H_end[j][k] + (1.0 - theta_scheme) * H_start[j][k];
    }
    const auto sys = assemble_step(C[j], blended,
                                   {v1_old, v1_new, D[j], psi_end[j], dt, theta_scheme});
    auto x = solve_tridiagonal(sys);
    x.back() = psi_end[j];
    out.emplace_back(C[j].grid(), std::move(x));
  }
  return out;
}

}  // namespace biofilm
