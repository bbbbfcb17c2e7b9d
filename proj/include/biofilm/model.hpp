#pragma once

// Continuous problem definition: reaction kinetics, initial and boundary data,
// and the well-posedness checks run before any numerics.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "biofilm/error.hpp"
#include "biofilm/grid.hpp"

namespace biofilm {

/// Writes one reaction vector for the point (Y, C) into `out`.
using ReactionFn =
    std::function<void(std::span<const double> Y, std::span<const double> C, std::span<double> out)>;
using VelocitySourceFn = std::function<double(std::span<const double> Y, std::span<const double> C)>;

/// Reaction laws f (biomass), h (substrate) and g (velocity source), all unscaled:
/// the R^2 factor of the rescaled equations is applied by the callers.
class KineticsModel {
 public:
  /// `g` may be empty, in which case g = sum_i f_i.
  KineticsModel(std::size_t n, std::size_t m, ReactionFn f, ReactionFn h, VelocitySourceFn g = {},
                bool quasi_positive = false, std::optional<double> lipschitz_hint = std::nullopt,
                std::string name = "custom")
      : n_(n),
        m_(m),
        f_(std::move(f)),
        h_(std::move(h)),
        g_(std::move(g)),
        quasi_positive_(quasi_positive),
        lipschitz_hint_(lipschitz_hint),
        name_(std::move(name)) {
    if (n_ < 1 || m_ < 1) {
      throw Error(ErrorCode::dimension_mismatch, "kinetics needs n >= 1 and m >= 1");
    }
    if (!f_ || !h_) throw Error(ErrorCode::schema_violation, "kinetics needs both f and h");
    if (lipschitz_hint_ && !(*lipschitz_hint_ >= 0.0)) {
      throw Error(ErrorCode::nonpositive_param, "lipschitz hint must be nonnegative");
    }
    if (!g_) {
      auto f_copy = f_;
      const std::size_t species = n_;
      g_ = [f_copy, species](std::span<const double> Y, std::span<const double> C) {
        double buf[16];
        std::vector<double> heap;
        std::span<double> out;
        if (species <= 16) {
          out = std::span<double>(buf, species);
        } else {
          heap.resize(species);
          out = heap;
        }
        f_copy(Y, C, out);
        double sum = 0.0;
        for (double v : out) sum += v;
        return sum;
      };
    }
  }

  std::size_t species() const noexcept { return n_; }
  std::size_t substrates() const noexcept { return m_; }
  bool quasi_positive() const noexcept { return quasi_positive_; }
  std::optional<double> lipschitz_hint() const noexcept { return lipschitz_hint_; }
  const std::string& name() const noexcept { return name_; }

  void biomass_rates(std::span<const double> Y, std::span<const double> C, std::span<double> out) const {
    f_(Y, C, out);
  }
  void substrate_rates(std::span<const double> Y, std::span<const double> C,
                       std::span<double> out) const {
    h_(Y, C, out);
  }
  double velocity_source(std::span<const double> Y, std::span<const double> C) const {
    return g_(Y, C);
  }

 private:
  std::size_t n_;
  std::size_t m_;
  ReactionFn f_;
  ReactionFn h_;
  VelocitySourceFn g_;
  bool quasi_positive_;
  std::optional<double> lipschitz_hint_;
  std::string name_;
};

struct KineticsValues {
  std::vector<double> f;
  std::vector<double> h;
  double g = 0.0;
};

inline KineticsValues eval_kinetics(const KineticsModel& kin, std::span<const double> Y,
                                    std::span<const double> C) {
  if (Y.size() != kin.species() || C.size() != kin.substrates()) {
    throw Error(ErrorCode::dimension_mismatch, "kinetics evaluated with wrong argument sizes");
  }
  for (double v : Y) {
    if (!std::isfinite(v)) throw Error(ErrorCode::nonfinite, "NONFINITE_INPUT: biomass value");
  }
  for (double v : C) {
    if (!std::isfinite(v)) throw Error(ErrorCode::nonfinite, "NONFINITE_INPUT: substrate value");
  }
  KineticsValues out;
  out.f.resize(kin.species());
  out.h.resize(kin.substrates());
  kin.biomass_rates(Y, C, out.f);
  kin.substrate_rates(Y, C, out.h);
  out.g = kin.velocity_source(Y, C);
  return out;
}

inline KineticsModel zero_preset(std::size_t n, std::size_t m) {
  auto zero = [](std::span<const double>, std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  return KineticsModel(n, m, zero, zero, {}, true, 0.0, "zero");
}

struct MonodConsumption {
  std::size_t substrate = 0;
  double yield = 1.0;
};

struct MonodSpecies {
  double mu_max = 1.0;
  double half_saturation = 1.0;
  double decay = 0.0;
  std::size_t limiting_substrate = 0;
  std::vector<MonodConsumption> consumes;
};

struct MonodParams {
  std::size_t substrates = 1;
  std::vector<MonodSpecies> species;
};

/// f_i = (mu_i C_l/(K_i + C_l) - kd_i) Y_i with l the limiting substrate of species i,
/// h_j = -sum_i mu_i C_j/(K_i + C_j) Y_i / yield_ij over consuming species, g = sum_i f_i.
inline KineticsModel monod_preset(const MonodParams& params) {
  const std::size_t n = params.species.size();
  const std::size_t m = params.substrates;
  if (n == 0 || m == 0) {
    throw Error(ErrorCode::dimension_mismatch, "monod preset needs at least one species and substrate");
  }
  bool quasi_positive = true;
  double lipschitz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = params.species[i];
    const std::string tag = "species " + std::to_string(i + 1);
    if (!(s.mu_max > 0.0)) throw Error(ErrorCode::nonpositive_param, tag + ": mu_max must be > 0");
    if (!(s.half_saturation > 0.0)) {
      throw Error(ErrorCode::nonpositive_param, tag + ": half_saturation must be > 0");
    }
    if (!(s.decay >= 0.0)) throw Error(ErrorCode::nonpositive_param, tag + ": decay must be >= 0");
    if (s.limiting_substrate >= m) {
      throw Error(ErrorCode::dimension_mismatch, tag + ": limiting substrate index out of range");
    }
    for (const auto& c : s.consumes) {
      if (!(c.yield > 0.0)) throw Error(ErrorCode::nonpositive_param, tag + ": yield must be > 0");
      if (c.substrate >= m) {
        throw Error(ErrorCode::dimension_mismatch, tag + ": consumed substrate index out of range");
      }
      quasi_positive = false;
    }
    if (s.decay > 0.0) quasi_positive = false;
    lipschitz = std::max(lipschitz, s.mu_max + s.decay);
  }

  auto species = params.species;
  auto f = [species](std::span<const double> Y, std::span<const double> C, std::span<double> out) {
    for (std::size_t i = 0; i < species.size(); ++i) {
      const auto& s = species[i];
      const double c = C[s.limiting_substrate];
      out[i] = (s.mu_max * c / (s.half_saturation + c) - s.decay) * Y[i];
    }
  };
  auto h = [species](std::span<const double> Y, std::span<const double> C, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < species.size(); ++i) {
      const auto& s = species[i];
      for (const auto& c : s.consumes) {
        const double cj = C[c.substrate];
        out[c.substrate] -= s.mu_max * cj / (s.half_saturation + cj) * Y[i] / c.yield;
      }
    }
  };
  return KineticsModel(n, m, f, h, {}, quasi_positive, lipschitz, "monod");
}

using Matrix = std::vector<std::vector<double>>;

/// f = A Y + c, h = B C + d, g = sum_i f_i.
inline KineticsModel linear_preset(const Matrix& A, const Matrix& B, const std::vector<double>& c,
                                   const std::vector<double>& d) {
  const std::size_t n = A.size();
  const std::size_t m = B.size();
  auto square = [](const Matrix& M) {
    for (const auto& row : M) {
      if (row.size() != M.size()) return false;
    }
    return true;
  };
  if (n == 0 || m == 0 || !square(A) || !square(B) || c.size() != n || d.size() != m) {
    throw Error(ErrorCode::dimension_mismatch, "linear preset needs A (n x n), B (m x m), c (n), d (m)");
  }
  bool quasi_positive = true;
  double lipschitz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (double a : A[i]) {
      if (a < 0.0) quasi_positive = false;
      row += std::abs(a);
    }
    if (c[i] < 0.0) quasi_positive = false;
    lipschitz = std::max(lipschitz, row);
  }
  for (std::size_t j = 0; j < m; ++j) {
    double row = 0.0;
    for (double b : B[j]) {
      if (b < 0.0) quasi_positive = false;
      row += std::abs(b);
    }
    if (d[j] < 0.0) quasi_positive = false;
    lipschitz = std::max(lipschitz, row);
  }
  auto affine = [](const Matrix& M, const std::vector<double>& shift) {
    return [M, shift](std::span<const double> x, std::span<double> out) {
      for (std::size_t r = 0; r < M.size(); ++r) {
        double acc = shift[r];
        for (std::size_t k = 0; k < M[r].size(); ++k) acc += M[r][k] * x[k];
        out[r] = acc;
      }
    };
  };
  auto fa = affine(A, c);
  auto hb = affine(B, d);
  auto f = [fa](std::span<const double> Y, std::span<const double>, std::span<double> out) { fa(Y, out); };
  auto h = [hb](std::span<const double>, std::span<const double> C, std::span<double> out) { hb(C, out); };
  return KineticsModel(n, m, f, h, {}, quasi_positive, lipschitz, "linear");
}

using SpatialField = std::function<double(double z)>;
using BoundarySignal = std::function<double(double t)>;

/// Initial profiles phi (biomass) and theta (substrate), Dirichlet data psi at z = 1,
/// diffusivities D, detachment coefficient lambda and initial thickness R0.
struct ProblemData {
  std::vector<SpatialField> phi;
  std::vector<SpatialField> theta;
  std::vector<BoundarySignal> psi;
  std::vector<double> D;
  double lambda = 1.0;
  double R0 = 1.0;
};

struct ValidationIssue {
  std::string code;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationIssue> violations;
  std::vector<ValidationIssue> warnings;

  bool has_violation(std::string_view code) const {
    for (const auto& v : violations) {
      if (v.code == code) return true;
    }
    return false;
  }
  bool has_warning(std::string_view code) const {
    for (const auto& v : warnings) {
      if (v.code == code) return true;
    }
    return false;
  }
};

inline constexpr double compatibility_tolerance = 1e-12;

/// Never throws: every failed precondition becomes a violation or a warning.
inline ValidationReport validate_problem(const ProblemData& data, const KineticsModel& kin,
                                         std::size_t sample_cells = 100) {
  ValidationReport report;
  auto violate = [&](std::string code, std::string message) {
    report.violations.push_back({std::move(code), std::move(message)});
  };
  auto warn = [&](std::string code, std::string message) {
    report.warnings.push_back({std::move(code), std::move(message)});
  };
  const std::size_t n = kin.species();
  const std::size_t m = kin.substrates();

  if (data.phi.size() != n) violate("DIMENSION_MISMATCH", "expected " + std::to_string(n) + " phi profiles");
  if (data.theta.size() != m) violate("DIMENSION_MISMATCH", "expected " + std::to_string(m) + " theta profiles");
  if (data.psi.size() != m) violate("DIMENSION_MISMATCH", "expected " + std::to_string(m) + " psi signals");
  if (data.D.size() != m) violate("DIMENSION_MISMATCH", "expected " + std::to_string(m) + " diffusivities");
  for (std::size_t j = 0; j < data.D.size(); ++j) {
    if (!(data.D[j] > 0.0)) {
      violate("NONPOSITIVE_DIFFUSIVITY", "D" + std::to_string(j + 1) + " must be > 0");
    }
  }
  if (!(data.lambda > 0.0)) violate("NONPOSITIVE_LAMBDA", "lambda must be > 0");
  if (!(data.R0 > 0.0)) violate("NONPOSITIVE_R0", "R0 must be > 0");
  if (!report.violations.empty()) {
    report.ok = false;
    return report;
  }
  for (const auto& fn : data.phi) {
    if (!fn) violate("MISSING_DATA", "phi profile is empty");
  }
  for (const auto& fn : data.theta) {
    if (!fn) violate("MISSING_DATA", "theta profile is empty");
  }
  for (const auto& fn : data.psi) {
    if (!fn) violate("MISSING_DATA", "psi signal is empty");
  }
  if (!report.violations.empty()) {
    report.ok = false;
    return report;
  }

  const Grid grid(std::max<std::size_t>(sample_cells, 4));
  std::vector<Profile> phi;
  std::vector<Profile> theta;
  bool finite = true;
  for (const auto& fn : data.phi) {
    phi.push_back(Profile::sample(grid, fn));
    finite = finite && phi.back().all_finite();
  }
  for (const auto& fn : data.theta) {
    theta.push_back(Profile::sample(grid, fn));
    finite = finite && theta.back().all_finite();
  }
  if (!finite) {
    violate("NONFINITE_DATA", "initial data is not finite on the sample grid");
    report.ok = false;
    return report;
  }

  for (std::size_t j = 0; j < m; ++j) {
    const double at_boundary = data.theta[j](1.0);
    const double signal = data.psi[j](0.0);
    if (!std::isfinite(signal) || std::abs(at_boundary - signal) > compatibility_tolerance) {
      violate("COMPAT_MISMATCH", "theta" + std::to_string(j + 1) + "(1) = " + std::to_string(at_boundary) +
                                     " but psi" + std::to_string(j + 1) + "(0) = " + std::to_string(signal));
    }
  }

  if (kin.quasi_positive()) {
    bool negative = false;
    for (const auto& p : phi) negative = negative || min_value(p) < 0.0;
    for (const auto& p : theta) negative = negative || min_value(p) < 0.0;
    if (negative) warn("NEGATIVE_INITIAL_DATA", "initial data has negative values");
  }

  // Second-order compatibility at the corner (z, t) = (1, 0):
  // D theta'' + v1 theta' + R0^2 h = psi'.
  {
    std::vector<double> Y(n);
    std::vector<double> C(m);
    Profile g(grid);
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
      for (std::size_t i = 0; i < n; ++i) Y[i] = phi[i][k];
      for (std::size_t j = 0; j < m; ++j) C[j] = theta[j][k];
      g[k] = kin.velocity_source(Y, C);
    }
    const double v1 = data.R0 * data.R0 * trapz(g);
    for (std::size_t i = 0; i < n; ++i) Y[i] = phi[i][grid.cells()];
    for (std::size_t j = 0; j < m; ++j) C[j] = theta[j][grid.cells()];
    std::vector<double> h(m);
    kin.substrate_rates(Y, C, h);
    constexpr double step = 1e-3;
    for (std::size_t j = 0; j < m; ++j) {
      const auto& th = data.theta[j];
      const auto& ps = data.psi[j];
      const double d1 = (3.0 * th(1.0) - 4.0 * th(1.0 - step) + th(1.0 - 2 * step)) / (2 * step);
      const double d2 =
          (2.0 * th(1.0) - 5.0 * th(1.0 - step) + 4.0 * th(1.0 - 2 * step) - th(1.0 - 3 * step)) /
          (step * step);
      const double dpsi = (-3.0 * ps(0.0) + 4.0 * ps(step) - ps(2 * step)) / (2 * step);
      const double lhs = data.D[j] * d2 + v1 * d1 + data.R0 * data.R0 * h[j];
      const double scale = 1.0 + std::abs(lhs) + std::abs(dpsi);
      if (!(std::abs(lhs - dpsi) <= 1e-3 * scale)) {
        warn("SECOND_ORDER_COMPAT", "substrate " + std::to_string(j + 1) +
                                        ": corner compatibility residual " + std::to_string(lhs - dpsi));
      }
    }
  }

  report.ok = report.violations.empty();
  return report;
}

}  // namespace biofilm
