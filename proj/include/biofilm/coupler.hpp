#pragma once

// Per-step fixed-point coupling of the substrate, velocity, biomass and
// thickness updates, the time-marching driver, and the runtime monitors
// (positivity, thickness bound, continuation norms, energy).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "biofilm/boundary.hpp"
#include "biofilm/error.hpp"
#include "biofilm/grid.hpp"
#include "biofilm/model.hpp"
#include "biofilm/parabolic.hpp"
#include "biofilm/transport.hpp"

namespace biofilm {

enum class PositivityMode { monitor, fail };

/// Weights of the energy functional; empty vectors mean all ones.
struct EnergyWeights {
  std::vector<double> mu;
  std::vector<double> nu;

  double biomass(std::size_t i) const { return mu.empty() ? 1.0 : mu.at(i); }
  double substrate(std::size_t j) const { return nu.empty() ? 1.0 : nu.at(j); }
};

struct SolverConfig {
  std::size_t N = 100;
  double dt = 1e-3;
  double picard_tol = 1e-10;
  std::size_t picard_max_iter = 50;
  double theta_scheme = 0.5;
  TransportCoefficient transport_coefficient = TransportCoefficient::scaled;
  PositivityMode positivity_mode = PositivityMode::monitor;
  double continuation_threshold = 1e6;
  EnergyWeights energy_weights;
  double r_floor = default_r_floor;
  /// Every `output_stride`-th state is kept in the trajectory (plus the first and last).
  std::size_t output_stride = 1;

  void validate(std::size_t n, std::size_t m) const {
    if (N < 4) throw Error(ErrorCode::too_coarse, "N must be >= 4");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::schema_violation, "dt must be > 0");
    if (!(picard_tol > 0.0)) throw Error(ErrorCode::schema_violation, "picard_tol must be > 0");
    if (picard_max_iter < 1) throw Error(ErrorCode::schema_violation, "picard_max_iter must be >= 1");
    if (!(theta_scheme >= 0.5 && theta_scheme <= 1.0)) {
      throw Error(ErrorCode::schema_violation, "theta_scheme must lie in [0.5, 1]");
    }
    if (!(continuation_threshold > 0.0)) {
      throw Error(ErrorCode::schema_violation, "continuation_threshold must be > 0");
    }
    if (!(r_floor > 0.0)) throw Error(ErrorCode::schema_violation, "r_floor must be > 0");
    if (output_stride < 1) throw Error(ErrorCode::schema_violation, "output stride must be >= 1");
    if (!energy_weights.mu.empty() && energy_weights.mu.size() != n) {
      throw Error(ErrorCode::dimension_mismatch, "energy weight mu needs one entry per species");
    }
    if (!energy_weights.nu.empty() && energy_weights.nu.size() != m) {
      throw Error(ErrorCode::dimension_mismatch, "energy weight nu needs one entry per substrate");
    }
    for (double w : energy_weights.mu) {
      if (!(w > 0.0)) throw Error(ErrorCode::schema_violation, "energy weights must be > 0");
    }
    for (double w : energy_weights.nu) {
      if (!(w > 0.0)) throw Error(ErrorCode::schema_violation, "energy weights must be > 0");
    }
  }
};

/// Solution at one rescaled time. `v` is the velocity consistent with (Y, C, R).
struct State {
  double t = 0.0;
  std::vector<Profile> Y;
  std::vector<Profile> C;
  double R = 1.0;
  Profile v{Grid(4)};

  double v1() const { return v.back(); }
  const Grid& grid() const { return v.grid(); }
};

enum class InvariantFlag : std::uint8_t {
  negative_y = 1,
  negative_c = 2,
  r_bound_exceeded = 4,
  continuation = 8,
};

class FlagSet {
 public:
  void insert(InvariantFlag f) { bits_ |= static_cast<std::uint8_t>(f); }
  bool contains(InvariantFlag f) const { return (bits_ & static_cast<std::uint8_t>(f)) != 0; }
  bool empty() const { return bits_ == 0; }
  FlagSet& operator|=(FlagSet other) {
    bits_ |= other.bits_;
    return *this;
  }

  /// Pipe-separated names, empty when no flag is set.
  std::string to_string() const {
    std::string out;
    auto add = [&](InvariantFlag f, const char* name) {
      if (!contains(f)) return;
      if (!out.empty()) out += '|';
      out += name;
    };
    add(InvariantFlag::negative_y, "NEGATIVE_Y");
    add(InvariantFlag::negative_c, "NEGATIVE_C");
    add(InvariantFlag::r_bound_exceeded, "R_BOUND_EXCEEDED");
    add(InvariantFlag::continuation, "CONTINUATION");
    return out;
  }

  friend bool operator==(const FlagSet&, const FlagSet&) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct StepReport {
  std::size_t step = 0;
  double t = 0.0;
  double R = 0.0;
  double v1 = 0.0;
  std::size_t picard_iterations = 0;
  std::vector<double> residual_history;
  double contraction_ratio = 0.0;
  std::size_t clamped_feet = 0;
  double energy = 0.0;
  double boundary_energy_flux = 0.0;
  FlagSet flags;

  double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
};

enum class Outcome { completed, washout, continuation_tripped, picard_diverged, invariant_violated, solver_error };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::completed: return "completed";
    case Outcome::washout: return "washout";
    case Outcome::continuation_tripped: return "continuation_tripped";
    case Outcome::picard_diverged: return "picard_diverged";
    case Outcome::invariant_violated: return "invariant_violated";
    case Outcome::solver_error: return "solver_error";
  }
  return "unknown";
}

struct Trajectory {
  std::vector<State> states;
  std::vector<StepReport> reports;
  Outcome outcome = Outcome::completed;
  std::string message;
  double initial_energy = 0.0;
  double R0 = 1.0;
  double lambda = 1.0;
  EnergyWeights weights;
};

// ---------------------------------------------------------------------------
// Monitors

/// E = 1/2 sum_i mu_i int Y_i^2 + 1/2 sum_j nu_j int C_j^2 (trapezoid rule).
inline double energy(const State& s, const EnergyWeights& weights = {}) {
  double e = 0.0;
  auto squared = [](const Profile& p) {
    Profile q(p.grid());
    for (std::size_t k = 0; k < p.size(); ++k) q[k] = p[k] * p[k];
    return trapz(q);
  };
  for (std::size_t i = 0; i < s.Y.size(); ++i) e += weights.biomass(i) * squared(s.Y[i]);
  for (std::size_t j = 0; j < s.C.size(); ++j) e += weights.substrate(j) * squared(s.C[j]);
  return 0.5 * e;
}

/// |sum_j nu_j (v1 C_j(1)^2 / 2 + D_j C_j(1) dC_j/dz(1))|, the boundary term dropped
/// from the energy balance.
inline double boundary_energy_flux(const State& s, const std::vector<double>& D, const EnergyWeights& weights = {}) {
  const std::size_t N = s.grid().cells();
  const double dz = s.grid().dz();
  double flux = 0.0;
  for (std::size_t j = 0; j < s.C.size(); ++j) {
    const auto& c = s.C[j];
    const double slope = (3.0 * c[N] - 4.0 * c[N - 1] + c[N - 2]) / (2.0 * dz);
    flux += weights.substrate(j) * (0.5 * s.v1() * c[N] * c[N] + D.at(j) * c[N] * slope);
  }
  return std::abs(flux);
}

/// Largest of the discrete sup norms of Y, C, |R| and the one-sided gradient of Y.
inline double continuation_norm(const State& s) {
  double m = std::abs(s.R);
  const double dz = s.grid().dz();
  for (const auto& y : s.Y) {
    m = std::max(m, sup_norm(y));
    for (std::size_t k = 0; k + 1 < y.size(); ++k) m = std::max(m, std::abs(y[k + 1] - y[k]) / dz);
  }
  for (const auto& c : s.C) m = std::max(m, sup_norm(c));
  return m;
}

struct BoundContext {
  double R0 = 1.0;
  double lambda = 1.0;
  /// Running maximum of |v(1, t)|.
  double v1_max = 0.0;
};

inline constexpr double negativity_threshold = -1e-12;
inline constexpr double r_bound_slack = 1e-8;

inline FlagSet check_invariants(const State& s, const SolverConfig& cfg, const BoundContext& ctx) {
  FlagSet flags;
  for (const auto& y : s.Y) {
    if (min_value(y) < negativity_threshold) flags.insert(InvariantFlag::negative_y);
  }
  for (const auto& c : s.C) {
    if (min_value(c) < negativity_threshold) flags.insert(InvariantFlag::negative_c);
  }
  if (s.R > r_max_bound(ctx.R0, ctx.lambda, ctx.v1_max) + r_bound_slack) {
    flags.insert(InvariantFlag::r_bound_exceeded);
  }
  if (!(continuation_norm(s) <= cfg.continuation_threshold)) flags.insert(InvariantFlag::continuation);
  return flags;
}

// ---------------------------------------------------------------------------
// Stepping

inline State initial_state(const ProblemData& data, const KineticsModel& kin, const SolverConfig& cfg) {
  const Grid grid(cfg.N);
  State s;
  s.t = 0.0;
  for (const auto& fn : data.phi) s.Y.push_back(Profile::sample(grid, fn));
  for (const auto& fn : data.theta) s.C.push_back(Profile::sample(grid, fn));
  for (const auto& p : s.Y) {
    if (!p.all_finite()) throw Error(ErrorCode::nonfinite, "initial biomass is not finite");
  }
  for (const auto& p : s.C) {
    if (!p.all_finite()) throw Error(ErrorCode::nonfinite, "initial substrate is not finite");
  }
  s.R = data.R0;
  s.v = velocity_profile(s.Y, s.C, s.R, kin);
  return s;
}

/// R^2 h(Y, C) at every node.
inline std::vector<Profile> substrate_sources(const std::vector<Profile>& Y, const std::vector<Profile>& C,
                                              double R, const KineticsModel& kin) {
  const Grid grid = C.front().grid();
  std::vector<Profile> H(C.size(), Profile(grid));
  std::vector<double> y(Y.size());
  std::vector<double> c(C.size());
  std::vector<double> h(C.size());
  const double scale = R * R;
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = Y[i][k];
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = C[j][k];
    kin.substrate_rates(y, c, h);
    for (std::size_t j = 0; j < h.size(); ++j) H[j][k] = scale * h[j];
  }
  return H;
}

/// Geometric mean of successive residual ratios r_{k+1}/r_k, skipping r_2/r_1 when later
/// ratios exist: the first sweep starts from the previous state and the velocity stage
/// reacts to it with unit gain, so only later ratios measure the contraction.
/// 0 with fewer than two residuals.
inline double contraction_ratio(const std::vector<double>& residuals) {
  const std::size_t first = residuals.size() > 2 ? 2 : 1;
  double log_sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = first; k < residuals.size(); ++k) {
    if (residuals[k - 1] <= 0.0) break;
    if (residuals[k] <= 0.0) return 0.0;
    log_sum += std::log(residuals[k] / residuals[k - 1]);
    ++count;
  }
  return count == 0 ? 0.0 : std::exp(log_sum / static_cast<double>(count));
}

struct PicardResult {
  State state;
  StepReport report;
};

/// One step of length `dt`. Each sweep runs: substrate solve with lagged sources,
/// velocity reconstruction, biomass transport, thickness update. Iterates until the
/// sup-norm change of (Y, C, R, v1) drops to `picard_tol`.
inline PicardResult picard_step(const State& s, const ProblemData& data, const KineticsModel& kin,
                                const SolverConfig& cfg, double dt) {
  const std::size_t n = kin.species();
  const std::size_t m = kin.substrates();
  const Grid grid = s.grid();
  const double t_new = s.t + dt;
  const double v1_start = s.v1();
  const double R2_start = s.R * s.R;

  std::vector<double> psi_end(m);
  for (std::size_t j = 0; j < m; ++j) psi_end[j] = data.psi[j](t_new);
  const auto H_start = substrate_sources(s.Y, s.C, s.R, kin);

  std::vector<Profile> Y = s.Y;
  std::vector<Profile> C = s.C;
  double R = s.R;
  double v1 = v1_start;

  std::vector<double> y(n);
  std::vector<double> c(m);
  StepReport report;
  std::size_t rises = 0;

  for (std::size_t iter = 1;; ++iter) {
    double residual = 0.0;
    try {
    const auto H_end = substrate_sources(Y, C, R, kin);
    auto C_next = parabolic_step(s.C, H_start, H_end, v1_start, v1, data.D, psi_end, dt, cfg.theta_scheme);
    const Profile v_next = velocity_profile(Y, C_next, R, kin);
    const double v1_next = v_next.back();

    const double R2_iter = R * R;
    TransportSource sources = [&](double z, SourceStage stage, std::span<double> out) {
      if (stage == SourceStage::start) {
        for (std::size_t i = 0; i < n; ++i) y[i] = interp_linear(s.Y[i], z);
        for (std::size_t j = 0; j < m; ++j) c[j] = interp_linear(s.C[j], z);
        kin.biomass_rates(y, c, out);
        for (double& o : out) o *= R2_start;
      } else {
        const auto k = static_cast<std::size_t>(std::lround(z * static_cast<double>(grid.cells())));
        for (std::size_t i = 0; i < n; ++i) y[i] = Y[i][k];
        for (std::size_t j = 0; j < m; ++j) c[j] = C_next[j][k];
        kin.biomass_rates(y, c, out);
        for (double& o : out) o *= R2_iter;
      }
    };
    auto transported = transport_step(s.Y, sources, {v1_start, v1_next, dt}, cfg.transport_coefficient);
    const double R_next = boundary_update({s.R, v1_start}, v1_next, data.lambda, dt);
    if (!(R_next > 0.0) || !std::isfinite(R_next)) {
      throw Error(ErrorCode::nonfinite, "thickness update left (0, inf): " + std::to_string(R_next));
    }
    if (R_next <= cfg.r_floor) {
      throw Error(ErrorCode::thickness_collapse, "thickness fell to " + std::to_string(R_next));
    }

    residual = std::max(std::abs(R_next - R), std::abs(v1_next - v1));
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, sup_distance(transported.Y[i], Y[i]));
    for (std::size_t j = 0; j < m; ++j) residual = std::max(residual, sup_distance(C_next[j], C[j]));

    Y = std::move(transported.Y);
    C = std::move(C_next);
    R = R_next;
    v1 = v1_next;
    report.clamped_feet = transported.diagnostics.clamped_feet;
    report.residual_history.push_back(residual);
    } catch (const Error& e) {
      // Stage failures on an iterate mean the sweep left the region where it contracts.
      switch (e.code()) {
        case ErrorCode::unstable_assembly:
        case ErrorCode::zero_pivot:
        case ErrorCode::nonfinite:
          report.residual_history.push_back(std::numeric_limits<double>::infinity());
          throw PicardDivergence("sweep " + std::to_string(iter) + " failed (" + e.what() +
                                     "); reduce dt",
                                 report.residual_history);
        default:
          throw;
      }
    }

    if (!std::isfinite(residual)) {
      throw PicardDivergence("fixed-point residual is not finite", report.residual_history);
    }
    if (residual <= cfg.picard_tol) break;
    const auto& hist = report.residual_history;
    rises = hist.size() >= 2 && hist[hist.size() - 1] > hist[hist.size() - 2] ? rises + 1 : 0;
    if (rises >= 3) {
      throw PicardDivergence("fixed-point residual grew for 3 consecutive sweeps; reduce dt",
                             report.residual_history);
    }
    if (iter >= cfg.picard_max_iter) {
      throw PicardDivergence("no convergence within " + std::to_string(cfg.picard_max_iter) +
                                 " sweeps; reduce dt",
                             report.residual_history);
    }
  }

  State next;
  next.t = t_new;
  next.Y = std::move(Y);
  next.C = std::move(C);
  next.R = R;
  next.v = velocity_profile(next.Y, next.C, next.R, kin);

  report.t = t_new;
  report.R = next.R;
  report.v1 = next.v1();
  report.picard_iterations = report.residual_history.size();
  report.contraction_ratio = contraction_ratio(report.residual_history);
  report.energy = energy(next, cfg.energy_weights);
  report.boundary_energy_flux = boundary_energy_flux(next, data.D, cfg.energy_weights);
  return {std::move(next), std::move(report)};
}

inline PicardResult picard_step(const State& s, const ProblemData& data, const KineticsModel& kin,
                                const SolverConfig& cfg) {
  return picard_step(s, data, kin, cfg, cfg.dt);
}

/// Number of steps used to reach t_end with nominal step dt (the last step may be shorter).
inline std::size_t step_count(double t_end, double dt) {
  const double ratio = t_end / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, ratio)) return static_cast<std::size_t>(rounded);
  return static_cast<std::size_t>(std::ceil(ratio));
}

inline Trajectory run_simulation(const ProblemData& data, const KineticsModel& kin, const SolverConfig& cfg,
                                 double t_end) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error(ErrorCode::schema_violation, "t_end must be > 0");
  cfg.validate(kin.species(), kin.substrates());
  const auto validation = validate_problem(data, kin);
  if (!validation.ok) {
    std::string msg = "problem data failed validation:";
    for (const auto& v : validation.violations) msg += " " + v.code;
    throw Error(ErrorCode::schema_violation, msg);
  }

  Trajectory traj;
  traj.R0 = data.R0;
  traj.lambda = data.lambda;
  traj.weights = cfg.energy_weights;

  State current = initial_state(data, kin, cfg);
  traj.initial_energy = energy(current, cfg.energy_weights);
  traj.states.push_back(current);

  BoundContext ctx{data.R0, data.lambda, std::abs(current.v1())};
  const std::size_t steps = step_count(t_end, cfg.dt);
  bool last_stored = true;

  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_target = k == steps ? t_end : static_cast<double>(k) * cfg.dt;
    PicardResult result;
    try {
      result = picard_step(current, data, kin, cfg, t_target - current.t);
    } catch (const PicardDivergence& e) {
      traj.outcome = Outcome::picard_diverged;
      traj.message = e.what();
      break;
    } catch (const Error& e) {
      traj.outcome = e.code() == ErrorCode::thickness_collapse ? Outcome::washout : Outcome::solver_error;
      traj.message = e.what();
      break;
    }
    result.state.t = t_target;
    result.report.t = t_target;
    result.report.step = k;
    ctx.v1_max = std::max(ctx.v1_max, std::abs(result.state.v1()));
    result.report.flags = check_invariants(result.state, cfg, ctx);
    current = std::move(result.state);
    const FlagSet flags = result.report.flags;
    traj.reports.push_back(std::move(result.report));

    last_stored = k % cfg.output_stride == 0;
    if (last_stored) traj.states.push_back(current);

    if (flags.contains(InvariantFlag::continuation)) {
      traj.outcome = Outcome::continuation_tripped;
      traj.message = "continuation norms exceeded " + std::to_string(cfg.continuation_threshold);
      break;
    }
    if (cfg.positivity_mode == PositivityMode::fail &&
        (flags.contains(InvariantFlag::negative_y) || flags.contains(InvariantFlag::negative_c))) {
      traj.outcome = Outcome::invariant_violated;
      traj.message = "negative concentration: " + flags.to_string();
      break;
    }
  }
  if (!last_stored) traj.states.push_back(current);
  return traj;
}

/// Largest |v(1, t)| over the initial state and all steps.
inline double running_v1_max(const Trajectory& traj) {
  double m = traj.states.empty() ? 0.0 : std::abs(traj.states.front().v1());
  for (const auto& r : traj.reports) m = std::max(m, std::abs(r.v1));
  return m;
}

// ---------------------------------------------------------------------------
// Energy envelope

struct EnvelopeParams {
  double alpha = 1.0;
  /// beta + M0 as one constant.
  double beta_plus_m0 = 0.0;
  bool include_boundary_flux = false;
  double tolerance = 1e-3;
};

struct EnvelopeSample {
  double t = 0.0;
  double energy = 0.0;
  double envelope = 0.0;
};

struct EnvelopeReport {
  bool ok = true;
  double gamma = 0.0;
  double M_R = 0.0;
  double C_star = 0.0;
  double E0 = 0.0;
  std::vector<EnvelopeSample> samples;
  std::optional<double> first_violation;
};

/// Checks E(t) <= (e^{-gamma t} E(0) + M_R (beta + M0) / gamma) (1 + tol) at every step,
/// with M_R = max R^2, C* = min of all weights and gamma = 2 alpha M_R / C*.
inline EnvelopeReport dissipation_envelope_check(const Trajectory& traj, const EnvelopeParams& params) {
  if (!(params.alpha > 0.0) || !(params.beta_plus_m0 >= 0.0)) {
    throw Error(ErrorCode::schema_violation, "envelope needs alpha > 0 and beta + M0 >= 0");
  }
  if (traj.states.empty()) throw Error(ErrorCode::schema_violation, "empty trajectory");
  EnvelopeReport rep;
  rep.E0 = traj.initial_energy;
  double M_R = traj.states.front().R * traj.states.front().R;
  for (const auto& r : traj.reports) M_R = std::max(M_R, r.R * r.R);
  rep.M_R = M_R;

  const auto& s0 = traj.states.front();
  double c_star = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s0.Y.size(); ++i) c_star = std::min(c_star, traj.weights.biomass(i));
  for (std::size_t j = 0; j < s0.C.size(); ++j) c_star = std::min(c_star, traj.weights.substrate(j));
  rep.C_star = c_star;
  rep.gamma = 2.0 * params.alpha * M_R / c_star;
  const double asymptote = M_R * params.beta_plus_m0 / rep.gamma;

  double flux_integral = 0.0;
  double prev_t = s0.t;
  double prev_flux = traj.reports.empty() ? 0.0 : traj.reports.front().boundary_energy_flux;
  rep.samples.push_back({s0.t, rep.E0, rep.E0 + asymptote});
  for (const auto& r : traj.reports) {
    flux_integral += 0.5 * (r.t - prev_t) * (prev_flux + r.boundary_energy_flux);
    prev_t = r.t;
    prev_flux = r.boundary_energy_flux;
    double env = std::exp(-rep.gamma * r.t) * rep.E0 + asymptote;
    if (params.include_boundary_flux) env += flux_integral;
    rep.samples.push_back({r.t, r.energy, env});
    if (r.energy > env * (1.0 + params.tolerance) && !rep.first_violation) {
      rep.ok = false;
      rep.first_violation = r.t;
    }
  }
  return rep;
}

struct BalanceCheck {
  double detachment_rate = 0.0;
  double imbalance = 0.0;
  bool ok = true;
};

/// When the final state is stationary (|dR/dt| < 1e-8), checks |v1 - lambda R^2| < 1e-6 max(1, v1).
/// Returns nothing if the run did not end near equilibrium.
inline std::optional<BalanceCheck> steady_state_balance(const Trajectory& traj) {
  if (traj.states.empty()) return std::nullopt;
  const auto& s = traj.states.back();
  const double rate = detachment_rhs(s.R, s.v1(), traj.lambda);
  if (!(std::abs(rate) < 1e-8)) return std::nullopt;
  BalanceCheck check;
  check.detachment_rate = rate;
  check.imbalance = std::abs(s.v1() - traj.lambda * s.R * s.R);
  check.ok = check.imbalance < 1e-6 * std::max(1.0, s.v1());
  return check;
}

// ---------------------------------------------------------------------------
// Physical variables

struct PhysicalScalar {
  double t = 0.0;
  double L = 0.0;
  double u1 = 0.0;
};

struct PhysicalSnapshot {
  double t = 0.0;
  double L = 0.0;
  std::vector<double> x;
  std::vector<std::vector<double>> X;
  std::vector<std::vector<double>> S;
  std::vector<double> u;
};

struct PhysicalTrajectory {
  std::vector<PhysicalScalar> scalars;
  std::vector<PhysicalSnapshot> snapshots;
};

/// Maps rescaled output back to (t, x) with L = R, x = z L, u = v / L and
/// physical time accumulated by the trapezoid rule on dt = L^2 dt~.
inline PhysicalTrajectory back_transform(const Trajectory& traj) {
  PhysicalTrajectory out;
  if (traj.states.empty()) return out;
  struct Point {
    double t;
    double R;
    double v1;
  };
  std::vector<Point> points;
  points.push_back({traj.states.front().t, traj.states.front().R, traj.states.front().v1()});
  for (const auto& r : traj.reports) points.push_back({r.t, r.R, r.v1});
  for (const auto& p : points) {
    if (!(p.R > 0.0)) throw Error(ErrorCode::nonpositive_thickness, "thickness must stay positive");
  }

  std::vector<double> t_phys(points.size(), 0.0);
  for (std::size_t k = 1; k < points.size(); ++k) {
    const double dtr = points[k].t - points[k - 1].t;
    t_phys[k] = t_phys[k - 1] + 0.5 * dtr * (points[k - 1].R * points[k - 1].R + points[k].R * points[k].R);
  }
  for (std::size_t k = 0; k < points.size(); ++k) {
    out.scalars.push_back({t_phys[k], points[k].R, points[k].v1 / points[k].R});
  }

  std::size_t cursor = 0;
  for (const auto& s : traj.states) {
    if (!(s.R > 0.0)) throw Error(ErrorCode::nonpositive_thickness, "thickness must stay positive");
    while (cursor + 1 < points.size() && points[cursor].t < s.t) ++cursor;
    PhysicalSnapshot snap;
    snap.t = t_phys[cursor];
    snap.L = s.R;
    const auto z = s.grid().coordinates();
    for (double zk : z) snap.x.push_back(zk * s.R);
    for (const auto& y : s.Y) snap.X.emplace_back(y.values().begin(), y.values().end());
    for (const auto& c : s.C) snap.S.emplace_back(c.values().begin(), c.values().end());
    for (double vk : s.v.values()) snap.u.push_back(vk / s.R);
    out.snapshots.push_back(std::move(snap));
  }
  return out;
}

/// Thickness at physical time `t` by linear interpolation of the scalar series.
inline std::optional<double> thickness_at(const PhysicalTrajectory& pt, double t) {
  const auto& s = pt.scalars;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k].t >= t) {
      const double w = (t - s[k - 1].t) / (s[k].t - s[k - 1].t);
      return (1.0 - w) * s[k - 1].L + w * s[k].L;
    }
  }
  return std::nullopt;
}

}  // namespace biofilm
