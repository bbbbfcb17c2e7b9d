#pragma once

// JSON run configuration: problem, solver, output and verify blocks.
// The schema is documented in docs/config.md. Unknown keys are rejected.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "biofilm/coupler.hpp"
#include "biofilm/error.hpp"
#include "biofilm/expression.hpp"
#include "biofilm/grid.hpp"
#include "biofilm/model.hpp"

namespace biofilm {

struct OutputSpec {
  std::string directory = "out";
  std::size_t snapshot_stride = 1;
  std::vector<std::string> formats{"csv"};
};

struct RunSpec {
  std::string kinetics_preset = "zero";
  KineticsModel kinetics = zero_preset(1, 1);
  ProblemData data;
  SolverConfig solver;
  double t_end = 1.0;
  OutputSpec output;
  std::optional<EnvelopeParams> envelope;
  std::string source_text;
  std::vector<ValidationIssue> warnings;
};

/// FNV-1a, printed as 16 hex digits.
inline std::string config_hash(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

using json = nlohmann::json;

/// Object reader that remembers which keys were consumed.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw Error(ErrorCode::schema_violation, where() + " must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& at(const std::string& key) {
    if (!node_.contains(key)) throw Error(ErrorCode::schema_violation, "missing key " + child(key));
    used_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      at(key);
    }
    const auto& v = at(key);
    if (!v.is_number()) throw Error(ErrorCode::schema_violation, child(key) + " must be a number");
    return v.get<double>();
  }

  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      at(key);
    }
    const auto& v = at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw Error(ErrorCode::schema_violation, child(key) + " must be a nonnegative integer");
    }
    return v.get<std::size_t>();
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      at(key);
    }
    const auto& v = at(key);
    if (!v.is_string()) throw Error(ErrorCode::schema_violation, child(key) + " must be a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_boolean()) throw Error(ErrorCode::schema_violation, child(key) + " must be a boolean");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array()) throw Error(ErrorCode::schema_violation, child(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw Error(ErrorCode::schema_violation, child(key) + " must hold numbers only");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Section section(const std::string& key) { return Section(at(key), child(key)); }

  /// Throws UNKNOWN_KEY for any key that was never read.
  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!used_.count(it.key())) throw Error(ErrorCode::unknown_key, "unknown key " + child(it.key()));
    }
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "document" : path_; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

inline Matrix read_matrix(const json& v, const std::string& path) {
  if (!v.is_array()) throw Error(ErrorCode::schema_violation, path + " must be an array of rows");
  Matrix M;
  for (const auto& row : v) {
    if (!row.is_array()) throw Error(ErrorCode::schema_violation, path + " rows must be arrays");
    std::vector<double> r;
    for (const auto& e : row) {
      if (!e.is_number()) throw Error(ErrorCode::schema_violation, path + " must hold numbers only");
      r.push_back(e.get<double>());
    }
    M.push_back(std::move(r));
  }
  return M;
}

/// A nodal array on its own uniform grid over [0, 1], interpolated linearly.
inline SpatialField nodal_field(std::vector<double> values, const std::string& path) {
  if (values.size() < 2) throw Error(ErrorCode::schema_violation, path + " needs at least 2 nodal values");
  return [values = std::move(values)](double z) {
    const double s = std::clamp(z, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto k = static_cast<std::size_t>(std::floor(s));
    if (k + 1 >= values.size()) return values.back();
    const double w = s - static_cast<double>(k);
    return (1.0 - w) * values[k] + w * values[k + 1];
  };
}

inline SpatialField spatial_field(const json& v, const std::string& path) {
  if (v.is_number()) {
    const double c = v.get<double>();
    return [c](double) { return c; };
  }
  if (v.is_string()) {
    auto e = Expression::parse(v.get<std::string>(), "z");
    return [e](double z) { return e(z); };
  }
  if (v.is_array()) {
    std::vector<double> values;
    for (const auto& x : v) {
      if (!x.is_number()) throw Error(ErrorCode::schema_violation, path + " must hold numbers only");
      values.push_back(x.get<double>());
    }
    return nodal_field(std::move(values), path);
  }
  throw Error(ErrorCode::schema_violation, path + " must be a number, an expression in z or a nodal array");
}

inline BoundarySignal boundary_signal(const json& v, const std::string& path) {
  if (v.is_number()) {
    const double c = v.get<double>();
    return [c](double) { return c; };
  }
  if (v.is_string()) {
    auto e = Expression::parse(v.get<std::string>(), "t");
    return [e](double t) { return e(t); };
  }
  throw Error(ErrorCode::schema_violation, path + " must be a number or an expression in t");
}

inline void read_kinetics(Section k, RunSpec& spec) {
  spec.kinetics_preset = k.text("preset");
  const auto& preset = spec.kinetics_preset;
  if (preset == "zero") {
    const std::size_t n = k.count("species", 1);
    const std::size_t m = k.count("substrates", 1);
    spec.kinetics = zero_preset(n, m);
  } else if (preset == "monod") {
    MonodParams params;
    params.substrates = k.count("substrates", 1);
    const auto& list = k.at("species");
    if (!list.is_array()) throw Error(ErrorCode::schema_violation, k.child("species") + " must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      Section s(list[i], k.child("species") + "[" + std::to_string(i) + "]");
      MonodSpecies sp;
      sp.mu_max = s.number("mu_max");
      sp.half_saturation = s.number("half_saturation");
      sp.decay = s.number("decay", 0.0);
      sp.limiting_substrate = s.count("limiting_substrate", 0);
      if (s.has("consumes")) {
        const auto& cons = s.at("consumes");
        if (!cons.is_array()) throw Error(ErrorCode::schema_violation, s.child("consumes") + " must be an array");
        for (std::size_t c = 0; c < cons.size(); ++c) {
          Section cs(cons[c], s.child("consumes") + "[" + std::to_string(c) + "]");
          sp.consumes.push_back({cs.count("substrate"), cs.number("yield")});
          cs.finish();
        }
      }
      s.finish();
      params.species.push_back(std::move(sp));
    }
    spec.kinetics = monod_preset(params);
  } else if (preset == "linear") {
    const Matrix A = read_matrix(k.at("A"), k.child("A"));
    const Matrix B = read_matrix(k.at("B"), k.child("B"));
    std::vector<double> c = k.has("c") ? k.numbers("c") : std::vector<double>(A.size(), 0.0);
    std::vector<double> d = k.has("d") ? k.numbers("d") : std::vector<double>(B.size(), 0.0);
    spec.kinetics = linear_preset(A, B, c, d);
  } else {
    throw Error(ErrorCode::schema_violation,
                k.child("preset") + " must be one of zero, monod, linear (got '" + preset + "')");
  }
  k.finish();
}

template <class Fn, class Out>
void read_list(Section& sec, const std::string& key, std::size_t expected, Fn&& convert, std::vector<Out>& out,
               Out fallback) {
  out.clear();
  if (!sec.has(key)) {
    out.assign(expected, fallback);
    return;
  }
  const auto& v = sec.at(key);
  if (!v.is_array() || v.size() != expected) {
    throw Error(ErrorCode::schema_violation,
                sec.child(key) + " must be an array with " + std::to_string(expected) + " entries");
  }
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert(v[i], sec.child(key) + "[" + std::to_string(i) + "]"));
}

inline std::size_t line_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

}  // namespace detail

inline RunSpec parse_config(std::string_view text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error,
                "line " + std::to_string(detail::line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " + e.what());
  }

  RunSpec spec;
  spec.source_text = std::string(text);
  detail::Section root(doc, "");

  {
    auto problem = root.section("problem");
    detail::read_kinetics(problem.section("kinetics"), spec);
    const std::size_t n = spec.kinetics.species();
    const std::size_t m = spec.kinetics.substrates();
    const SpatialField zero_field = [](double) { return 0.0; };
    const BoundarySignal zero_signal = [](double) { return 0.0; };
    detail::read_list(problem, "phi", n, detail::spatial_field, spec.data.phi, zero_field);
    detail::read_list(problem, "theta", m, detail::spatial_field, spec.data.theta, zero_field);
    detail::read_list(problem, "psi", m, detail::boundary_signal, spec.data.psi, zero_signal);
    if (problem.has("D")) {
      spec.data.D = problem.numbers("D");
      if (spec.data.D.size() != m) {
        throw Error(ErrorCode::schema_violation, "problem.D must have " + std::to_string(m) + " entries");
      }
    } else {
      spec.data.D.assign(m, 1.0);
    }
    spec.data.lambda = problem.number("lambda");
    spec.data.R0 = problem.number("R0");
    problem.finish();
  }

  if (root.has("solver")) {
    auto s = root.section("solver");
    auto& cfg = spec.solver;
    cfg.N = s.count("N", cfg.N);
    cfg.dt = s.number("dt", cfg.dt);
    spec.t_end = s.number("t_end", spec.t_end);
    cfg.picard_tol = s.number("picard_tol", cfg.picard_tol);
    cfg.picard_max_iter = s.count("picard_max_iter", cfg.picard_max_iter);
    cfg.theta_scheme = s.number("theta_scheme", cfg.theta_scheme);
    const auto coefficient = s.text("transport_coefficient", "scaled");
    if (coefficient == "scaled") {
      cfg.transport_coefficient = TransportCoefficient::scaled;
    } else if (coefficient == "unscaled") {
      cfg.transport_coefficient = TransportCoefficient::unscaled;
    } else {
      throw Error(ErrorCode::schema_violation, "solver.transport_coefficient must be scaled or unscaled");
    }
    const auto mode = s.text("positivity_mode", "monitor");
    if (mode == "monitor") {
      cfg.positivity_mode = PositivityMode::monitor;
    } else if (mode == "fail") {
      cfg.positivity_mode = PositivityMode::fail;
    } else {
      throw Error(ErrorCode::schema_violation, "solver.positivity_mode must be monitor or fail");
    }
    cfg.continuation_threshold = s.number("continuation_threshold", cfg.continuation_threshold);
    cfg.r_floor = s.number("r_floor", cfg.r_floor);
    if (s.has("energy_weights")) {
      auto w = s.section("energy_weights");
      if (w.has("mu")) cfg.energy_weights.mu = w.numbers("mu");
      if (w.has("nu")) cfg.energy_weights.nu = w.numbers("nu");
      w.finish();
    }
    s.finish();
  }

  if (root.has("output")) {
    auto o = root.section("output");
    spec.output.directory = o.text("directory", spec.output.directory);
    spec.output.snapshot_stride = o.count("snapshot_stride", spec.output.snapshot_stride);
    if (o.has("formats")) {
      const auto& f = o.at("formats");
      if (!f.is_array()) throw Error(ErrorCode::schema_violation, "output.formats must be an array");
      spec.output.formats.clear();
      for (const auto& e : f) {
        if (!e.is_string() || e.get<std::string>() != "csv") {
          throw Error(ErrorCode::schema_violation, "output.formats supports \"csv\" only");
        }
        spec.output.formats.push_back("csv");
      }
    }
    o.finish();
  }
  spec.solver.output_stride = spec.output.snapshot_stride;

  if (root.has("verify")) {
    auto v = root.section("verify");
    if (v.has("envelope")) {
      auto e = v.section("envelope");
      EnvelopeParams params;
      params.alpha = e.number("alpha");
      params.beta_plus_m0 = e.number("beta_plus_m0", 0.0);
      params.include_boundary_flux = e.flag("include_boundary_flux", false);
      e.finish();
      spec.envelope = params;
    }
    v.finish();
  }
  root.finish();

  spec.solver.validate(spec.kinetics.species(), spec.kinetics.substrates());
  if (!(spec.t_end > 0.0)) throw Error(ErrorCode::schema_violation, "solver.t_end must be > 0");
  const auto report = validate_problem(spec.data, spec.kinetics);
  if (!report.ok) {
    std::string msg = "problem data is invalid:";
    for (const auto& v : report.violations) msg += " " + v.code + " (" + v.message + ")";
    throw Error(ErrorCode::schema_violation, msg);
  }
  spec.warnings = report.warnings;
  return spec;
}

inline RunSpec load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace biofilm
