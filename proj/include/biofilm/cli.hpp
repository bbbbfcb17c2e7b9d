#pragma once

// Command-line entry points: simulate, sweep, verify, mms.
// Exit codes: 0 success, 1 classified failure, 2 usage or configuration error.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "biofilm/config.hpp"
#include "biofilm/coupler.hpp"
#include "biofilm/mms.hpp"
#include "biofilm/output.hpp"

namespace biofilm {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

struct VerifyCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

/// Invariant suite for one finished run.
inline std::vector<VerifyCheck> verify_trajectory(const RunSpec& spec, const Trajectory& traj) {
  std::vector<VerifyCheck> checks;

  checks.push_back({"outcome", traj.outcome == Outcome::completed,
                    std::string(to_string(traj.outcome)) + (traj.message.empty() ? "" : ": " + traj.message)});

  bool nonnegative_data = true;
  for (const auto& p : traj.states.front().Y) nonnegative_data = nonnegative_data && min_value(p) >= 0.0;
  for (const auto& p : traj.states.front().C) nonnegative_data = nonnegative_data && min_value(p) >= 0.0;
  if (nonnegative_data) {
    double min_y = std::numeric_limits<double>::infinity();
    double min_c = std::numeric_limits<double>::infinity();
    bool flagged = false;
    for (const auto& s : traj.states) {
      for (const auto& p : s.Y) min_y = std::min(min_y, min_value(p));
      for (const auto& p : s.C) min_c = std::min(min_c, min_value(p));
    }
    for (const auto& r : traj.reports) {
      flagged = flagged || r.flags.contains(InvariantFlag::negative_y) || r.flags.contains(InvariantFlag::negative_c);
    }
    checks.push_back({"positivity", !flagged,
                      "min Y " + format_double(min_y) + ", min C " + format_double(min_c) + " over stored states"});
  }

  {
    double v1_max = traj.states.empty() ? 0.0 : std::abs(traj.states.front().v1());
    double worst = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (const auto& r : traj.reports) {
      v1_max = std::max(v1_max, std::abs(r.v1));
      const double bound = r_max_bound(traj.R0, traj.lambda, v1_max);
      worst = std::max(worst, r.R - bound);
      ok = ok && r.R <= bound + r_bound_slack;
    }
    checks.push_back({"thickness_bound", ok, "max R - R_max = " + format_double(traj.reports.empty() ? 0.0 : worst)});
  }

  if (spec.envelope) {
    const auto env = dissipation_envelope_check(traj, *spec.envelope);
    checks.push_back({"energy_envelope", env.ok,
                      "gamma " + format_double(env.gamma) +
                          (env.first_violation ? ", first violation at t = " + format_double(*env.first_violation) : "")});
  }

  if (const auto balance = steady_state_balance(traj)) {
    checks.push_back({"steady_state_balance", balance->ok, "|v1 - lambda R^2| = " + format_double(balance->imbalance)});
  }
  return checks;
}

namespace detail {

inline int report_error(std::ostream& err, const Error& e) {
  err << "error: " << e.what() << '\n';
  switch (e.code()) {
    case ErrorCode::parse_error:
    case ErrorCode::unknown_key:
    case ErrorCode::schema_violation:
    case ErrorCode::io_error:
    case ErrorCode::too_coarse:
    case ErrorCode::nonpositive_param:
    case ErrorCode::dimension_mismatch:
      return exit_usage;
    default:
      return exit_failure;
  }
}

inline void apply_parameter(RunSpec& spec, const std::string& param, double value) {
  if (param == "lambda") {
    spec.data.lambda = value;
  } else if (param == "R0") {
    spec.data.R0 = value;
  } else if (param == "dt") {
    spec.solver.dt = value;
  } else if (param == "t_end") {
    spec.t_end = value;
  } else {
    throw Error(ErrorCode::schema_violation, "sweep parameter must be lambda, R0, dt or t_end");
  }
}

inline double final_energy(const Trajectory& traj) {
  return traj.reports.empty() ? traj.initial_energy : traj.reports.back().energy;
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Biofilm free-boundary solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<double> dt_override;
  std::optional<std::size_t> grid_override;
  auto* simulate = app.add_subcommand("simulate", "run one trajectory and write CSV output");
  simulate->add_option("--config", config_path, "run configuration (JSON)")->required();
  simulate->add_option("--out", out_dir, "output directory (overrides output.directory)");
  simulate->add_option("--dt", dt_override, "time step override");
  simulate->add_option("--grid-n", grid_override, "grid cell count override");

  std::string sweep_param;
  std::vector<std::string> sweep_values;
  std::size_t jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "run independent simulations over one parameter");
  sweep->add_option("--config", config_path, "base run configuration (JSON)")->required();
  sweep->add_option("--param", sweep_param, "parameter to vary: lambda, R0, dt or t_end")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required()->delimiter(',');
  sweep->add_option("--jobs", jobs, "concurrent simulations")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_dir, "output directory (overrides output.directory)");

  auto* verify = app.add_subcommand("verify", "run and check positivity, thickness bound, energy envelope");
  verify->add_option("--config", config_path, "run configuration (JSON)")->required();

  std::vector<std::size_t> mms_grids{25, 50, 100, 200};
  auto* mms = app.add_subcommand("mms", "manufactured-solution convergence study");
  mms->add_option("--grids", mms_grids, "grid cell counts")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return exit_usage;
  }

  auto load = [&](const std::string& path) {
    RunSpec spec = load_config(path);
    for (const auto& w : spec.warnings) err << "warning: " << w.code << " (" << w.message << ")\n";
    return spec;
  };

  try {
    if (*simulate) {
      RunSpec spec = load(config_path);
      if (dt_override) spec.solver.dt = *dt_override;
      if (grid_override) spec.solver.N = *grid_override;
      spec.solver.validate(spec.kinetics.species(), spec.kinetics.substrates());
      const std::filesystem::path dir = out_dir.empty() ? spec.output.directory : out_dir;
      const auto traj = run_simulation(spec.data, spec.kinetics, spec.solver, spec.t_end);
      write_timeseries(traj, dir, config_hash(spec.source_text));
      out << "outcome " << to_string(traj.outcome) << ", steps " << traj.reports.size() << ", final R "
          << format_double(traj.states.back().R) << ", output " << dir.string() << '\n';
      if (!traj.message.empty()) out << traj.message << '\n';
      return traj.outcome == Outcome::completed ? exit_ok : exit_failure;
    }

    if (*sweep) {
      const RunSpec base = load(config_path);
      std::vector<double> values;
      for (const auto& token : sweep_values) {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(token, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != token.size()) {
          err << "usage error: '" << token << "' is not a number\n";
          return exit_usage;
        }
        values.push_back(v);
      }
      {
        RunSpec probe = base;
        detail::apply_parameter(probe, sweep_param, values.front());
      }
      const std::filesystem::path dir = out_dir.empty() ? base.output.directory : out_dir;
      const std::string hash = config_hash(base.source_text);

      struct Row {
        std::string outcome;
        double final_R = 0.0;
        double final_energy = 0.0;
        std::size_t steps = 0;
        std::string error;
      };
      std::vector<Row> rows(values.size());
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
          try {
            RunSpec spec = base;
            detail::apply_parameter(spec, sweep_param, values[i]);
            const auto traj = run_simulation(spec.data, spec.kinetics, spec.solver, spec.t_end);
            write_timeseries(traj, dir / (sweep_param + "_" + std::to_string(i)), hash);
            rows[i] = {std::string(to_string(traj.outcome)), traj.states.back().R, detail::final_energy(traj),
                       traj.reports.size(), {}};
          } catch (const std::exception& e) {
            rows[i].outcome = "error";
            rows[i].error = e.what();
          }
        }
      };
      std::vector<std::thread> pool;
      const std::size_t threads = std::min(jobs, values.size());
      for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
      worker();
      for (auto& th : pool) th.join();

      std::filesystem::create_directories(dir);
      detail::CsvFile csv(dir / "sweep_summary.csv");
      csv.row({sweep_param, "outcome", "final_R", "final_energy", "steps"});
      bool any_error = false;
      for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& r = rows[i];
        if (!r.error.empty()) {
          any_error = true;
          err << sweep_param << " = " << sweep_values[i] << ": " << r.error << '\n';
        }
        csv.row({sweep_values[i], r.outcome, format_double(r.final_R), format_double(r.final_energy),
                 std::to_string(r.steps)});
      }
      csv.close();
      out << "sweep of " << values.size() << " runs written to " << (dir / "sweep_summary.csv").string() << '\n';
      return any_error ? exit_failure : exit_ok;
    }

    if (*verify) {
      const RunSpec spec = load(config_path);
      const auto traj = run_simulation(spec.data, spec.kinetics, spec.solver, spec.t_end);
      bool ok = true;
      for (const auto& c : verify_trajectory(spec, traj)) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.passed;
      }
      return ok ? exit_ok : exit_failure;
    }

    if (*mms) {
      MmsConfig cfg;
      cfg.cells = mms_grids;
      const auto report = mms_study(cfg);
      for (const auto& c : report.cases) {
        out << c.name << ":";
        for (std::size_t i = 0; i < c.cells.size(); ++i) out << " N=" << c.cells[i] << " err=" << format_double(c.errors[i]);
        out << " order=" << c.order << " floor=" << c.floor << (c.passed ? " PASS" : " FAIL") << '\n';
      }
      require_orders(report);
      return exit_ok;
    }
  } catch (const Error& e) {
    return detail::report_error(err, e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_failure;
  }
  return exit_usage;
}

}  // namespace biofilm
