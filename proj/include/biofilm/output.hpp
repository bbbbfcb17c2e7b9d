#pragma once

// CSV time series, per-snapshot profiles and a JSON manifest for one trajectory.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "biofilm/coupler.hpp"
#include "biofilm/error.hpp"

namespace biofilm {

/// Shortest decimal form is not required; 17 significant digits round-trip every double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Manifest {
  std::vector<std::string> files;
  std::string config_hash;
  std::string outcome;
};

namespace detail {

class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void close() {
    out_.close();
    if (!out_) throw Error(ErrorCode::io_error, "failed writing " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace detail

inline Manifest write_timeseries(const Trajectory& traj, const std::filesystem::path& dir,
                                 const std::string& config_hash = {}) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + dir.string() + ": " + ec.message());

  Manifest manifest;
  manifest.config_hash = config_hash;
  manifest.outcome = std::string(to_string(traj.outcome));

  {
    detail::CsvFile csv(dir / "scalars.csv");
    csv.row({"t", "R", "v1", "energy", "picard_iters", "residual", "flags"});
    for (const auto& r : traj.reports) {
      csv.row({format_double(r.t), format_double(r.R), format_double(r.v1), format_double(r.energy),
               std::to_string(r.picard_iterations), format_double(r.final_residual()), r.flags.to_string()});
    }
    csv.close();
    manifest.files.push_back("scalars.csv");
  }

  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const auto& state = traj.states[s];
    const std::string name = "snapshot_" + std::to_string(s) + ".csv";
    detail::CsvFile csv(dir / name);
    std::vector<std::string> header{"z"};
    for (std::size_t i = 0; i < state.Y.size(); ++i) header.push_back("Y" + std::to_string(i + 1));
    for (std::size_t j = 0; j < state.C.size(); ++j) header.push_back("C" + std::to_string(j + 1));
    header.push_back("v");
    csv.row(header);
    for (std::size_t k = 0; k < state.grid().nodes(); ++k) {
      std::vector<std::string> cells{format_double(state.grid().node(k))};
      for (const auto& y : state.Y) cells.push_back(format_double(y[k]));
      for (const auto& c : state.C) cells.push_back(format_double(c[k]));
      cells.push_back(format_double(state.v[k]));
      csv.row(cells);
    }
    csv.close();
    manifest.files.push_back(name);
  }

  {
    const auto physical = back_transform(traj);
    detail::CsvFile csv(dir / "physical_scalars.csv");
    csv.row({"t_phys", "L", "u1"});
    for (const auto& p : physical.scalars) {
      csv.row({format_double(p.t), format_double(p.L), format_double(p.u1)});
    }
    csv.close();
    manifest.files.push_back("physical_scalars.csv");
  }

  nlohmann::json doc;
  doc["files"] = manifest.files;
  doc["config_hash"] = manifest.config_hash;
  doc["outcome"] = manifest.outcome;
  doc["steps"] = traj.reports.size();
  doc["snapshots"] = traj.states.size();
  if (!traj.message.empty()) doc["message"] = traj.message;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write manifest in " + dir.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::io_error, "failed writing manifest in " + dir.string());
  return manifest;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw Error(ErrorCode::schema_violation, "no column " + name);
  }
  double number(std::size_t row, const std::string& name) const { return std::stod(rows.at(row).at(column(name))); }
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace biofilm
