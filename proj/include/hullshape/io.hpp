// Copyright 2026 The Hullshape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// CSV and manifest output plus key=value config files.
//
// All numeric CSV fields are printed with %.17g so that runs are
// byte-comparable: the shortest round-trip representation of the exact
// double, independent of locale and thread count.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hullshape/experiments.hpp"
#include "hullshape/geometry.hpp"

namespace hullshape {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvRow {
  long long n = 0;
  int rep = 0;  // -1 marks aggregate rows
  std::string metric;
  double value = 0.0;
};

inline void write_long_csv(const std::string& path,
                           const std::vector<CsvRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "n,rep,metric,value\n";
  for (const CsvRow& r : rows) {
    out << r.n << ',' << r.rep << ',' << r.metric << ','
        << format_double(r.value) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void append_cell_rows(const std::vector<CellMetrics>& cells,
                             std::vector<CsvRow>& rows) {
  for (const CellMetrics& c : cells) {
    const auto push = [&](const char* name, double v) {
      if (std::isfinite(v)) rows.push_back(CsvRow{c.n, c.rep, name, v});
    };
    push("rho", c.rho);
    push("vmin", c.vmin);
    push("vmax", c.vmax);
    push("perimeter", c.perimeter);
    push("area", c.area);
    push("diameter", c.diameter);
    push("zmax", c.zmax);
  }
}

inline std::vector<CsvRow> convergence_rows(const RunResult& result) {
  std::vector<CsvRow> rows;
  append_cell_rows(result.cells, rows);
  for (const ConvergenceRecord& r : result.convergence) {
    rows.push_back(CsvRow{r.n, -1, "mean_rho", r.mean_rho});
    rows.push_back(CsvRow{r.n, -1, "se_rho", r.se_rho});
    rows.push_back(CsvRow{r.n, -1, "rate", r.rate});
    rows.push_back(CsvRow{r.n, -1, "mesh_delta", r.mesh_delta});
    rows.push_back(CsvRow{r.n, -1, "mesh_error_bound", r.mesh_error_bound});
    rows.push_back(CsvRow{r.n, -1, "divergence_flag", r.divergence_flag ? 1.0 : 0.0});
    if (std::isfinite(r.shift_two_res)) {
      rows.push_back(CsvRow{r.n, -1, "shift_two_res", r.shift_two_res});
    }
  }
  for (const RateRecord& r : result.rates) {
    rows.push_back(CsvRow{r.n, -1, "rate_se", r.se_rate});
    rows.push_back(CsvRow{r.n, -1, "rate_nonincreasing", r.nonincreasing_ok ? 1.0 : 0.0});
  }
  return rows;
}

inline std::vector<CsvRow> moment_rows(const RunResult& result) {
  std::vector<CsvRow> rows;
  append_cell_rows(result.cells, rows);
  for (const MomentRecord& r : result.moments) {
    rows.push_back(CsvRow{r.n, -1, r.functional + "_mean", r.estimate});
    rows.push_back(CsvRow{r.n, -1, r.functional + "_se", r.se});
    rows.push_back(CsvRow{r.n, -1, r.functional + "_target", r.target});
    rows.push_back(CsvRow{r.n, -1, r.functional + "_ratio", r.ratio});
  }
  return rows;
}

inline std::vector<CsvRow> extreme_rows(const RunResult& result) {
  std::vector<CsvRow> rows;
  for (const CellMetrics& c : result.cells) {
    if (std::isfinite(c.zmax)) rows.push_back(CsvRow{c.n, c.rep, "zmax", c.zmax});
  }
  for (const ExtremeRecord& r : result.extremes) {
    rows.push_back(CsvRow{r.n, -1, "z_mean", r.z_mean});
    rows.push_back(CsvRow{r.n, -1, "z_se", r.z_se});
    rows.push_back(CsvRow{r.n, -1, "z2_mean", r.z2_mean});
    rows.push_back(CsvRow{r.n, -1, "z4_mean", r.z4_mean});
    rows.push_back(CsvRow{r.n, -1, "z4_se", r.z4_se});
    if (std::isfinite(r.oracle_mean)) {
      rows.push_back(CsvRow{r.n, -1, "oracle_mean", r.oracle_mean});
      rows.push_back(CsvRow{r.n, -1, "oracle_sd", r.oracle_sd});
      rows.push_back(CsvRow{r.n, -1, "oracle_m4", r.oracle_m4});
    }
  }
  return rows;
}

inline void write_profile_csv(const std::string& path,
                              const SupportProfile& profile) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const int d = profile.grid.dim();
  out << "index";
  for (int c = 0; c < d; ++c) out << ",dir_" << c;
  out << ",value\n";
  for (int j = 0; j < profile.grid.count(); ++j) {
    out << j;
    for (int c = 0; c < d; ++c) out << ',' << format_double(profile.grid.at(j, c));
    out << ',' << format_double(profile.values[static_cast<std::size_t>(j)]) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_polygon_csv(const std::string& path, const Polygon2D& poly) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "index,x,y\n";
  for (std::size_t i = 0; i < poly.vertices.size(); ++i) {
    out << i << ',' << format_double(poly.vertices[i].x) << ','
        << format_double(poly.vertices[i].y) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_manifest(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

// --- key=value config files -------------------------------------------------

using ConfigMap = std::vector<std::pair<std::string, std::string>>;

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Lines of key=value; blank lines and '#' comments ignored.
inline ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  ConfigMap entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key=value");
    }
    entries.emplace_back(trim(stripped.substr(0, eq)),
                         trim(stripped.substr(eq + 1)));
  }
  return entries;
}

inline std::vector<long long> parse_schedule(const std::string& text) {
  std::vector<long long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    const long long v = std::stoll(item, &used);
    if (used != item.size() || v < 2) {
      throw std::invalid_argument("bad n-schedule entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty n-schedule");
  return out;
}

inline std::vector<double> parse_vector(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) {
      throw std::invalid_argument("bad vector entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty vector");
  return out;
}

// Applies config entries onto an ExperimentConfig.  theta_out receives the
// optional extremes direction.  Unknown keys are usage errors.
inline void apply_config(const ConfigMap& entries, ExperimentConfig& cfg,
                         std::vector<double>* theta_out) {
  for (const auto& [key, value] : entries) {
    try {
      if (key == "model") {
        cfg.model = value;
      } else if (key == "dim") {
        cfg.dim = std::stoi(value);
      } else if (key == "k" || key == "grid_points") {
        cfg.grid_points = std::stoi(value);
      } else if (key == "dirs" || key == "directions") {
        cfg.directions = std::stoi(value);
      } else if (key == "n_schedule") {
        cfg.n_schedule = parse_schedule(value);
      } else if (key == "reps" || key == "replications") {
        cfg.replications = std::stoi(value);
      } else if (key == "seed" || key == "master_seed") {
        cfg.master_seed = std::stoull(value);
      } else if (key == "threads") {
        cfg.threads = std::stoi(value);
      } else if (key == "chunk") {
        cfg.chunk_paths = std::stoll(value);
      } else if (key == "two_resolution") {
        cfg.two_resolution = value == "1" || value == "true";
      } else if (key == "theta") {
        if (theta_out) *theta_out = parse_vector(value);
      } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad value for '" + key + "'");
    }
  }
}

inline nlohmann::json config_json(const ExperimentConfig& cfg) {
  return nlohmann::json{{"model", cfg.model},
                        {"dim", cfg.dim},
                        {"grid_points", cfg.grid_points},
                        {"directions", cfg.directions},
                        {"n_schedule", cfg.n_schedule},
                        {"replications", cfg.replications},
                        {"master_seed", cfg.master_seed},
                        {"threads", cfg.threads},
                        {"chunk_paths", cfg.chunk_paths},
                        {"two_resolution", cfg.two_resolution}};
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.model = j.at("model").get<std::string>();
  cfg.dim = j.at("dim").get<int>();
  cfg.grid_points = j.at("grid_points").get<int>();
  cfg.directions = j.at("directions").get<int>();
  cfg.n_schedule = j.at("n_schedule").get<std::vector<long long>>();
  cfg.replications = j.at("replications").get<int>();
  cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  cfg.threads = j.at("threads").get<int>();
  cfg.chunk_paths = j.at("chunk_paths").get<long long>();
  cfg.two_resolution = j.at("two_resolution").get<bool>();
  return cfg;
}

}  // namespace hullshape
