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

// Command line front end.
//
// Exit codes: 0 run completed and in-run sanity invariants held, 1 numerical
// failure or sanity violation, 2 usage error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hullshape/experiments.hpp"
#include "hullshape/io.hpp"
#include "hullshape/version.hpp"

namespace fs = std::filesystem;
using namespace hullshape;

namespace {

struct CommonOpts {
  std::optional<std::string> model;
  std::optional<int> dim;
  std::optional<int> grid_points;
  std::optional<int> directions;
  std::optional<std::string> schedule;
  std::optional<int> replications;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<long long> chunk;
  bool two_resolution = false;
  std::optional<std::string> config_path;
  std::string out_dir = "out";
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--model", o.model,
                  "Model spec: bm | fbm:H=<h> | fbb:H=<h> | singleton:var=<v>");
  sub->add_option("--dim", o.dim, "Ambient dimension (1, 2 or 3)");
  sub->add_option("--k", o.grid_points, "Time grid resolution");
  sub->add_option("--dirs", o.directions, "Direction grid resolution");
  sub->add_option("--n-schedule", o.schedule, "Comma separated sample sizes");
  sub->add_option("--reps", o.replications,
                  "Replications per n (0 = defaults: 32, or 8 above n=1e4)");
  sub->add_option("--seed", o.seed, "Master seed");
  sub->add_option("--threads", o.threads,
                  "Worker threads (0 = HULLSHAPE_THREADS or hardware)");
  sub->add_option("--chunk", o.chunk, "Paths per sampling chunk");
  sub->add_flag("--two-resolution", o.two_resolution,
                "Rerun on a doubled time grid and report the shift");
  sub->add_option("--config", o.config_path, "key=value config file");
  sub->add_option("--out", o.out_dir, "Output directory");
}

// Config file first, then explicit flags on top.
ExperimentConfig merge(const CommonOpts& o, std::vector<double>* theta) {
  ExperimentConfig cfg;
  if (o.config_path) apply_config(parse_config_file(*o.config_path), cfg, theta);
  if (o.model) cfg.model = *o.model;
  if (o.dim) cfg.dim = *o.dim;
  if (o.grid_points) cfg.grid_points = *o.grid_points;
  if (o.directions) cfg.directions = *o.directions;
  if (o.schedule) cfg.n_schedule = parse_schedule(*o.schedule);
  if (o.replications) cfg.replications = *o.replications;
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.chunk) cfg.chunk_paths = *o.chunk;
  if (o.two_resolution) cfg.two_resolution = true;
  return cfg;
}

nlohmann::json base_manifest(const std::string& command,
                             const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["tool"] = kVersion;
  j["command"] = command;
  j["config"] = config_json(cfg);
  return j;
}

void finish_manifest(nlohmann::json& j, const fs::path& dir,
                     const std::vector<std::string>& outputs,
                     const RunResult* result) {
  j["outputs"] = outputs;
  if (result) {
    j["sigma_limit"] = result->sigma_limit;
    j["wall_seconds"] = result->wall_seconds;
    j["sanity_violations"] = result->sanity_violations;
  }
  write_manifest((dir / "manifest.json").string(), j);
}

int finish_run(const RunResult& result) {
  for (const std::string& v : result.sanity_violations) {
    std::cerr << "sanity violation: " << v << "\n";
  }
  return result.sanity_violations.empty() ? 0 : 1;
}

int cmd_converge(const CommonOpts& opts, const std::string& command) {
  const ExperimentConfig cfg = merge(opts, nullptr);
  const fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  const bool rate = command == "rate";
  const RunResult result = rate ? run_rate_diagnostic(cfg) : run_convergence(cfg);
  const std::string csv_name = rate ? "rate.csv" : "convergence.csv";
  write_long_csv((dir / csv_name).string(), convergence_rows(result));
  nlohmann::json manifest = base_manifest(command, cfg);
  finish_manifest(manifest, dir, {csv_name}, &result);

  std::cout << "n        mean_rho     se_rho       rate\n";
  for (const ConvergenceRecord& r : result.convergence) {
    std::cout << r.n << (r.n < 10000000 ? "\t" : " ") << format_double(r.mean_rho)
              << '\t' << format_double(r.se_rho) << '\t' << format_double(r.rate);
    if (std::isfinite(r.shift_two_res)) {
      std::cout << "\tshift_2k=" << format_double(r.shift_two_res);
    }
    if (r.divergence_flag) std::cout << "\tDIVERGING";
    std::cout << '\n';
  }
  return finish_run(result);
}

int cmd_moments(const CommonOpts& opts) {
  const ExperimentConfig cfg = merge(opts, nullptr);
  const fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  const RunResult result = run_moments(cfg);
  write_long_csv((dir / "moments.csv").string(), moment_rows(result));
  nlohmann::json manifest = base_manifest("moments", cfg);
  finish_manifest(manifest, dir, {"moments.csv"}, &result);

  std::cout << "n        functional   estimate     target       ratio\n";
  for (const MomentRecord& r : result.moments) {
    std::cout << r.n << '\t' << r.functional << '\t' << format_double(r.estimate)
              << '\t' << format_double(r.target) << '\t' << format_double(r.ratio)
              << '\n';
  }
  return finish_run(result);
}

int cmd_extremes(const CommonOpts& opts, const std::string& theta_arg) {
  std::vector<double> theta;
  ExperimentConfig cfg = merge(opts, &theta);
  if (!theta_arg.empty()) theta = parse_vector(theta_arg);
  if (theta.empty()) {
    theta.assign(static_cast<std::size_t>(cfg.dim), 0.0);
    theta[0] = 1.0;
  }
  const fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  const RunResult result = run_extremes(cfg, theta);
  write_long_csv((dir / "extremes.csv").string(), extreme_rows(result));
  nlohmann::json manifest = base_manifest("extremes", cfg);
  manifest["theta"] = theta;
  finish_manifest(manifest, dir, {"extremes.csv"}, &result);

  std::cout << "n        z_mean       z_se         oracle_mean\n";
  for (const ExtremeRecord& r : result.extremes) {
    std::cout << r.n << '\t' << format_double(r.z_mean) << '\t'
              << format_double(r.z_se) << '\t' << format_double(r.oracle_mean)
              << '\n';
  }
  return finish_run(result);
}

int cmd_simulate(const CommonOpts& opts, long long n) {
  const ExperimentConfig cfg = merge(opts, nullptr);
  const fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  const HullRun run = run_hull(cfg, n);
  std::vector<std::string> outputs = {"profile.csv"};
  write_profile_csv((dir / "profile.csv").string(), run.scaled_profile);
  if (cfg.dim == 2) {
    write_polygon_csv((dir / "hull.csv").string(), run.hull);
    outputs.push_back("hull.csv");
  }
  nlohmann::json manifest = base_manifest("simulate", cfg);
  manifest["n"] = n;
  finish_manifest(manifest, dir, outputs, nullptr);
  std::cout << "n=" << n << " scale=" << format_double(run.a_n)
            << " sigma=" << format_double(run.sigma_limit)
            << " hull_vertices=" << run.hull.vertices.size() << '\n';
  return 0;
}

int cmd_limit_shape(const CommonOpts& opts) {
  const ExperimentConfig cfg = merge(opts, nullptr);
  const fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  const CovarianceModel model = parse_model(cfg.model, cfg.dim);
  const TimeGrid grid = TimeGrid::uniform(cfg.grid_points);
  DirectionGrid directions =
      cfg.dim == 1 ? DirectionGrid::line()
                   : (cfg.dim == 2 ? DirectionGrid::circle(cfg.directions)
                                   : DirectionGrid::sphere(cfg.directions));
  const LimitShape shape = limit_shape(model, grid, directions);
  write_profile_csv((dir / "profile.csv").string(), shape.profile);
  nlohmann::json manifest = base_manifest("limit-shape", cfg);
  manifest["closed_form"] = shape.closed_form;
  finish_manifest(manifest, dir, {"profile.csv"}, nullptr);
  std::cout << "model=" << shape.model_name
            << " provenance=" << (shape.closed_form ? "closed-form" : "numeric")
            << " sigma=" << format_double(shape.profile.values.front()) << '\n';
  return 0;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return sa.str() == sb.str();
}

// Re-runs the experiment recorded in a manifest and byte-compares every
// listed output against the originals next to the manifest.
int cmd_repro(const std::string& manifest_path, std::string out_dir) {
  std::ifstream in(manifest_path);
  if (!in) throw std::invalid_argument("repro: cannot open " + manifest_path);
  nlohmann::json manifest;
  in >> manifest;

  const fs::path src_dir = fs::path(manifest_path).parent_path();
  if (out_dir.empty()) out_dir = (src_dir / "repro").string();

  CommonOpts opts;
  opts.out_dir = out_dir;
  const ExperimentConfig cfg = config_from_json(manifest.at("config"));
  const std::string command = manifest.at("command").get<std::string>();

  // Rebuild the CommonOpts view of the stored config.
  opts.model = cfg.model;
  opts.dim = cfg.dim;
  opts.grid_points = cfg.grid_points;
  opts.directions = cfg.directions;
  opts.replications = cfg.replications;
  opts.seed = cfg.master_seed;
  opts.threads = cfg.threads;
  opts.chunk = cfg.chunk_paths;
  opts.two_resolution = cfg.two_resolution;
  {
    std::string sched;
    for (std::size_t i = 0; i < cfg.n_schedule.size(); ++i) {
      if (i) sched += ',';
      sched += std::to_string(cfg.n_schedule[i]);
    }
    opts.schedule = sched;
  }

  int rc = 0;
  if (command == "converge" || command == "rate") {
    rc = cmd_converge(opts, command);
  } else if (command == "moments") {
    rc = cmd_moments(opts);
  } else if (command == "extremes") {
    std::string theta;
    for (double c : manifest.at("theta").get<std::vector<double>>()) {
      if (!theta.empty()) theta += ',';
      theta += format_double(c);
    }
    rc = cmd_extremes(opts, theta);
  } else if (command == "simulate") {
    rc = cmd_simulate(opts, manifest.at("n").get<long long>());
  } else if (command == "limit-shape") {
    rc = cmd_limit_shape(opts);
  } else {
    throw std::invalid_argument("repro: unknown command '" + command + "'");
  }
  if (rc != 0) return rc;

  bool all_match = true;
  for (const std::string& name :
       manifest.at("outputs").get<std::vector<std::string>>()) {
    const bool ok = same_bytes(src_dir / name, fs::path(out_dir) / name);
    std::cout << (ok ? "MATCH " : "DIFF  ") << name << '\n';
    all_match = all_match && ok;
  }
  std::cout << (all_match ? "reproduction OK" : "reproduction FAILED") << '\n';
  return all_match ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex hulls of pooled Gaussian paths and their limit shape"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts opts;
  long long sim_n = 1000;
  std::string theta_arg;
  std::string manifest_path;
  std::string repro_out;

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Sample one pooled cloud and write its scaled hull");
  add_common(simulate, opts);
  simulate->add_option("--n", sim_n, "Number of paths");

  CLI::App* limit = app.add_subcommand(
      "limit-shape", "Write the limit shape support profile");
  add_common(limit, opts);

  CLI::App* converge = app.add_subcommand(
      "converge", "Hausdorff convergence across the n-schedule");
  add_common(converge, opts);

  CLI::App* moments = app.add_subcommand(
      "moments", "Expected functionals of the scaled hull vs limits");
  add_common(moments, opts);

  CLI::App* extremes = app.add_subcommand(
      "extremes", "Directional maxima vs exact finite-n laws");
  add_common(extremes, opts);
  extremes->add_option("--theta", theta_arg, "Comma separated unit direction");

  CLI::App* rate = app.add_subcommand(
      "rate", "Convergence run plus scaled-gap rate diagnostic");
  add_common(rate, opts);

  CLI::App* repro = app.add_subcommand(
      "repro", "Re-run a manifest and verify outputs are byte-identical");
  repro->add_option("--manifest", manifest_path, "Path to manifest.json")
      ->required();
  repro->add_option("--out", repro_out, "Scratch output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opts, sim_n);
    if (limit->parsed()) return cmd_limit_shape(opts);
    if (converge->parsed()) return cmd_converge(opts, "converge");
    if (moments->parsed()) return cmd_moments(opts);
    if (extremes->parsed()) return cmd_extremes(opts, theta_arg);
    if (rate->parsed()) return cmd_converge(opts, "rate");
    if (repro->parsed()) return cmd_repro(manifest_path, repro_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
