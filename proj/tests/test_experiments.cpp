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

#include "hullshape/experiments.hpp"

#include <cmath>
#include <cstdlib>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

using namespace hullshape;
using Catch::Approx;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.model = "bm";
  cfg.dim = 2;
  cfg.grid_points = 128;
  cfg.directions = 64;
  cfg.n_schedule = {100, 400};
  cfg.replications = 3;
  cfg.master_seed = 42;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

TEST_CASE("convergence run produces well-formed records", "[experiments]") {
  const RunResult result = run_convergence(small_config());
  REQUIRE(result.cells.size() == 6);
  REQUIRE(result.convergence.size() == 2);
  REQUIRE(result.sanity_violations.empty());
  REQUIRE(result.sigma_limit == Approx(1.0));
  for (const ConvergenceRecord& rec : result.convergence) {
    REQUIRE(rec.reps == 3);
    REQUIRE(std::isfinite(rec.mean_rho));
    REQUIRE(rec.mean_rho > 0.0);
    REQUIRE(rec.se_rho >= 0.0);
    REQUIRE(rec.mesh_delta == Approx(std::numbers::pi / 64.0));
    REQUIRE(rec.mesh_error_bound > 0.0);
    REQUIRE(rec.rate ==
            Approx(rec.mean_rho * std::sqrt(std::log(static_cast<double>(rec.n)))));
  }
  for (const CellMetrics& c : result.cells) {
    REQUIRE(std::isfinite(c.rho));
    REQUIRE(c.vmax >= c.vmin);
    REQUIRE(c.perimeter > 0.0);
    REQUIRE(c.area > 0.0);
    REQUIRE(c.diameter > 0.0);
  }
}

TEST_CASE("results are identical across thread counts", "[experiments]") {
  ExperimentConfig cfg = small_config();
  cfg.threads = 1;
  const RunResult a = run_convergence(cfg);
  cfg.threads = 3;
  const RunResult b = run_convergence(cfg);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    REQUIRE(a.cells[i].rho == b.cells[i].rho);
    REQUIRE(a.cells[i].perimeter == b.cells[i].perimeter);
  }
  for (std::size_t i = 0; i < a.convergence.size(); ++i) {
    REQUIRE(a.convergence[i].mean_rho == b.convergence[i].mean_rho);
  }
}

TEST_CASE("different master seeds give different samples", "[experiments]") {
  ExperimentConfig cfg = small_config();
  const RunResult a = run_convergence(cfg);
  cfg.master_seed = 43;
  const RunResult b = run_convergence(cfg);
  REQUIRE(a.convergence[0].mean_rho != b.convergence[0].mean_rho);
}

TEST_CASE("two-resolution mode reports a shift", "[experiments]") {
  ExperimentConfig cfg = small_config();
  cfg.n_schedule = {100};
  cfg.two_resolution = true;
  const RunResult result = run_convergence(cfg);
  REQUIRE(std::isfinite(result.convergence[0].shift_two_res));
  REQUIRE(result.convergence[0].shift_two_res >= 0.0);
}

TEST_CASE("replication defaults depend on n", "[experiments]") {
  REQUIRE(default_replications(100) == 32);
  REQUIRE(default_replications(10000) == 32);
  REQUIRE(default_replications(100000) == 8);
  ExperimentConfig cfg = small_config();
  cfg.replications = 0;
  cfg.n_schedule = {100, 100000};
  const auto jobs = detail::make_jobs(cfg, false);
  int small = 0, large = 0;
  for (const auto& j : jobs) (j.n == 100 ? small : large)++;
  REQUIRE(small == 32);
  REQUIRE(large == 8);
}

TEST_CASE("cell stream ids are unique across the lattice", "[experiments]") {
  std::set<std::uint64_t> seen;
  for (int ni = 0; ni < 8; ++ni) {
    for (int rep = 0; rep < 64; ++rep) {
      for (bool fine : {false, true}) {
        REQUIRE(seen.insert(cell_stream_id(ni, rep, fine)).second);
      }
    }
  }
}

TEST_CASE("singleton extremes match the exact normal-max law", "[experiments]") {
  // Constant paths make the directional maximum exactly the max of n i.i.d.
  // N(0,1): no discretisation error at all.
  ExperimentConfig cfg;
  cfg.model = "singleton:var=1";
  cfg.dim = 1;
  cfg.grid_points = 4;
  cfg.n_schedule = {1000};
  cfg.replications = 32;
  cfg.master_seed = 7;
  cfg.threads = 1;
  const RunResult result = run_extremes(cfg, {1.0});
  const ExtremeRecord& rec = result.extremes[0];
  REQUIRE(rec.oracle_mean == Approx(0.872075).margin(5e-6));
  REQUIRE(std::fabs(rec.z_mean - rec.oracle_mean) <= 4.0 * rec.z_se);
}

TEST_CASE("brownian extremes approach the |N| law", "[experiments]") {
  ExperimentConfig cfg;
  cfg.model = "bm";
  cfg.dim = 1;
  cfg.grid_points = 256;
  cfg.n_schedule = {500};
  cfg.replications = 48;
  cfg.master_seed = 11;
  cfg.threads = 1;
  const RunResult result = run_extremes(cfg, {1.0});
  const ExtremeRecord& rec = result.extremes[0];
  REQUIRE(std::isfinite(rec.oracle_mean));
  // Grid discretisation biases the observed maximum down slightly; the
  // tolerance allows 4 SE plus that deficit.
  REQUIRE(rec.z_mean <= rec.oracle_mean + 4.0 * rec.z_se);
  REQUIRE(rec.z_mean >= rec.oracle_mean - 4.0 * rec.z_se - 0.02);
}

TEST_CASE("extremes validates theta", "[experiments]") {
  ExperimentConfig cfg = small_config();
  REQUIRE_THROWS_AS(run_extremes(cfg, {1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(run_extremes(cfg, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("moments run matches targets qualitatively", "[experiments]") {
  ExperimentConfig cfg;
  cfg.model = "singleton:var=1";
  cfg.dim = 2;
  cfg.grid_points = 4;
  cfg.directions = 64;
  cfg.n_schedule = {2000};
  cfg.replications = 4;
  cfg.master_seed = 5;
  cfg.threads = 1;
  const RunResult result = run_moments(cfg);
  REQUIRE(result.moments.size() == 3);
  for (const MomentRecord& rec : result.moments) {
    REQUIRE(std::isfinite(rec.estimate));
    REQUIRE(rec.ratio == Approx(rec.estimate / rec.target));
    REQUIRE(rec.ratio > 0.5);
    REQUIRE(rec.ratio < 1.0);  // scaled hulls approach the limit from inside
    if (rec.functional == "perimeter") {
      REQUIRE(rec.target == Approx(2.0 * std::numbers::pi));
      REQUIRE(rec.degree == 1);
    } else if (rec.functional == "area") {
      REQUIRE(rec.target == Approx(std::numbers::pi));
      REQUIRE(rec.degree == 2);
    } else {
      REQUIRE(rec.target == Approx(2.0));
      REQUIRE(rec.degree == 1);
    }
  }
  REQUIRE_THROWS_AS(run_moments([] {
                      ExperimentConfig c = small_config();
                      c.dim = 1;
                      return c;
                    }()),
                    std::invalid_argument);
}

TEST_CASE("rate diagnostic extends convergence records", "[experiments]") {
  const RunResult result = run_rate_diagnostic(small_config());
  REQUIRE(result.rates.size() == 2);
  REQUIRE(result.rates[0].nonincreasing_ok);  // first point is unconstrained
  for (std::size_t i = 0; i < result.rates.size(); ++i) {
    REQUIRE(result.rates[i].rate == Approx(result.convergence[i].rate));
  }
}

TEST_CASE("run_hull returns a scaled hull and profile", "[experiments]") {
  ExperimentConfig cfg = small_config();
  const HullRun a = run_hull(cfg, 500);
  REQUIRE(a.hull.vertices.size() >= 3);
  REQUIRE(a.scaled_profile.values.size() == 64);
  for (double v : a.scaled_profile.values) REQUIRE(std::isfinite(v));
  REQUIRE(a.a_n == Approx(std::sqrt(2.0 * std::log(500.0))));
  REQUIRE(a.sigma_limit == Approx(1.0));
  const HullRun b = run_hull(cfg, 500);
  REQUIRE(a.scaled_profile.values == b.scaled_profile.values);
  REQUIRE_THROWS_AS(run_hull(cfg, 1), std::invalid_argument);
}

TEST_CASE("one-dimensional cells use the line profile", "[experiments]") {
  ExperimentConfig cfg;
  cfg.model = "bm";
  cfg.dim = 1;
  cfg.grid_points = 64;
  cfg.n_schedule = {200};
  cfg.replications = 2;
  cfg.master_seed = 3;
  cfg.threads = 1;
  const RunResult result = run_convergence(cfg);
  REQUIRE(result.convergence.size() == 1);
  REQUIRE(std::isfinite(result.convergence[0].mean_rho));
  // Functionals are planar-only.
  for (const CellMetrics& c : result.cells) {
    REQUIRE_FALSE(std::isfinite(c.perimeter));
  }
}

TEST_CASE("configuration validation", "[experiments]") {
  ExperimentConfig cfg = small_config();
  cfg.dim = 4;
  REQUIRE_THROWS_AS(run_convergence(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.n_schedule = {1};
  REQUIRE_THROWS_AS(run_convergence(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.model = "nope";
  REQUIRE_THROWS_AS(run_convergence(cfg), std::invalid_argument);
}

TEST_CASE("thread resolution honours the environment", "[experiments]") {
  REQUIRE(resolve_threads(5) == 5);
  ::setenv("HULLSHAPE_THREADS", "3", 1);
  REQUIRE(resolve_threads(0) == 3);
  REQUIRE(resolve_threads(2) == 2);  // explicit beats environment
  ::unsetenv("HULLSHAPE_THREADS");
  REQUIRE(resolve_threads(0) >= 1);
}
