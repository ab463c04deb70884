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

// Experiment drivers: replicated hull construction across an n-schedule with
// Hausdorff, functional-moment, extreme-value and rate diagnostics.
//
// Reproducibility contract: every (n-index, replication) cell owns the
// stream (master_seed, stream_id) with stream_id packing the cell indices,
// cells are executed by a pool but folded in cell order, so all outputs are
// byte-identical for a fixed master seed regardless of thread count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hullshape/covariance.hpp"
#include "hullshape/extreme_oracle.hpp"
#include "hullshape/geometry.hpp"
#include "hullshape/limit_shape.hpp"
#include "hullshape/rng.hpp"
#include "hullshape/sampling.hpp"
#include "hullshape/time_grid.hpp"

namespace hullshape {

struct ExperimentConfig {
  std::string model = "bm";
  int dim = 2;
  int grid_points = 512;                      // time grid resolution k
  int directions = 360;                       // direction grid resolution q
  std::vector<long long> n_schedule = {100, 1000, 10000};
  int replications = 0;                       // 0: defaults per n (32, 8 above 1e4)
  std::uint64_t master_seed = 0;
  int threads = 0;                            // 0: HULLSHAPE_THREADS, then hardware
  long long chunk_paths = 512;
  bool two_resolution = false;                // rerun on 2k grid, report shift
  bool keep_profiles = false;                 // retain per-cell scaled profiles
};

inline int default_replications(long long n) { return n <= 10000 ? 32 : 8; }

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HULLSHAPE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Cell stream ids: n-index in the high word, replication in the low word,
// top bit reserved for the doubled-resolution rerun.
inline std::uint64_t cell_stream_id(int n_index, int rep, bool fine_grid) {
  return (static_cast<std::uint64_t>(n_index) << 32) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(rep)) |
         (fine_grid ? (1ULL << 63) : 0ULL);
}

struct CellMetrics {
  long long n = 0;
  int rep = 0;
  double rho = std::numeric_limits<double>::quiet_NaN();
  double perimeter = std::numeric_limits<double>::quiet_NaN();
  double area = std::numeric_limits<double>::quiet_NaN();
  double diameter = std::numeric_limits<double>::quiet_NaN();
  double vmin = std::numeric_limits<double>::quiet_NaN();
  double vmax = std::numeric_limits<double>::quiet_NaN();
  double zmax = std::numeric_limits<double>::quiet_NaN();
  double mesh_bound = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> scaled_profile;
  Polygon2D scaled_hull;  // retained when keep_profiles and dim = 2
  bool sanity_ok = true;
  std::string sanity_msg;
};

struct ConvergenceRecord {
  long long n = 0;
  int reps = 0;
  double mean_rho = 0.0;
  double se_rho = 0.0;
  double rate = 0.0;  // sqrt(ln n) * mean_rho
  double mesh_delta = 0.0;
  double mesh_error_bound = 0.0;
  bool divergence_flag = false;
  double shift_two_res = std::numeric_limits<double>::quiet_NaN();
};

struct MomentRecord {
  long long n = 0;
  int reps = 0;
  std::string functional;  // perimeter | area | diameter
  int degree = 1;          // homogeneity degree of the functional
  double estimate = 0.0;
  double se = 0.0;
  double target = 0.0;     // value on the limit shape
  double ratio = 0.0;      // estimate / target
};

struct ExtremeRecord {
  long long n = 0;
  int reps = 0;
  double z_mean = 0.0;
  double z_se = 0.0;
  double z2_mean = 0.0;
  double z4_mean = 0.0;
  double z4_se = 0.0;
  double oracle_mean = std::numeric_limits<double>::quiet_NaN();
  double oracle_sd = std::numeric_limits<double>::quiet_NaN();
  double oracle_m4 = std::numeric_limits<double>::quiet_NaN();
};

struct RateRecord {
  long long n = 0;
  double rate = 0.0;
  double se_rate = 0.0;
  bool nonincreasing_ok = true;  // vs previous point, within pooled SE
};

struct RunResult {
  std::vector<CellMetrics> cells;
  std::vector<ConvergenceRecord> convergence;
  std::vector<MomentRecord> moments;
  std::vector<ExtremeRecord> extremes;
  std::vector<RateRecord> rates;
  std::vector<std::string> sanity_violations;
  double sigma_limit = 0.0;
  double wall_seconds = 0.0;
};

namespace detail {

template <class Fn>
void parallel_for(int tasks, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, tasks);
  if (threads == 1) {
    for (int i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < tasks; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  const auto m = static_cast<double>(xs.size());
  for (double x : xs) r.mean += x;
  r.mean /= m;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.se = std::sqrt(ss / (m - 1.0) / m);
  }
  return r;
}

struct CellJob {
  long long n = 0;
  int n_index = 0;
  int rep = 0;
  bool fine_grid = false;
};

// One replication: stream the paths, maintain hull or support profile,
// evaluate metrics of the hull scaled by 1 / sqrt(2 ln n).
inline CellMetrics run_cell(const CovarianceModel& model, const TimeGrid& grid,
                            const CovFactor& factor,
                            const DirectionGrid& directions,
                            const SupportProfile& limit_profile,
                            const ExperimentConfig& cfg, const CellJob& job,
                            const std::vector<double>* theta,
                            bool check_scaling_identity) {
  CellMetrics out;
  out.n = job.n;
  out.rep = job.rep;
  const int d = model.dim();
  const int k = grid.size();
  const double a_n = std::sqrt(2.0 * std::log(static_cast<double>(job.n)));
  const SeedSpec seed{cfg.master_seed,
                      cell_stream_id(job.n_index, job.rep, job.fine_grid)};

  const bool planar = d == 2;
  IncrementalHull2D hull;
  std::optional<IncrementalSupport> running_support;
  if (!planar) running_support.emplace(directions);
  double zmax = -std::numeric_limits<double>::infinity();

  std::vector<Vec2> chunk_pts;
  std::vector<double> chunk_flat;
  sample_path_chunks(
      model, grid, factor, job.n, seed, cfg.chunk_paths,
      [&](const Eigen::Ref<const Eigen::MatrixXd>& cols, long long, long long m) {
        if (theta) {
          for (long long p = 0; p < m; ++p) {
            for (int j = 0; j < k; ++j) {
              double s = 0.0;
              for (int c = 0; c < d; ++c) s += cols(j, p * d + c) * (*theta)[static_cast<std::size_t>(c)];
              zmax = std::max(zmax, s);
            }
          }
        }
        if (planar) {
          chunk_pts.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(k));
          for (long long p = 0; p < m; ++p) {
            const auto x = cols.col(p * d);
            const auto y = cols.col(p * d + 1);
            Vec2* dst = chunk_pts.data() + static_cast<std::size_t>(p) * k;
            for (int j = 0; j < k; ++j) dst[static_cast<std::size_t>(j)] = Vec2{x(j), y(j)};
          }
          hull.add(chunk_pts);
        } else {
          chunk_flat.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(k) *
                            static_cast<std::size_t>(d));
          for (long long p = 0; p < m; ++p) {
            for (int j = 0; j < k; ++j) {
              for (int c = 0; c < d; ++c) {
                chunk_flat[(static_cast<std::size_t>(p) * k + static_cast<std::size_t>(j)) * d +
                           static_cast<std::size_t>(c)] = cols(j, p * d + c);
              }
            }
          }
          running_support->add(chunk_flat);
        }
      });

  if (theta) out.zmax = zmax / a_n;

  SupportProfile scaled_profile = constant_profile(directions, 0.0);
  if (planar) {
    const Polygon2D scaled = scale(hull.hull(), 1.0 / a_n);
    scaled_profile = support_of_polygon(scaled, directions);
    out.perimeter = perimeter(scaled);
    out.area = area(scaled);
    out.diameter = diameter(scaled);

    // In-run sanity: Cauchy's formula against the polygon perimeter.
    if (scaled.vertices.size() >= 3) {
      const double cauchy = perimeter_from_profile(scaled_profile);
      if (std::fabs(cauchy / out.perimeter - 1.0) > 0.005) {
        out.sanity_ok = false;
        out.sanity_msg = "perimeter sandwich violated: cauchy=" +
                         std::to_string(cauchy) +
                         " polygon=" + std::to_string(out.perimeter);
      }
    }
    if (check_scaling_identity && out.sanity_ok) {
      // Hull of the doubled vertex cloud must match the doubled profile.
      const Polygon2D doubled = hull_2d(scale(scaled, 2.0).vertices);
      const SupportProfile doubled_profile = support_of_polygon(doubled, directions);
      const SupportProfile expected = scale(scaled_profile, 2.0);
      double worst = 0.0, ref = 1.0;
      for (std::size_t j = 0; j < expected.values.size(); ++j) {
        worst = std::max(worst, std::fabs(doubled_profile.values[j] - expected.values[j]));
        ref = std::max(ref, std::fabs(expected.values[j]));
      }
      if (worst > 1e-12 * ref) {
        out.sanity_ok = false;
        out.sanity_msg = "scaling identity violated: worst=" + std::to_string(worst);
      }
    }
    if (cfg.keep_profiles) out.scaled_hull = scaled;
  } else {
    scaled_profile = scale(running_support->profile(), 1.0 / a_n);
  }

  const HausdorffResult h = hausdorff(scaled_profile, limit_profile);
  out.rho = h.distance;
  out.mesh_bound = h.mesh_error_bound;
  out.vmin = *std::min_element(scaled_profile.values.begin(), scaled_profile.values.end());
  out.vmax = *std::max_element(scaled_profile.values.begin(), scaled_profile.values.end());
  if (!std::isfinite(out.rho) || !std::isfinite(out.vmax)) {
    out.sanity_ok = false;
    out.sanity_msg = "non-finite profile";
  }
  if (cfg.keep_profiles) out.scaled_profile = std::move(scaled_profile.values);
  return out;
}

struct RunContext {
  CovarianceModel model;
  TimeGrid grid;
  CovFactor factor;
  DirectionGrid directions;
  SupportProfile limit_profile;
  double sigma_limit = 0.0;
};

inline DirectionGrid make_directions(int dim, int q) {
  if (dim == 1) return DirectionGrid::line();
  if (dim == 2) return DirectionGrid::circle(q);
  if (dim == 3) return DirectionGrid::sphere(std::max(q, 16));
  throw std::invalid_argument("experiments: dim must be 1, 2 or 3");
}

inline RunContext make_context(const ExperimentConfig& cfg, int grid_points) {
  CovarianceModel model = parse_model(cfg.model, cfg.dim);
  TimeGrid grid = TimeGrid::uniform(grid_points);
  CovFactor factor = factorize(model, grid);
  DirectionGrid directions = make_directions(cfg.dim, cfg.directions);
  LimitShape shape = limit_shape(model, grid, directions);
  const double sigma_limit =
      *std::max_element(shape.profile.values.begin(), shape.profile.values.end());
  return RunContext{std::move(model), std::move(grid), std::move(factor),
                    std::move(directions), std::move(shape.profile), sigma_limit};
}

inline std::vector<CellJob> make_jobs(const ExperimentConfig& cfg, bool fine) {
  std::vector<CellJob> jobs;
  for (int ni = 0; ni < static_cast<int>(cfg.n_schedule.size()); ++ni) {
    const long long n = cfg.n_schedule[static_cast<std::size_t>(ni)];
    if (n < 2) throw std::invalid_argument("experiments: n must be >= 2");
    const int reps = cfg.replications > 0 ? cfg.replications : default_replications(n);
    for (int r = 0; r < reps; ++r) jobs.push_back(CellJob{n, ni, r, fine});
  }
  return jobs;
}

inline std::vector<CellMetrics> execute(const RunContext& ctx,
                                        const ExperimentConfig& cfg,
                                        const std::vector<CellJob>& jobs,
                                        const std::vector<double>* theta) {
  std::vector<CellMetrics> cells(jobs.size());
  const int threads = resolve_threads(cfg.threads);
  parallel_for(static_cast<int>(jobs.size()), threads, [&](int i) {
    const CellJob& job = jobs[static_cast<std::size_t>(i)];
    const bool first_cell = job.n_index == 0 && job.rep == 0 && !job.fine_grid;
    cells[static_cast<std::size_t>(i)] =
        run_cell(ctx.model, ctx.grid, ctx.factor, ctx.directions,
                 ctx.limit_profile, cfg, job, theta, first_cell);
  });
  return cells;
}

inline void collect_sanity(const std::vector<CellMetrics>& cells,
                           std::vector<std::string>& violations) {
  for (const CellMetrics& c : cells) {
    if (!c.sanity_ok) {
      violations.push_back("n=" + std::to_string(c.n) + " rep=" +
                           std::to_string(c.rep) + ": " + c.sanity_msg);
    }
  }
}

inline std::vector<ConvergenceRecord> fold_convergence(
    const RunContext& ctx, const ExperimentConfig& cfg,
    const std::vector<CellMetrics>& cells) {
  std::vector<ConvergenceRecord> records;
  for (long long n : cfg.n_schedule) {
    std::vector<double> rhos;
    for (const CellMetrics& c : cells) {
      if (c.n == n) rhos.push_back(c.rho);
    }
    const MeanSe ms = mean_se(rhos);
    ConvergenceRecord rec;
    rec.n = n;
    rec.reps = static_cast<int>(rhos.size());
    rec.mean_rho = ms.mean;
    rec.se_rho = ms.se;
    rec.rate = ms.mean * std::sqrt(std::log(static_cast<double>(n)));
    rec.mesh_delta = ctx.directions.covering_radius();
    for (const CellMetrics& c : cells) {
      if (c.n == n && std::isfinite(c.mesh_bound)) {
        rec.mesh_error_bound = std::max(rec.mesh_error_bound, c.mesh_bound);
      }
    }
    if (!records.empty()) {
      const ConvergenceRecord& prev = records.back();
      rec.divergence_flag =
          rec.mean_rho > prev.mean_rho + 2.0 * std::hypot(rec.se_rho, prev.se_rho);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace detail

// Hausdorff convergence of scaled hulls to the limit shape across the
// n-schedule, with optional doubled-grid rerun.
inline RunResult run_convergence(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  const detail::RunContext ctx = detail::make_context(cfg, cfg.grid_points);
  const auto jobs = detail::make_jobs(cfg, false);
  result.cells = detail::execute(ctx, cfg, jobs, nullptr);
  detail::collect_sanity(result.cells, result.sanity_violations);
  result.convergence = detail::fold_convergence(ctx, cfg, result.cells);
  result.sigma_limit = ctx.sigma_limit;

  if (cfg.two_resolution) {
    const detail::RunContext fine = detail::make_context(cfg, 2 * cfg.grid_points);
    const auto fine_jobs = detail::make_jobs(cfg, true);
    const auto fine_cells = detail::execute(fine, cfg, fine_jobs, nullptr);
    const auto fine_records = detail::fold_convergence(fine, cfg, fine_cells);
    for (std::size_t i = 0; i < result.convergence.size(); ++i) {
      result.convergence[i].shift_two_res =
          std::fabs(result.convergence[i].mean_rho - fine_records[i].mean_rho);
    }
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// Expected homogeneous functionals of the scaled hull vs their limit values:
// perimeter 2 pi sigma (degree 1), area pi sigma^2 (degree 2), diameter
// 2 sigma (degree 1).  Planar only.
inline RunResult run_moments(const ExperimentConfig& cfg) {
  if (cfg.dim != 2) throw std::invalid_argument("moments: requires dim = 2");
  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  const detail::RunContext ctx = detail::make_context(cfg, cfg.grid_points);
  const auto jobs = detail::make_jobs(cfg, false);
  result.cells = detail::execute(ctx, cfg, jobs, nullptr);
  detail::collect_sanity(result.cells, result.sanity_violations);
  result.sigma_limit = ctx.sigma_limit;

  struct Functional {
    const char* name;
    int degree;
    double target;
    double CellMetrics::* field;
  };
  const double s = ctx.sigma_limit;
  const Functional functionals[] = {
      {"perimeter", 1, 2.0 * std::numbers::pi * s, &CellMetrics::perimeter},
      {"area", 2, std::numbers::pi * s * s, &CellMetrics::area},
      {"diameter", 1, 2.0 * s, &CellMetrics::diameter},
  };
  for (long long n : cfg.n_schedule) {
    for (const Functional& f : functionals) {
      std::vector<double> xs;
      for (const CellMetrics& c : result.cells) {
        if (c.n == n) xs.push_back(c.*(f.field));
      }
      const detail::MeanSe ms = detail::mean_se(xs);
      MomentRecord rec;
      rec.n = n;
      rec.reps = static_cast<int>(xs.size());
      rec.functional = f.name;
      rec.degree = f.degree;
      rec.estimate = ms.mean;
      rec.se = ms.se;
      rec.target = f.target;
      rec.ratio = ms.mean / f.target;
      result.moments.push_back(std::move(rec));
    }
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// Law of the scaled directional maximum Z_n = max_i sup_j <X_i(t_j), theta>
// / sqrt(2 ln n), against the exact finite-n oracle where one exists.
inline RunResult run_extremes(const ExperimentConfig& cfg,
                              const std::vector<double>& theta) {
  if (static_cast<int>(theta.size()) != cfg.dim) {
    throw std::invalid_argument("extremes: theta dimension mismatch");
  }
  double norm_sq = 0.0;
  for (double c : theta) norm_sq += c * c;
  if (std::fabs(norm_sq - 1.0) > 1e-9) {
    throw std::invalid_argument("extremes: theta must be a unit vector");
  }

  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  const detail::RunContext ctx = detail::make_context(cfg, cfg.grid_points);
  const auto jobs = detail::make_jobs(cfg, false);
  result.cells = detail::execute(ctx, cfg, jobs, &theta);
  detail::collect_sanity(result.cells, result.sanity_violations);
  result.sigma_limit = ctx.sigma_limit;

  // Exact law of the per-path directional supremum, when known.
  std::optional<MaxLaw> law;
  if (ctx.model.kind() == CovarianceModel::Kind::kBrownian) {
    law = MaxLaw::kAbsNormal;
  } else if (ctx.model.kind() == CovarianceModel::Kind::kSingleton &&
             std::fabs(ctx.model.variance() - 1.0) < 1e-12) {
    law = MaxLaw::kNormal;
  } else if (ctx.model.kind() == CovarianceModel::Kind::kBridge &&
             std::fabs(ctx.model.hurst() - 0.5) < 1e-12) {
    law = MaxLaw::kBridgeSup;
  }

  for (long long n : cfg.n_schedule) {
    std::vector<double> z, z2, z4;
    for (const CellMetrics& c : result.cells) {
      if (c.n == n) {
        z.push_back(c.zmax);
        z2.push_back(c.zmax * c.zmax);
        z4.push_back(c.zmax * c.zmax * c.zmax * c.zmax);
      }
    }
    const detail::MeanSe mz = detail::mean_se(z);
    const detail::MeanSe mz2 = detail::mean_se(z2);
    const detail::MeanSe mz4 = detail::mean_se(z4);
    ExtremeRecord rec;
    rec.n = n;
    rec.reps = static_cast<int>(z.size());
    rec.z_mean = mz.mean;
    rec.z_se = mz.se;
    rec.z2_mean = mz2.mean;
    rec.z4_mean = mz4.mean;
    rec.z4_se = mz4.se;
    if (law) {
      const MaxMoments mm = normalized_max_moments(*law, n);
      rec.oracle_mean = mm.mean;
      rec.oracle_sd = mm.sd;
      rec.oracle_m4 = mm.m4;
    }
    result.extremes.push_back(std::move(rec));
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// Rate diagnostic: the scaled-gap series sqrt(ln n) * mean rho, flagged where
// it fails to be non-increasing within one pooled standard error.
inline RunResult run_rate_diagnostic(const ExperimentConfig& cfg) {
  RunResult result = run_convergence(cfg);
  for (std::size_t i = 0; i < result.convergence.size(); ++i) {
    const ConvergenceRecord& rec = result.convergence[i];
    RateRecord rate;
    rate.n = rec.n;
    rate.rate = rec.rate;
    rate.se_rate = rec.se_rho * std::sqrt(std::log(static_cast<double>(rec.n)));
    if (i > 0) {
      const RateRecord& prev = result.rates[i - 1];
      rate.nonincreasing_ok =
          rate.rate <= prev.rate + std::hypot(rate.se_rate, prev.se_rate);
    }
    result.rates.push_back(rate);
  }
  return result;
}

// Single-realisation scaled hull, the backing for the `simulate` subcommand.
// Both the polygon (planar runs) and the profile are already divided by
// sqrt(2 ln n).
struct HullRun {
  Polygon2D hull;
  SupportProfile scaled_profile;
  double a_n = 0.0;
  double sigma_limit = 0.0;
};

inline HullRun run_hull(const ExperimentConfig& cfg, long long n) {
  if (n < 2) throw std::invalid_argument("run_hull: n must be >= 2");
  ExperimentConfig one = cfg;
  one.n_schedule = {n};
  one.replications = 1;
  one.keep_profiles = true;
  const detail::RunContext ctx = detail::make_context(one, one.grid_points);
  const detail::CellJob job{n, 0, 0, false};
  CellMetrics cell = detail::run_cell(ctx.model, ctx.grid, ctx.factor,
                                      ctx.directions, ctx.limit_profile, one,
                                      job, nullptr, false);
  if (!cell.sanity_ok) {
    throw std::runtime_error("run_hull: sanity check failed: " + cell.sanity_msg);
  }
  return HullRun{std::move(cell.scaled_hull),
                 SupportProfile{ctx.directions, std::move(cell.scaled_profile)},
                 std::sqrt(2.0 * std::log(static_cast<double>(n))),
                 ctx.sigma_limit};
}

}  // namespace hullshape
