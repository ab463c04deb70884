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

// Exact Gaussian path sampling on a time grid.
//
// The Gram matrix G[i][j] = r(t_i, t_j) is factored once per (model, grid)
// pair as G = L L^T and paths are L z with z standard normal.  Built-in
// bridge kernels are only positive SEMIdefinite (the path is pinned at
// t = 1), so the factorisation keeps zero pivots instead of failing.
//
// Brownian motion gets a closed-form factor: with t_0 = 0,
//   L[i][j] = sqrt(t_j - t_{j-1})  for j <= i,
// whose product L L^T telescopes to min(t_i, t_j) exactly.  Applying it is a
// prefix sum, O(k) per path instead of O(k^2), which is what makes the large
// Brownian runs affordable.
//
// Variate order contract: path by path, coordinate by coordinate within the
// path, time point by time point within the coordinate.  Fixing this order is
// what makes results independent of chunk size and thread count.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hullshape/covariance.hpp"
#include "hullshape/rng.hpp"
#include "hullshape/time_grid.hpp"

namespace hullshape {

struct NotPositiveSemiDefiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Left-looking Cholesky that tolerates zero pivots.  A pivot within
// pivot_tol of zero zeroes its column; the off-diagonal residual there must
// also vanish or the matrix is genuinely indefinite.
inline bool cholesky_psd(const Eigen::MatrixXd& gram, Eigen::MatrixXd& lower,
                         double pivot_tol, double column_tol) {
  const Eigen::Index k = gram.rows();
  lower = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double diag = gram(j, j);
    for (Eigen::Index m = 0; m < j; ++m) diag -= lower(j, m) * lower(j, m);
    if (diag > pivot_tol) {
      const double pivot = std::sqrt(diag);
      lower(j, j) = pivot;
      for (Eigen::Index i = j + 1; i < k; ++i) {
        double v = gram(i, j);
        for (Eigen::Index m = 0; m < j; ++m) v -= lower(i, m) * lower(j, m);
        lower(i, j) = v / pivot;
      }
    } else if (diag > -pivot_tol) {
      // Semidefinite direction: the whole column must be explained already.
      for (Eigen::Index i = j + 1; i < k; ++i) {
        double v = gram(i, j);
        for (Eigen::Index m = 0; m < j; ++m) v -= lower(i, m) * lower(j, m);
        if (std::fabs(v) > column_tol) return false;
      }
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace detail

// Lower-triangular factor of the Gram matrix, either dense or in the
// increment form used for Brownian motion.
class CovFactor {
 public:
  static CovFactor dense(Eigen::MatrixXd lower) {
    CovFactor f;
    f.size_ = static_cast<int>(lower.rows());
    f.lower_ = std::move(lower);
    return f;
  }

  static CovFactor increments(std::vector<double> sqrt_dt) {
    CovFactor f;
    f.size_ = static_cast<int>(sqrt_dt.size());
    f.sqrt_dt_ = std::move(sqrt_dt);
    return f;
  }

  int size() const { return size_; }
  bool is_increment_form() const { return !sqrt_dt_.empty(); }

  // In-place z -> L z on each column.
  void apply_inplace(Eigen::Ref<Eigen::MatrixXd> z) const {
    if (z.rows() != size_) throw std::invalid_argument("CovFactor: size mismatch");
    if (is_increment_form()) {
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        double acc = 0.0;
        for (int j = 0; j < size_; ++j) {
          acc += sqrt_dt_[static_cast<std::size_t>(j)] * z(j, c);
          z(j, c) = acc;
        }
      }
    } else {
      lower_.triangularView<Eigen::Lower>().applyThisOnTheLeft(z);
    }
  }

  // Materialised lower factor (used by tests and the factorisation check).
  Eigen::MatrixXd lower() const {
    if (!is_increment_form()) return lower_;
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(size_, size_);
    for (int i = 0; i < size_; ++i)
      for (int j = 0; j <= i; ++j)
        l(i, j) = sqrt_dt_[static_cast<std::size_t>(j)];
    return l;
  }

 private:
  int size_ = 0;
  Eigen::MatrixXd lower_;
  std::vector<double> sqrt_dt_;
};

inline Eigen::MatrixXd gram_matrix(const CovarianceModel& model,
                                   const TimeGrid& grid) {
  const int k = grid.size();
  Eigen::MatrixXd gram(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j <= i; ++j)
      gram(i, j) = gram(j, i) = model.kernel(grid[i], grid[j]);
  return gram;
}

// Factors the Gram matrix of (model, grid).  Post-condition, checked here:
// || L L^T - Gram ||_max <= 1e-8 * (1 + max diag).
inline CovFactor factorize(const CovarianceModel& model, const TimeGrid& grid) {
  const int k = grid.size();

  if (model.kind() == CovarianceModel::Kind::kBrownian) {
    std::vector<double> sqrt_dt(static_cast<std::size_t>(k));
    double prev = 0.0;
    for (int j = 0; j < k; ++j) {
      sqrt_dt[static_cast<std::size_t>(j)] = std::sqrt(grid[j] - prev);
      prev = grid[j];
    }
    // L L^T telescopes to min(t_i, t_j) exactly; no residual check needed.
    return CovFactor::increments(std::move(sqrt_dt));
  }

  const Eigen::MatrixXd gram = gram_matrix(model, grid);
  const double max_diag = gram.diagonal().maxCoeff();
  const double pivot_tol = 1e-12 * std::max(max_diag, 1.0);
  const double column_tol = 1e-7 * std::max(max_diag, 1.0);

  Eigen::MatrixXd lower;
  bool ok = detail::cholesky_psd(gram, lower, pivot_tol, column_tol);
  if (!ok) {
    // One retry with a hair of diagonal jitter before declaring defeat.
    Eigen::MatrixXd jittered = gram;
    jittered.diagonal().array() += 1e-12 * std::max(max_diag, 1.0);
    ok = detail::cholesky_psd(jittered, lower, pivot_tol, column_tol);
  }
  if (!ok) {
    throw NotPositiveSemiDefiniteError("factorize: Gram matrix of model '" +
                                       model.name() +
                                       "' is not positive semidefinite");
  }

  const double residual =
      (lower * lower.transpose() - gram).cwiseAbs().maxCoeff();
  if (residual > 1e-8 * (1.0 + max_diag)) {
    throw NotPositiveSemiDefiniteError(
        "factorize: factor residual " + std::to_string(residual) +
        " exceeds tolerance for model '" + model.name() + "'");
  }
  return CovFactor::dense(std::move(lower));
}

// A batch of n sampled paths.  values is n x k x d, path major, then time,
// then coordinate: value(i, j, c) = coordinate c of path i at grid point j.
struct PathBatch {
  std::vector<double> grid_points;
  int dim = 0;
  long long count = 0;
  std::vector<double> values;

  double value(long long i, int j, int c) const {
    const auto k = static_cast<long long>(grid_points.size());
    return values[static_cast<std::size_t>((i * k + j) * dim + c)];
  }
};

// Streams paths in chunks without materialising the whole batch.  For each
// chunk the visitor receives a k x (m * d) matrix whose columns are the
// coordinate processes of m consecutive paths (path major, coordinate minor),
// plus the index of the first path in the chunk.
template <class Visitor>
void sample_path_chunks(const CovarianceModel& model, const TimeGrid& grid,
                        const CovFactor& factor, long long n, SeedSpec seed,
                        long long chunk_paths, Visitor&& visit) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  if (chunk_paths < 1) throw std::invalid_argument("sample: bad chunk size");
  const int k = grid.size();
  const int d = model.dim();
  NormalStream stream = derive_stream(seed);

  Eigen::MatrixXd z(k, chunk_paths * d);
  for (long long first = 0; first < n; first += chunk_paths) {
    const long long m = std::min(chunk_paths, n - first);
    auto block = z.leftCols(m * d);
    // Column-by-column fill preserves the variate order contract.
    for (Eigen::Index c = 0; c < block.cols(); ++c) {
      for (int j = 0; j < k; ++j) block(j, c) = stream.next();
    }
    factor.apply_inplace(block);
    visit(block, first, m);
  }
}

inline PathBatch sample_paths(const CovarianceModel& model,
                              const TimeGrid& grid, long long n,
                              SeedSpec seed) {
  const CovFactor factor = factorize(model, grid);
  const int k = grid.size();
  const int d = model.dim();
  PathBatch batch;
  batch.grid_points = grid.points();
  batch.dim = d;
  batch.count = n;
  batch.values.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(k) *
                      static_cast<std::size_t>(d));
  sample_path_chunks(
      model, grid, factor, n, seed, std::min<long long>(n, 1024),
      [&](const Eigen::Ref<const Eigen::MatrixXd>& cols, long long first,
          long long m) {
        for (long long p = 0; p < m; ++p) {
          for (int c = 0; c < d; ++c) {
            const auto col = cols.col(p * d + c);
            for (int j = 0; j < k; ++j) {
              batch.values[static_cast<std::size_t>(
                  ((first + p) * k + j) * d + c)] = col(j);
            }
          }
        }
      });
  return batch;
}

}  // namespace hullshape
