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

// The covariance-determined limit shape.
//
// Scaled by sqrt(2 ln n), the pooled hull of n Gaussian paths converges to
// the convex body W with support function
//   M_W(theta) = sigma(theta) = sqrt(sup_t <R_t theta, theta>),
// the union of the ellipsoids { x : <R_t^{-1} x, x> <= 1 }'s convex hull.
// For the built-in models the coordinates are i.i.d., R_t = r(t,t) I, and W
// is the centred ball of radius sqrt(sup_t r(t,t)).

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hullshape/covariance.hpp"
#include "hullshape/geometry.hpp"
#include "hullshape/time_grid.hpp"

namespace hullshape {

namespace detail {

inline void check_unit(std::span<const double> theta) {
  double norm_sq = 0.0;
  for (double c : theta) norm_sq += c * c;
  if (std::fabs(norm_sq - 1.0) > 1e-9) {
    throw std::invalid_argument("sigma: direction must be a unit vector");
  }
}

}  // namespace detail

// Support function of the ellipsoid with covariance R: sqrt(theta^T R theta).
inline double ellipsoid_support(const Eigen::MatrixXd& r,
                                std::span<const double> theta) {
  if (r.rows() != r.cols() ||
      r.rows() != static_cast<Eigen::Index>(theta.size())) {
    throw std::invalid_argument("ellipsoid_support: shape mismatch");
  }
  if ((r - r.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("ellipsoid_support: R must be symmetric");
  }
  detail::check_unit(theta);
  const Eigen::Map<const Eigen::VectorXd> t(theta.data(),
                                            static_cast<Eigen::Index>(theta.size()));
  const double quad = t.dot(r * t);
  if (quad < -1e-12) {
    throw std::invalid_argument("ellipsoid_support: R is not PSD");
  }
  return std::sqrt(std::max(0.0, quad));
}

// Numeric sigma(theta) = sqrt(max_t <R_t theta, theta>) over the time grid.
// With i.i.d. coordinates <R_t theta, theta> = r(t,t) for unit theta.
inline double sigma(const CovarianceModel& model, const TimeGrid& grid,
                    std::span<const double> theta) {
  if (static_cast<int>(theta.size()) != model.dim()) {
    throw std::invalid_argument("sigma: direction dimension mismatch");
  }
  detail::check_unit(theta);
  double best = 0.0;
  for (double t : grid.points()) best = std::max(best, model.kernel(t, t));
  return std::sqrt(best);
}

struct LimitShape {
  SupportProfile profile;
  std::string model_name;
  bool closed_form = false;  // provenance: analytic radius vs grid maximum
};

// Limit shape support profile on a direction grid.  Uses the closed-form
// radius when the model carries one and records which path was taken.
inline LimitShape limit_shape(const CovarianceModel& model,
                              const TimeGrid& time_grid,
                              const DirectionGrid& directions) {
  if (directions.dim() != model.dim()) {
    throw std::invalid_argument("limit_shape: dimension mismatch");
  }
  LimitShape shape{constant_profile(directions, 0.0), model.name(), false};
  if (auto radius = model.closed_form_sigma()) {
    shape.profile = constant_profile(directions, *radius);
    shape.closed_form = true;
    return shape;
  }
  std::vector<double> theta(static_cast<std::size_t>(directions.dim()));
  for (int j = 0; j < directions.count(); ++j) {
    const auto dir = directions.direction(j);
    std::copy(dir.begin(), dir.end(), theta.begin());
    shape.profile.values[static_cast<std::size_t>(j)] =
        sigma(model, time_grid, theta);
  }
  return shape;
}

// General door for anisotropic covariances: the limit support function of a
// family of matrix covariances R_t is the upper envelope of the ellipsoid
// support functions.
inline SupportProfile limit_shape_from_ellipsoids(
    const std::vector<Eigen::MatrixXd>& covariances,
    const DirectionGrid& directions) {
  if (covariances.empty()) {
    throw std::invalid_argument("limit_shape_from_ellipsoids: no covariances");
  }
  SupportProfile profile = constant_profile(directions, 0.0);
  std::vector<double> theta(static_cast<std::size_t>(directions.dim()));
  for (int j = 0; j < directions.count(); ++j) {
    const auto dir = directions.direction(j);
    std::copy(dir.begin(), dir.end(), theta.begin());
    double best = 0.0;
    for (const auto& r : covariances) {
      best = std::max(best, ellipsoid_support(r, theta));
    }
    profile.values[static_cast<std::size_t>(j)] = best;
  }
  return profile;
}

}  // namespace hullshape
