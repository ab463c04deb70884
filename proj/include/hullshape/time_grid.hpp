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

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hullshape {

// Strictly increasing evaluation times inside (0, 1].  Paths are sampled at
// these instants; t = 0 is excluded because every built-in process vanishes
// there almost surely.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("TimeGrid: empty grid");
    double prev = 0.0;
    for (double t : points_) {
      if (!std::isfinite(t) || t <= prev || t > 1.0) {
        throw std::invalid_argument(
            "TimeGrid: points must be finite, strictly increasing and in "
            "(0, 1], got " +
            std::to_string(t));
      }
      prev = t;
    }
  }

  // k equispaced points j/k, j = 1..k.
  static TimeGrid uniform(int k) {
    if (k < 1) throw std::invalid_argument("TimeGrid: k must be >= 1");
    std::vector<double> pts(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
      pts[static_cast<std::size_t>(j)] =
          static_cast<double>(j + 1) / static_cast<double>(k);
    }
    return TimeGrid(std::move(pts));
  }

  const std::vector<double>& points() const { return points_; }
  int size() const { return static_cast<int>(points_.size()); }
  double operator[](int j) const { return points_[static_cast<std::size_t>(j)]; }

 private:
  std::vector<double> points_;
};

}  // namespace hullshape
