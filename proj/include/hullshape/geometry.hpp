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

// Convex geometry: planar hulls, support functions on direction grids, the
// Hausdorff metric between convex bodies, and the classical functionals
// (perimeter, area, diameter).
//
// For convex bodies the Hausdorff distance equals the sup-norm distance of
// support functions over the sphere; on a finite direction grid that sup is
// evaluated up to an explicit mesh error, reported alongside the distance.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace hullshape {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};
static_assert(sizeof(Vec2) == 2 * sizeof(double));

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 o, Vec2 a, Vec2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Convex polygon, vertices in counter-clockwise order, no duplicate or
// collinear vertices (up to the hull tolerance).  Degenerate hulls are
// allowed: a single vertex (point) or two vertices (segment).
struct Polygon2D {
  std::vector<Vec2> vertices;
};

namespace detail {

inline double bbox_scale(std::span<const Vec2> pts) {
  double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
  for (const Vec2& p : pts) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  return std::max({xmax - xmin, ymax - ymin, 1e-300});
}

}  // namespace detail

// Andrew's monotone chain.  Collinear and duplicate points are pruned with
// tolerance 1e-12 * bounding-box scale.  Throws on empty or non-finite input.
inline Polygon2D hull_2d(std::span<const Vec2> points) {
  if (points.empty()) throw std::invalid_argument("hull_2d: no points");
  for (const Vec2& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("hull_2d: non-finite coordinate");
    }
  }

  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }),
            pts.end());

  const double scale = detail::bbox_scale(pts);
  const double eps = 1e-12 * scale * scale;  // cross products scale as area

  if (pts.size() == 1) return Polygon2D{{pts[0]}};

  std::vector<Vec2> h(2 * pts.size());
  std::size_t m = 0;
  for (const Vec2& p : pts) {  // lower chain
    while (m >= 2 && cross(h[m - 2], h[m - 1], p) <= eps) --m;
    h[m++] = p;
  }
  const std::size_t lower = m + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {  // upper chain
    while (m >= lower && cross(h[m - 2], h[m - 1], *it) <= eps) --m;
    h[m++] = *it;
  }
  h.resize(m - 1);  // last point repeats the first

  if (h.size() == 2 && h[0].x == h[1].x && h[0].y == h[1].y) h.resize(1);
  return Polygon2D{std::move(h)};
}

// Unit directions theta_1..theta_q in dimension d, stored flat (q x d).
// covering_radius is the largest angular gap from any direction on the
// sphere to the grid, used for mesh error bounds.
class DirectionGrid {
 public:
  DirectionGrid(int dim, std::vector<double> dirs, double covering_radius)
      : dim_(dim), dirs_(std::move(dirs)), covering_radius_(covering_radius) {
    if (dim_ < 1 || dirs_.empty() || dirs_.size() % static_cast<std::size_t>(dim_) != 0) {
      throw std::invalid_argument("DirectionGrid: bad layout");
    }
    const int q = count();
    for (int j = 0; j < q; ++j) {
      double norm_sq = 0.0;
      for (int c = 0; c < dim_; ++c) norm_sq += at(j, c) * at(j, c);
      if (std::fabs(norm_sq - 1.0) > 1e-12) {
        throw std::invalid_argument("DirectionGrid: directions must be unit");
      }
    }
  }

  // q equispaced directions on the circle, theta_j = 2 pi j / q.
  static DirectionGrid circle(int q) {
    if (q < 8) throw std::invalid_argument("DirectionGrid: need q >= 8");
    std::vector<double> dirs(static_cast<std::size_t>(q) * 2);
    for (int j = 0; j < q; ++j) {
      const double a = 2.0 * std::numbers::pi * j / q;
      dirs[static_cast<std::size_t>(j) * 2] = std::cos(a);
      dirs[static_cast<std::size_t>(j) * 2 + 1] = std::sin(a);
    }
    return DirectionGrid(2, std::move(dirs), std::numbers::pi / q);
  }

  // The two directions of the line.
  static DirectionGrid line() {
    return DirectionGrid(1, {1.0, -1.0}, 0.0);
  }

  // Fibonacci spiral points on S^2; covering radius bounded by the standard
  // c / sqrt(q) estimate for the spiral (c ~= 2.7 covers the worst gap).
  static DirectionGrid sphere(int q) {
    if (q < 16) throw std::invalid_argument("DirectionGrid: need q >= 16");
    std::vector<double> dirs(static_cast<std::size_t>(q) * 3);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < q; ++j) {
      const double z = 1.0 - (2.0 * j + 1.0) / q;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * j;
      dirs[static_cast<std::size_t>(j) * 3] = rho * std::cos(a);
      dirs[static_cast<std::size_t>(j) * 3 + 1] = rho * std::sin(a);
      dirs[static_cast<std::size_t>(j) * 3 + 2] = z;
    }
    return DirectionGrid(3, std::move(dirs), 2.7 / std::sqrt(static_cast<double>(q)));
  }

  int dim() const { return dim_; }
  int count() const { return static_cast<int>(dirs_.size()) / dim_; }
  double at(int j, int c) const {
    return dirs_[static_cast<std::size_t>(j) * dim_ + c];
  }
  std::span<const double> direction(int j) const {
    return {dirs_.data() + static_cast<std::size_t>(j) * dim_,
            static_cast<std::size_t>(dim_)};
  }
  double covering_radius() const { return covering_radius_; }

  bool same_grid(const DirectionGrid& other) const {
    return dim_ == other.dim_ && dirs_ == other.dirs_;
  }

 private:
  int dim_;
  std::vector<double> dirs_;
  double covering_radius_;
};

// Support function values max_x <x, theta_j> of a finite point set (equal to
// the support function of its convex hull).
struct SupportProfile {
  DirectionGrid grid;
  std::vector<double> values;
};

inline SupportProfile support_of_points(std::span<const double> flat, int dim,
                                        const DirectionGrid& grid) {
  if (dim != grid.dim()) throw std::invalid_argument("support: dim mismatch");
  if (flat.empty() || flat.size() % static_cast<std::size_t>(dim) != 0) {
    throw std::invalid_argument("support: bad point array");
  }
  const std::size_t n = flat.size() / static_cast<std::size_t>(dim);
  const int q = grid.count();
  std::vector<double> values(static_cast<std::size_t>(q),
                             -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = flat.data() + i * static_cast<std::size_t>(dim);
    for (int j = 0; j < q; ++j) {
      double s = 0.0;
      for (int c = 0; c < dim; ++c) s += p[c] * grid.at(j, c);
      values[static_cast<std::size_t>(j)] =
          std::max(values[static_cast<std::size_t>(j)], s);
    }
  }
  return SupportProfile{grid, std::move(values)};
}

inline SupportProfile support_of_points(std::span<const Vec2> pts,
                                        const DirectionGrid& grid) {
  return support_of_points(
      std::span<const double>(reinterpret_cast<const double*>(pts.data()),
                              pts.size() * 2),
      2, grid);
}

inline SupportProfile support_of_polygon(const Polygon2D& poly,
                                         const DirectionGrid& grid) {
  return support_of_points(std::span<const Vec2>(poly.vertices), grid);
}

// Uniform circle profile: the limit shape of every i.i.d.-coordinate model is
// a centred ball, whose support function is constant.
inline SupportProfile constant_profile(const DirectionGrid& grid, double value) {
  return SupportProfile{
      grid, std::vector<double>(static_cast<std::size_t>(grid.count()), value)};
}

inline SupportProfile scale(const SupportProfile& p, double factor) {
  if (!(factor >= 0.0)) throw std::invalid_argument("scale: factor must be >= 0");
  SupportProfile out = p;
  for (double& v : out.values) v *= factor;
  return out;
}

inline Polygon2D scale(const Polygon2D& poly, double factor) {
  if (!(factor >= 0.0)) throw std::invalid_argument("scale: factor must be >= 0");
  Polygon2D out = poly;
  for (Vec2& v : out.vertices) {
    v.x *= factor;
    v.y *= factor;
  }
  return out;
}

struct HausdorffResult {
  double distance = 0.0;         // max_j |M_A(theta_j) - M_B(theta_j)|
  double mesh_delta = 0.0;       // covering radius of the grid
  double mesh_error_bound = 0.0; // bound on |grid sup - true sup|
};

// Hausdorff distance between the convex hulls described by two support
// profiles on the same grid.  The true distance lies within
// [distance, distance + mesh_error_bound]: support functions are Lipschitz
// with constant R = max ||x||, and any direction is within mesh_delta of the
// grid, so the sup over the sphere exceeds the grid sup by at most
// (R_A + R_B) * 2 sin(mesh_delta / 2).
inline HausdorffResult hausdorff(const SupportProfile& a,
                                 const SupportProfile& b) {
  if (!a.grid.same_grid(b.grid)) {
    throw std::invalid_argument("hausdorff: profiles on different grids");
  }
  HausdorffResult r;
  r.mesh_delta = a.grid.covering_radius();
  double dist = 0.0, amax = 0.0, bmax = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    dist = std::max(dist, std::fabs(a.values[j] - b.values[j]));
    amax = std::max(amax, a.values[j]);
    bmax = std::max(bmax, b.values[j]);
  }
  r.distance = dist;
  // ||x|| <= max_j M(theta_j) / cos(delta) for any point x of the body.
  const double cos_delta = std::cos(std::min(r.mesh_delta, 1.0));
  const double radius_sum = (std::max(amax, 0.0) + std::max(bmax, 0.0)) / cos_delta;
  r.mesh_error_bound = radius_sum * 2.0 * std::sin(r.mesh_delta / 2.0);
  return r;
}

// Boundary length.  A degenerate segment counts both sides (the loop walks
// it twice), which is the Minkowski boundary measure and what Cauchy's
// formula integrates to.
inline double perimeter(const Polygon2D& poly) {
  const auto& v = poly.vertices;
  if (v.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i];
    const Vec2 b = v[(i + 1) % v.size()];
    total += std::hypot(b.x - a.x, b.y - a.y);
  }
  return total;
}

inline double area(const Polygon2D& poly) {
  const auto& v = poly.vertices;
  if (v.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 a = v[i];
    const Vec2 b = v[(i + 1) % v.size()];
    twice += a.x * b.y - a.y * b.x;
  }
  return 0.5 * twice;
}

// Diameter by rotating calipers over antipodal vertex pairs.
inline double diameter(const Polygon2D& poly) {
  const auto& v = poly.vertices;
  const std::size_t m = v.size();
  if (m == 1) return 0.0;
  const auto dist = [](Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); };
  if (m == 2) return dist(v[0], v[1]);

  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = v[i];
    const Vec2 b = v[(i + 1) % m];
    // Advance the caliper while the triangle area keeps growing.
    while (std::fabs(cross(a, b, v[(j + 1) % m])) >
           std::fabs(cross(a, b, v[j]))) {
      j = (j + 1) % m;
    }
    best = std::max({best, dist(a, v[j]), dist(b, v[j])});
  }
  return best;
}

// Cauchy's formula: the perimeter of a planar convex body equals the integral
// of its support function, here a rectangle rule over the uniform circle
// grid.  Provides an independent cross-check on the polygon perimeter.
inline double perimeter_from_profile(const SupportProfile& p) {
  if (p.grid.dim() != 2) {
    throw std::invalid_argument("perimeter_from_profile: need planar grid");
  }
  double sum = 0.0;
  for (double v : p.values) sum += v;
  return sum * 2.0 * std::numbers::pi / static_cast<double>(p.values.size());
}

// Streaming hull of a large point cloud.  Points are added in chunks; each
// chunk first drops points that are strictly inside the current hull (an
// exact, conservative test), then rebuilds the hull from the survivors plus
// the current vertices.  The result is identical to a one-shot hull of all
// points because discarded points are interior to a subset hull and can
// never become vertices.
class IncrementalHull2D {
 public:
  void add(std::span<const Vec2> pts) {
    if (pts.empty()) return;
    seen_ += static_cast<long long>(pts.size());
    scratch_.clear();
    if (hull_.vertices.size() >= 3) {
      prefilter(pts);
    } else {
      scratch_.assign(pts.begin(), pts.end());
    }
    if (scratch_.empty()) return;
    scratch_.insert(scratch_.end(), hull_.vertices.begin(),
                    hull_.vertices.end());
    hull_ = hull_2d(scratch_);
    cache_gates();
  }

  const Polygon2D& hull() const { return hull_; }
  long long points_seen() const { return seen_; }

 private:
  // Two-stage interior test: a cheap radius gate (inscribed circle about the
  // origin) and an 8-gon gate (hull of 8 extreme vertices), then the exact
  // edge walk against the full hull.  All three are conservative.
  void prefilter(std::span<const Vec2> pts) {
    const auto& v = hull_.vertices;
    for (const Vec2 p : pts) {
      if (p.x * p.x + p.y * p.y < inradius_sq_) continue;
      if (gate_.size() >= 3 && inside(gate_, p)) continue;
      if (!inside(v, p)) scratch_.push_back(p);
    }
  }

  static bool inside(const std::vector<Vec2>& poly, Vec2 p) {
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2 a = poly[i];
      const Vec2 b = poly[(i + 1) % m];
      if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) <= 0.0) {
        return false;
      }
    }
    return true;
  }

  void cache_gates() {
    const auto& v = hull_.vertices;
    inradius_sq_ = 0.0;
    gate_.clear();
    if (v.size() < 3) return;

    // Largest circle about the origin inside the hull (zero if the origin is
    // outside): min over edges of the origin-to-edge-line distance.
    double rmin = std::numeric_limits<double>::infinity();
    bool origin_inside = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2 a = v[i];
      const Vec2 b = v[(i + 1) % v.size()];
      const double twice_area = a.x * b.y - a.y * b.x;  // origin as apex
      if (twice_area <= 0.0) {
        origin_inside = false;
        break;
      }
      rmin = std::min(rmin, twice_area / std::hypot(b.x - a.x, b.y - a.y));
    }
    inradius_sq_ = origin_inside ? rmin * rmin : 0.0;

    // Extreme vertices in 8 fixed directions form an inner polygon.
    constexpr double kDirs[8][2] = {{1, 0},  {0.7071067811865476, 0.7071067811865476},
                                    {0, 1},  {-0.7071067811865476, 0.7071067811865476},
                                    {-1, 0}, {-0.7071067811865476, -0.7071067811865476},
                                    {0, -1}, {0.7071067811865476, -0.7071067811865476}};
    std::vector<Vec2> extremes;
    extremes.reserve(8);
    for (const auto& dir : kDirs) {
      std::size_t best = 0;
      double best_dot = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double s = v[i].x * dir[0] + v[i].y * dir[1];
        if (s > best_dot) {
          best_dot = s;
          best = i;
        }
      }
      extremes.push_back(v[best]);
    }
    const Polygon2D inner = hull_2d(extremes);
    if (inner.vertices.size() >= 3) gate_ = inner.vertices;
  }

  Polygon2D hull_;
  std::vector<Vec2> gate_;
  std::vector<Vec2> scratch_;
  double inradius_sq_ = 0.0;
  long long seen_ = 0;
};

// Streaming support profile for dimensions other than 2: running maxima of
// <x, theta_j> over all points seen.
class IncrementalSupport {
 public:
  explicit IncrementalSupport(const DirectionGrid& grid)
      : profile_{grid, std::vector<double>(
                           static_cast<std::size_t>(grid.count()),
                           -std::numeric_limits<double>::infinity())} {}

  void add(std::span<const double> flat) {
    const int dim = profile_.grid.dim();
    const int q = profile_.grid.count();
    const std::size_t n = flat.size() / static_cast<std::size_t>(dim);
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = flat.data() + i * static_cast<std::size_t>(dim);
      for (int j = 0; j < q; ++j) {
        double s = 0.0;
        for (int c = 0; c < dim; ++c) s += p[c] * profile_.grid.at(j, c);
        profile_.values[static_cast<std::size_t>(j)] =
            std::max(profile_.values[static_cast<std::size_t>(j)], s);
      }
    }
  }

  const SupportProfile& profile() const { return profile_; }

 private:
  SupportProfile profile_;
};

}  // namespace hullshape
