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

// Exact finite-n extreme value laws used as simulation oracles.
//
// Three one-dimensional maxima admit closed-form CDFs:
//   kAbsNormal  max of n i.i.d. |N(0,1)|, CDF (2 Phi(x) - 1)^n.  The
//               reflection principle gives sup_{t<=1} B_t the law of |B_1|,
//               so this is exactly the directional maximum of n pooled
//               Brownian paths in a fixed direction.
//   kNormal     max of n i.i.d. N(0,1), CDF Phi(x)^n (singleton model).
//   kBridgeSup  max of n i.i.d. copies of sup_t BB(t) for the standard
//               Brownian bridge, CDF (1 - exp(-2x^2))^n, x >= 0.
//
// Moments of the normalised maximum Z_n = M_n / sqrt(2 ln n) are computed by
// composite 16-point Gauss-Legendre quadrature of x^k n F^{n-1} f; panel
// width 1/16 makes the quadrature error negligible against double precision.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hullshape {

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

enum class MaxLaw { kAbsNormal, kNormal, kBridgeSup };

inline double max_law_cdf(MaxLaw law, double x) {
  switch (law) {
    case MaxLaw::kAbsNormal:
      return x <= 0.0 ? 0.0 : 2.0 * normal_cdf(x) - 1.0;
    case MaxLaw::kNormal:
      return normal_cdf(x);
    case MaxLaw::kBridgeSup:
      return x <= 0.0 ? 0.0 : 1.0 - std::exp(-2.0 * x * x);
  }
  return 0.0;
}

inline double max_law_pdf(MaxLaw law, double x) {
  switch (law) {
    case MaxLaw::kAbsNormal:
      return x <= 0.0 ? 0.0 : 2.0 * normal_pdf(x);
    case MaxLaw::kNormal:
      return normal_pdf(x);
    case MaxLaw::kBridgeSup:
      return x <= 0.0 ? 0.0 : 4.0 * x * std::exp(-2.0 * x * x);
  }
  return 0.0;
}

// Moments of Z_n = (max of n i.i.d. draws) / sqrt(2 ln n).
struct MaxMoments {
  double mean = 0.0;
  double sd = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
};

namespace detail {

inline constexpr double kGlNodes[8] = {
    0.09501250983763744, 0.28160355077925891, 0.45801677765722739,
    0.61787624440264375, 0.75540440835500303, 0.86563120238783174,
    0.94457502307323258, 0.98940093499164993};
inline constexpr double kGlWeights[8] = {
    0.18945061045506850, 0.18260341504492359, 0.16915651939500254,
    0.14959598881657673, 0.12462897125553387, 0.09515851168249278,
    0.06225352393864789, 0.02715245941175409};

template <class F>
double integrate_gl(F&& f, double lo, double hi, int panels) {
  const double h = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * h;
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double dx = 0.5 * h * kGlNodes[i];
      acc += kGlWeights[i] * (f(mid + dx) + f(mid - dx));
    }
    total += acc * 0.5 * h;
  }
  return total;
}

}  // namespace detail

inline MaxMoments normalized_max_moments(MaxLaw law, long long n) {
  if (n < 2) throw std::invalid_argument("max moments: n must be >= 2");
  const double nn = static_cast<double>(n);
  const auto raw_moment = [&](double power) {
    const auto integrand = [&](double x) {
      const double cdf = max_law_cdf(law, x);
      if (cdf <= 0.0) return 0.0;
      const double w = nn * std::exp((nn - 1.0) * std::log(cdf));
      return std::pow(x, power) * w * max_law_pdf(law, x);
    };
    const double lo = law == MaxLaw::kNormal ? -16.0 : 0.0;
    const int panels = static_cast<int>((16.0 - lo) * 16.0);
    return detail::integrate_gl(integrand, lo, 16.0, panels);
  };

  const double a = std::sqrt(2.0 * std::log(nn));
  MaxMoments m;
  m.mean = raw_moment(1.0) / a;
  m.m2 = raw_moment(2.0) / (a * a);
  m.m4 = raw_moment(4.0) / (a * a * a * a);
  m.sd = std::sqrt(std::max(0.0, m.m2 - m.mean * m.mean));
  return m;
}

// Rigorous upper bound on E max of n*q i.i.d. standard bridge suprema,
// normalised by sqrt(2 ln n):
//   E max <= x* + n q Integral_{x*}^inf exp(-2x^2) dx,
// with x* = sqrt(ln(n q) / 2) the point where the union bound reaches one.
inline double bridge_sup_union_upper(long long n, int q) {
  const double nq = static_cast<double>(n) * q;
  const double xstar = std::sqrt(0.5 * std::log(nq));
  const double tail =
      nq * std::sqrt(std::numbers::pi / 8.0) * std::erfc(std::numbers::sqrt2 * xstar);
  return (xstar + tail) / std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

}  // namespace hullshape
