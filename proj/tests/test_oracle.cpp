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

#include "hullshape/extreme_oracle.hpp"

#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "hullshape/rng.hpp"

using namespace hullshape;
using Catch::Approx;

namespace {

// Frozen reference values produced by an independent quadrature
// implementation (adaptive quadrature over the same closed-form CDFs).
// The C++ oracle must reproduce them before anything downstream trusts it.
struct FrozenRow {
  long long n;
  double mean;
  double sd;
  double m4;
};

constexpr FrozenRow kAbsNormal[] = {
    {100, 0.905137, 0.131832, 0.763698},
    {1000, 0.924262, 0.090095, 0.773840},
    {10000, 0.936360, 0.068327, 0.794433},
    {100000, 0.944734, 0.055012, 0.813425},
};

constexpr FrozenRow kBridge[] = {
    {100, 0.526922, 0.062921, 0.0},
    {1000, 0.518696, 0.043162, 0.0},
    {10000, 0.514382, 0.032865, 0.0},
    {100000, 0.511693, 0.026550, 0.0},
};

constexpr double kNormalMeans[][2] = {
    {100, 0.826265}, {1000, 0.872075}, {10000, 0.897408}, {100000, 0.913680}};

}  // namespace

TEST_CASE("quadrature reproduces the frozen |N| max table", "[oracle]") {
  for (const FrozenRow& row : kAbsNormal) {
    const MaxMoments m = normalized_max_moments(MaxLaw::kAbsNormal, row.n);
    INFO("n = " << row.n);
    REQUIRE(m.mean == Approx(row.mean).margin(5e-6));
    REQUIRE(m.sd == Approx(row.sd).margin(5e-6));
    REQUIRE(m.m4 == Approx(row.m4).margin(5e-6));
  }
}

TEST_CASE("quadrature reproduces the frozen bridge-sup table", "[oracle]") {
  for (const FrozenRow& row : kBridge) {
    const MaxMoments m = normalized_max_moments(MaxLaw::kBridgeSup, row.n);
    INFO("n = " << row.n);
    REQUIRE(m.mean == Approx(row.mean).margin(5e-6));
    REQUIRE(m.sd == Approx(row.sd).margin(5e-6));
  }
}

TEST_CASE("quadrature reproduces the frozen normal-max means", "[oracle]") {
  for (const auto& row : kNormalMeans) {
    const MaxMoments m =
        normalized_max_moments(MaxLaw::kNormal, static_cast<long long>(row[0]));
    REQUIRE(m.mean == Approx(row[1]).margin(5e-6));
  }
}

TEST_CASE("max law CDFs are proper distributions", "[oracle]") {
  for (MaxLaw law : {MaxLaw::kAbsNormal, MaxLaw::kNormal, MaxLaw::kBridgeSup}) {
    double prev = 0.0;
    for (double x = -8.0; x <= 8.0; x += 0.0625) {
      const double f = max_law_cdf(law, x);
      REQUIRE(f >= prev - 1e-15);
      REQUIRE(f >= 0.0);
      REQUIRE(f <= 1.0);
      prev = f;
    }
    REQUIRE(max_law_cdf(law, 16.0) == Approx(1.0).margin(1e-12));
    // Density integrates to one.
    const double mass = detail::integrate_gl(
        [law](double x) { return max_law_pdf(law, x); }, -16.0, 16.0, 512);
    REQUIRE(mass == Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("normalized moments are internally consistent", "[oracle]") {
  for (long long n : {100LL, 10000LL}) {
    const MaxMoments m = normalized_max_moments(MaxLaw::kAbsNormal, n);
    REQUIRE(m.m2 >= m.mean * m.mean);
    REQUIRE(m.m4 >= m.m2 * m.m2);  // Jensen
    REQUIRE(m.sd == Approx(std::sqrt(m.m2 - m.mean * m.mean)).margin(1e-12));
  }
  REQUIRE_THROWS_AS(normalized_max_moments(MaxLaw::kNormal, 1),
                    std::invalid_argument);
}

TEST_CASE("monte carlo agrees with the quadrature oracle", "[oracle]") {
  // 4000 independent maxima of 1e4 |N(0,1)| draws; the sample mean of Z must
  // sit within 4 standard errors of the exact value.
  const long long n = 10000;
  const int reps = 4000;
  const double a_n = std::sqrt(2.0 * std::log(static_cast<double>(n)));
  NormalStream stream({90210, 1});
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    double mx = 0.0;
    for (long long i = 0; i < n; ++i) mx = std::max(mx, std::fabs(stream.next()));
    const double z = mx / a_n;
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / reps;
  const double var = (sum_sq / reps - mean * mean) * reps / (reps - 1.0);
  const double se = std::sqrt(var / reps);
  const MaxMoments m = normalized_max_moments(MaxLaw::kAbsNormal, n);
  REQUIRE(std::fabs(mean - m.mean) <= 4.0 * se);
}

TEST_CASE("bridge union upper bound", "[oracle]") {
  // Frozen: 2 * (x* + nq sqrt(pi/8) erfc(sqrt2 x*)) / sqrt(2 ln n) at
  // n = 1e4, q = 720.
  REQUIRE(2.0 * bridge_sup_union_upper(10000, 720) ==
          Approx(1.3495825879670194).margin(1e-9));
  // It must dominate twice the exact mean of the undiscretised maximum.
  const MaxMoments m = normalized_max_moments(MaxLaw::kBridgeSup, 10000);
  REQUIRE(2.0 * bridge_sup_union_upper(10000, 720) > 2.0 * m.mean);
}
