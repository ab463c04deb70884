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

#include "hullshape/covariance.hpp"

#include <cmath>

#include <catch2/catch_amalgamated.hpp>

using namespace hullshape;
using Catch::Approx;

TEST_CASE("brownian kernel", "[models]") {
  const auto m = CovarianceModel::brownian(2);
  REQUIRE(m.kernel(0.3, 0.7) == 0.3);
  REQUIRE(m.kernel(0.7, 0.3) == 0.3);
  REQUIRE(m.kernel(1.0, 1.0) == 1.0);
  REQUIRE(m.closed_form_sigma().value() == 1.0);
  REQUIRE(m.name() == "bm");
  REQUIRE(m.dim() == 2);
}

TEST_CASE("fbm at H = 1/2 reduces to brownian", "[models]") {
  const auto f = CovarianceModel::fractional(0.5, 1);
  for (double t : {0.1, 0.35, 0.8, 1.0}) {
    for (double s : {0.05, 0.5, 0.99}) {
      REQUIRE(f.kernel(t, s) == Approx(std::min(t, s)).margin(1e-14));
    }
  }
  REQUIRE(f.closed_form_sigma().value() == 1.0);
}

TEST_CASE("fbb at H = 1/2 is the classical bridge", "[models]") {
  const auto b = CovarianceModel::bridge(0.5, 2);
  for (double t : {0.2, 0.5, 0.9}) {
    for (double s : {0.1, 0.5, 0.7}) {
      REQUIRE(b.kernel(t, s) == Approx(std::min(t, s) - t * s).margin(1e-14));
    }
  }
  // Pinned at the endpoint.
  REQUIRE(b.kernel(1.0, 1.0) == Approx(0.0).margin(1e-15));
  REQUIRE(b.kernel(1.0, 0.4) == Approx(0.0).margin(1e-15));
}

TEST_CASE("fbb pointwise variance and its maximum", "[models]") {
  for (double hurst : {0.25, 0.4, 0.5, 0.65, 0.75}) {
    const auto b = CovarianceModel::bridge(hurst, 1);
    for (double t : {0.1, 0.3, 0.5, 0.8, 1.0}) {
      REQUIRE(fbb_sigma_sq(t, hurst) == Approx(b.kernel(t, t)).margin(1e-13));
    }
    const double peak = std::pow(2.0, -2.0 * hurst) - 0.25;
    REQUIRE(fbb_sigma_sq(0.5, hurst) == Approx(peak).margin(1e-14));
    // t = 1/2 maximises the variance.
    for (double t = 0.02; t < 1.0; t += 0.02) {
      REQUIRE(fbb_sigma_sq(t, hurst) <= peak + 1e-12);
    }
    REQUIRE(b.closed_form_sigma().value() == Approx(std::sqrt(peak)).margin(1e-14));
  }
}

TEST_CASE("singleton kernel is constant", "[models]") {
  const auto s = CovarianceModel::singleton(2.5, 3);
  REQUIRE(s.kernel(0.1, 0.9) == 2.5);
  REQUIRE(s.closed_form_sigma().value() == Approx(std::sqrt(2.5)));
}

TEST_CASE("model spec parsing", "[models]") {
  REQUIRE(parse_model("bm", 2).kind() == CovarianceModel::Kind::kBrownian);
  const auto f = parse_model("fbm:H=0.75", 2);
  REQUIRE(f.kind() == CovarianceModel::Kind::kFractional);
  REQUIRE(f.hurst() == Approx(0.75));
  const auto b = parse_model("fbb:H=0.5", 1);
  REQUIRE(b.kind() == CovarianceModel::Kind::kBridge);
  REQUIRE(b.hurst() == Approx(0.5));
  const auto s = parse_model("singleton:var=2", 3);
  REQUIRE(s.kind() == CovarianceModel::Kind::kSingleton);
  REQUIRE(s.variance() == Approx(2.0));
}

TEST_CASE("model names re-parse to the same model", "[models]") {
  for (const char* spec : {"bm", "fbm:H=0.75", "fbb:H=0.25", "singleton:var=2"}) {
    const auto m = parse_model(spec, 2);
    const auto again = parse_model(m.name(), 2);
    REQUIRE(again.kind() == m.kind());
    REQUIRE(again.hurst() == m.hurst());
    REQUIRE(again.variance() == m.variance());
  }
}

TEST_CASE("invalid model specs are rejected", "[models]") {
  REQUIRE_THROWS_AS(parse_model("wat", 2), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_model("bm:x=1", 2), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_model("fbm", 2), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_model("fbm:H=abc", 2), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_model("fbm:H=0", 2), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_model("fbm:H=1", 2), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_model("fbb:H=1.5", 2), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_model("fbm:H=0.5x", 2), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_model("singleton:var=-1", 2), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_model("singleton:var=0", 2), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_model("bm", 0), std::invalid_argument);
}
