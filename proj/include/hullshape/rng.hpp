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

// Reproducible random number generation.
//
// std::normal_distribution is implementation defined, so every variate here is
// produced by our own generator stack: xoshiro256++ seeded through splitmix64,
// with N(0,1) variates from the polar Box-Muller transform.  A (master_seed,
// stream_id) pair identifies a stream; the derivation below is injective, so
// distinct stream ids can never alias onto the same generator state.

#include <cmath>
#include <cstdint>
#include <span>

namespace hullshape {

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

namespace detail {

inline constexpr std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// splitmix64 finalizer.  Bijective on 64-bit words, which is what makes the
// stream derivation collision free.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

}  // namespace detail

// xoshiro256++ (Blackman & Vigna).  Period 2^256 - 1.
class Xoshiro256pp {
 public:
  explicit constexpr Xoshiro256pp(std::uint64_t seed) {
    detail::SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  constexpr std::uint64_t next() {
    const std::uint64_t result =
        detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 random bits.
  constexpr double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_[4] = {};
};

// Stream of i.i.d. N(0,1) variates with a fixed consumption order.  Callers
// that share a SeedSpec observe the exact same sequence on every platform.
class NormalStream {
 public:
  explicit NormalStream(SeedSpec seed)
      : engine_(detail::mix64(seed.master_seed + 0x9E3779B97F4A7C15ULL) ^
                detail::rotl64(
                    detail::mix64(seed.stream_id + 0x3C6EF372FE94F82AULL),
                    32)) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // Polar Box-Muller: rejection-sample a point in the unit disc, then map
    // its radius through the inverse exponential tail.
    double u, v, s;
    do {
      u = 2.0 * engine_.uniform01() - 1.0;
      v = 2.0 * engine_.uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  void fill(std::span<double> out) {
    for (double& x : out) x = next();
  }

  double uniform01() { return engine_.uniform01(); }

 private:
  Xoshiro256pp engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline NormalStream derive_stream(SeedSpec seed) { return NormalStream(seed); }

}  // namespace hullshape
