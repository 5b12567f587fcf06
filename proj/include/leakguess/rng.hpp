// Copyright 2026 The leakguess Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Pinned pseudo-random machinery. Every stochastic operation in the library
// draws from Xoshiro256 (the "**" scrambler, Blackman & Vigna 2018) seeded
// through SplitMix64, so results are identical on every platform. Nothing
// here touches std::random_device or the <random> distributions, whose
// outputs are implementation-defined.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace leakguess {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 output finalizer (Stafford variant 13). Bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for trial `trial_index` of a run seeded with `base_seed`:
/// mix64(base_seed + (trial_index + 1) * kGoldenGamma). Since the affine
/// step is injective for a fixed base and mix64 is a bijection, distinct
/// trial indices always give distinct seeds.
constexpr std::uint64_t derive_trial_seed(std::uint64_t base_seed,
                                          std::uint64_t trial_index) noexcept {
  return mix64(base_seed + (trial_index + 1) * kGoldenGamma);
}

/// Folds a path of tags into a seed, e.g. {dataset, n_index, role}.
constexpr std::uint64_t derive_stream_seed(std::uint64_t base_seed,
                                           std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t s = base_seed;
  for (auto t : tags) s = derive_trial_seed(s, t);
  return s;
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x += kGoldenGamma;
      word = mix64(x);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform integer in [0, bound) by Lemire's multiply-and-reject method.
  /// bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace leakguess
