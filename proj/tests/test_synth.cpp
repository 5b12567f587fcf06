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

#include "leakguess/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "leakguess/dist.hpp"
#include "leakguess/error.hpp"

namespace leakguess {
namespace {

ZipfMandelbrotSpec spec(std::uint64_t v, double s, double b, std::uint64_t n, std::uint64_t seed) {
  ZipfMandelbrotSpec z;
  z.vocab_size = v;
  z.exponent = s;
  z.shift = b;
  z.users = n;
  z.seed = seed;
  return z;
}

// Unnormalized Zipf-Mandelbrot weights summed in long double.
std::vector<double> oracle_probs(std::uint64_t v, double s, double b) {
  std::vector<long double> w(v);
  long double z = 0;
  for (std::uint64_t i = 0; i < v; ++i) {
    w[i] = std::pow(static_cast<long double>(i + 1) + b, -static_cast<long double>(s));
    z += w[i];
  }
  std::vector<double> p(v);
  for (std::uint64_t i = 0; i < v; ++i) p[i] = static_cast<double>(w[i] / z);
  return p;
}

TEST(SynthTest, SingleTokenVocabulary) {
  const auto t = generate(spec(1, 1.0, 0.0, 10, 1));
  EXPECT_EQ(t.unique_count(), 1u);
  EXPECT_EQ(t.count("w1"), 10u);
}

TEST(SynthTest, ZeroExponentIsUniform) {
  const auto t = generate(spec(4, 0.0, 0.0, 40'000, 5));
  ASSERT_EQ(t.unique_count(), 4u);
  const double sd = std::sqrt(40'000 * 0.25 * 0.75);  // 86.6
  for (const auto& [token, count] : t) {
    EXPECT_NEAR(static_cast<double>(count), 10'000.0, 4 * sd) << token;
  }
}

TEST(SynthTest, RankProbabilitiesMatchOracle) {
  const auto z = spec(1000, 1.3, 2.5, 1, 0);
  const auto got = rank_probabilities(z);
  const auto want = oracle_probs(1000, 1.3, 2.5);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-14);
}

TEST(SynthTest, HeadCountsWithinBinomialNoise) {
  const auto z = spec(100'000, 1.1, 0.0, 1'000'000, 21);
  const auto p = oracle_probs(z.vocab_size, z.exponent, z.shift);
  const auto t = generate(z);
  EXPECT_EQ(t.total_users(), z.users);
  for (std::size_t i = 0; i < 20; ++i) {
    const double mean = p[i] * 1e6;
    const double sd = std::sqrt(1e6 * p[i] * (1 - p[i]));
    EXPECT_NEAR(static_cast<double>(t.count("w" + std::to_string(i + 1))), mean, 4 * sd)
        << "rank " << i + 1;
  }
}

TEST(SynthTest, SingletonShareMatchesAnalyticExpectation) {
  // Expected number of tokens seen exactly once and seen at all, per token
  // as Binomial(N, p_i) occupancy.
  const auto z = spec(100'000, 0.9, 0.0, 1'000'000, 8);
  const auto p = oracle_probs(z.vocab_size, z.exponent, z.shift);
  const double n = static_cast<double>(z.users);
  double e_once = 0, e_seen = 0;
  for (double pi : p) {
    e_once += n * pi * std::pow(1 - pi, n - 1);
    e_seen += 1 - std::pow(1 - pi, n);
  }
  const double expected = e_once / e_seen;
  EXPECT_NEAR(expected, 0.1866, 5e-4);
  const auto stats = tail_stats(rank(generate(z)));
  const double got =
      static_cast<double>(stats.freq1_count) / static_cast<double>(stats.unique_count);
  EXPECT_NEAR(got, expected, 0.01);
}

TEST(SynthTest, DeterministicAndThreadIndependent) {
  const auto z = spec(5000, 1.0, 3.0, 300'000, 99);
  const auto one = generate(z, 1);
  EXPECT_EQ(one, generate(z, 1));
  EXPECT_EQ(one, generate(z, 4));
  EXPECT_EQ(one, generate(z, 8));
  auto other = z;
  other.seed = 100;
  EXPECT_FALSE(one == generate(other, 1));
}

TEST(SynthTest, TokenOffsetShiftsNames) {
  auto z = spec(4, 0.0, 0.0, 1000, 3);
  z.token_offset = 2;
  z.token_prefix = "x";
  const auto t = generate(z);
  for (const auto& [token, count] : t) {
    (void)count;
    EXPECT_TRUE(token == "x3" || token == "x4" || token == "x5" || token == "x6") << token;
  }
}

TEST(SynthTest, RejectsBadSpecs) {
  EXPECT_THROW(generate(spec(0, 1.0, 0.0, 1, 0)), InvalidArgument);
  EXPECT_THROW(generate(spec(1, 1.0, 0.0, 0, 0)), InvalidArgument);
  EXPECT_THROW(generate(spec(1, -1.0, 0.0, 1, 0)), InvalidArgument);
  EXPECT_THROW(generate(spec(1, NAN, 0.0, 1, 0)), InvalidArgument);
  EXPECT_THROW(generate(spec(1, 1.0, -0.5, 1, 0)), InvalidArgument);
}

TEST(FromProfileTest, RoundTripsThroughAnonymize) {
  const std::vector<std::uint64_t> counts{9, 4, 4, 2, 1, 1, 1};
  const auto t = from_profile(counts);
  EXPECT_EQ(anonymize(t).descending_counts, counts);
  EXPECT_EQ(t.total_users(), 22u);
  EXPECT_EQ(t.count("p1"), 9u);

  const auto stats = tail_stats(rank(from_profile(std::vector<std::uint64_t>{5, 3, 1, 1})));
  EXPECT_EQ(stats.unique_count, 4u);
  EXPECT_EQ(stats.freq1_count, 2u);
  EXPECT_EQ(stats.freq_gt1_count, 2u);
  EXPECT_EQ(stats.total_users, 10u);

  const auto single = from_profile(std::vector<std::uint64_t>{1});
  EXPECT_EQ(single.total_users(), 1u);
  EXPECT_EQ(single.unique_count(), 1u);
}

TEST(FromProfileTest, RejectsInvalidCounts) {
  EXPECT_THROW(from_profile(std::vector<std::uint64_t>{1, 2}), InvalidArgument);
  EXPECT_THROW(from_profile(std::vector<std::uint64_t>{3, 0}), InvalidArgument);
}

TEST(PresetTest, AllNamedPresetsResolve) {
  for (const auto& name : preset_names()) {
    const auto p = preset(name, 1);
    ASSERT_TRUE(p.has_value()) << name;
    EXPECT_NO_THROW(validate(*p));
  }
  EXPECT_FALSE(preset("nope", 1).has_value());
}

TEST(PresetTest, HotmailProfileShape) {
  const auto counts = hotmail_like_profile();
  EXPECT_EQ(counts.size(), 6670u);
  EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}), 7300u);
  EXPECT_EQ(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 1; }), 420);
  EXPECT_EQ(std::count(counts.begin(), counts.end(), 1u), 6250);
  EXPECT_TRUE(std::is_sorted(counts.rbegin(), counts.rend()));
}

}  // namespace
}  // namespace leakguess
