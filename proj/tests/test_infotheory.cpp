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

#include "leakguess/infotheory.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "leakguess/error.hpp"
#include "leakguess/rng.hpp"
#include "leakguess/synth.hpp"

namespace leakguess {
namespace {

RankedDistribution dist_of(std::initializer_list<std::pair<const char*, std::uint64_t>> items) {
  FrequencyTable t;
  for (const auto& [k, v] : items) t.add(k, v);
  return rank(t);
}

TEST(EntropyTest, ClosedForms) {
  EXPECT_DOUBLE_EQ(entropy(dist_of({{"a", 3}, {"b", 3}, {"c", 3}, {"d", 3}})), 2.0);
  EXPECT_DOUBLE_EQ(entropy(dist_of({{"a", 7}})), 0.0);
  // -sum p log2 p for p = (.5, .3, .1, .1), evaluated independently.
  EXPECT_NEAR(entropy(dist_of({{"a", 5}, {"b", 3}, {"c", 1}, {"d", 1}})), 1.6854752972273346,
              1e-12);
}

TEST(KlTest, ClosedForms) {
  const auto p = dist_of({{"a", 1}, {"b", 3}});
  const auto q = dist_of({{"a", 1}, {"b", 1}});
  EXPECT_EQ(kl_divergence(p, p), 0.0);
  // 0.5 log2 2 + 0.5 log2(2/3)
  EXPECT_NEAR(kl_divergence(q, p), 0.20751874963942185, 1e-12);
  EXPECT_EQ(kl_divergence(dist_of({{"a", 1}, {"z", 1}}), p),
            std::numeric_limits<double>::infinity());
}

TEST(KlTest, GibbsAndEntropyBoundsOnRandomPairs) {
  Xoshiro256 rng(12);
  for (int round = 0; round < 500; ++round) {
    FrequencyTable a, b;
    const auto u = 1 + rng.below(12);
    for (std::uint64_t i = 0; i < u; ++i) {
      a.add("t" + std::to_string(i), 1 + rng.below(30));
      b.add("t" + std::to_string(i), 1 + rng.below(30));
    }
    const auto pa = rank(a), pb = rank(b);
    ASSERT_GE(kl_divergence(pa, pb), 0.0);
    ASSERT_EQ(kl_divergence(pa, pa), 0.0);
    const double h = entropy(pa);
    ASSERT_GE(h, 0.0);
    ASSERT_LE(h, std::log2(static_cast<double>(pa.unique_count())) + 1e-12);
  }
}

TEST(SanovTest, ClosedForms) {
  const auto tp = sanov_report(12, 1000, 1.0);
  EXPECT_NEAR(tp.turning_point_n, 1441.6950408889634, 1e-9 * 1441.7);

  const auto vacuous = sanov_report(100, 50, 0.5);
  EXPECT_NEAR(vacuous.log2_bound, 282.9105741375897, 1e-9 * 282.9);
  EXPECT_GT(vacuous.log2_bound, 0.0);

  const auto tight = sanov_report(1'000'000, 50, 0.5);
  EXPECT_NEAR(tight.log2_bound, -499003.42149939906, 1e-9 * 499003.4);
}

TEST(SanovTest, HugeInputsStayFinite) {
  const std::uint64_t big = 1ULL << 40;
  const auto r = sanov_report(big, big, 2.0);
  EXPECT_TRUE(std::isfinite(r.log2_bound));
  EXPECT_TRUE(std::isfinite(r.turning_point_n));
  EXPECT_NEAR(r.log2_bound, 0x1p40 * std::log2(0x1p40 + 1.0) - 0x1p41, 1e-9 * 0x1p45);
}

TEST(SanovTest, RejectsNonPositiveInputs) {
  EXPECT_THROW(sanov_report(0, 5, 1.0), InvalidArgument);
  EXPECT_THROW(sanov_report(5, 0, 1.0), InvalidArgument);
  EXPECT_THROW(sanov_report(5, 5, 0.0), InvalidArgument);
  EXPECT_THROW(sanov_report(5, 5, -1.0), InvalidArgument);
}

TEST(SanovTest, CsvRow) {
  std::ostringstream out;
  write_sanov_csv_header(out);
  write_sanov_csv_row(out, sanov_report(1, 1, 1.0));
  EXPECT_EQ(out.str(),
            "n,support_size,alpha,log2_bound,turning_point_n\n"
            "1,1,1,0,0.44269504088896339\n");
}

TEST(AtypicalityTest, HugeAlphaNeverAtypical) {
  const auto p0 = dist_of({{"a", 4}, {"b", 3}, {"c", 2}, {"d", 1}});
  EXPECT_EQ(atypicality_rate(p0, 5, 1e6, 200, 1), 0.0);
}

TEST(AtypicalityTest, ZeroAlphaSmallSampleAlwaysAtypical) {
  // Enumerate all 10 multisets of size 2 over a 4-token p0: every one has
  // positive KL, so the exact probability of exceeding alpha = 0 is 1.
  const double p[4] = {0.4, 0.3, 0.2, 0.1};
  double prob_atypical = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      double kl = 0.0;
      if (i == j) {
        kl = std::log2(1.0 / p[i]);
      } else {
        kl = 0.5 * std::log2(0.5 / p[i]) + 0.5 * std::log2(0.5 / p[j]);
      }
      const double prob = i == j ? p[i] * p[i] : 2 * p[i] * p[j];
      if (kl > 0.0) prob_atypical += prob;
    }
  }
  EXPECT_NEAR(prob_atypical, 1.0, 1e-12);
  const auto p0 = dist_of({{"a", 4}, {"b", 3}, {"c", 2}, {"d", 1}});
  EXPECT_EQ(atypicality_rate(p0, 2, 0.0, 500, 3), 1.0);
}

TEST(AtypicalityTest, RateFallsWithSampleSize) {
  std::vector<std::uint64_t> counts;
  for (std::uint64_t c = 40; c >= 1; c -= 2) counts.push_back(c);
  const auto p0 = rank(from_profile(counts));
  constexpr std::uint64_t kTrials = 2000;
  double previous = 1.0;
  for (std::uint64_t n : {20, 80, 320}) {
    const double rate = atypicality_rate(p0, n, 0.3, kTrials, 77);
    const double sd = std::sqrt(std::max(previous * (1 - previous), 0.25 / kTrials) / kTrials);
    EXPECT_LE(rate, previous + 4 * sd) << "n=" << n;
    previous = rate;
  }
}

TEST(AtypicalityTest, DeterministicAndBoundedBySanov) {
  const auto p0 = dist_of({{"a", 5}, {"b", 3}, {"c", 1}, {"d", 1}});
  EXPECT_EQ(atypicality_rate(p0, 30, 0.2, 300, 9), atypicality_rate(p0, 30, 0.2, 300, 9));
  const auto r = sanov_report(400, p0.unique_count(), 0.5);
  ASSERT_LE(r.log2_bound, 0.0);
  EXPECT_LE(atypicality_rate(p0, 400, 0.5, 1000, 4), std::exp2(r.log2_bound));
}

TEST(AtypicalityTest, RejectsZeroTrials) {
  const auto p0 = dist_of({{"a", 1}});
  EXPECT_THROW(atypicality_rate(p0, 1, 0.1, 0, 0), InvalidArgument);
}

}  // namespace
}  // namespace leakguess
