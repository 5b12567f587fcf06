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

#include "leakguess/curves.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "leakguess/error.hpp"
#include "leakguess/rng.hpp"
#include "leakguess/synth.hpp"
#include "oracle.hpp"

namespace leakguess {
namespace {

FrequencyTable table_of(std::initializer_list<std::pair<const char*, std::uint64_t>> items) {
  FrequencyTable t;
  for (const auto& [k, v] : items) t.add(k, v);
  return t;
}

std::vector<double> doubles(std::initializer_list<double> v) { return v; }

const FrequencyTable kP0 = table_of({{"a", 5}, {"b", 3}, {"c", 1}, {"d", 1}});

TEST(OptimalCurveTest, Users) {
  EXPECT_EQ(optimal_curve(rank(kP0)).values, doubles({5, 8, 9, 10}));
}

TEST(OptimalCurveTest, Probability) {
  const auto c = optimal_curve(rank(kP0), Unit::kProbability);
  ASSERT_EQ(c.size(), 4U);
  EXPECT_DOUBLE_EQ(c.values[0], 0.5);
  EXPECT_DOUBLE_EQ(c.values[1], 0.8);
  EXPECT_DOUBLE_EQ(c.values[2], 0.9);
  EXPECT_DOUBLE_EQ(c.values[3], 1.0);
}

TEST(AttackCurveTest, AbsentTokensContributeNothing) {
  const GuessOrder order({"b", "a", "e"});
  EXPECT_EQ(attack_curve(order, kP0).values, doubles({3, 8, 8}));
}

TEST(AttackCurveTest, OwnBestOrderIsOptimal) {
  const auto r = rank(kP0);
  EXPECT_EQ(attack_curve(reorder(r, Ordering::kBest), kP0).values, optimal_curve(r).values);
}

TEST(AttackCurveTest, EmptyTargetGivesZeros) {
  const GuessOrder order({"a", "b"});
  EXPECT_EQ(attack_curve(order, {}, Unit::kProbability).values, doubles({0, 0}));
}

TEST(GapCurveTest, HandSum) {
  const GuessOrder order({"b", "a", "d"});
  EXPECT_EQ(gap_curve(rank(kP0), order).values, doubles({2, 0, 0}));
}

TEST(GapCurveTest, BestOrderIsZeroInBothModes) {
  const auto r = rank(kP0);
  for (auto mode : {GapExtension::kTruncate, GapExtension::kExtendOptimal}) {
    EXPECT_EQ(gap_curve(r, reorder(r, Ordering::kBest), mode).values, doubles({0, 0, 0, 0}));
  }
}

TEST(GapCurveTest, ExtendOptimalReachesZero) {
  const GuessOrder order({"c", "x"});
  const auto truncated = gap_curve(rank(kP0), order);
  EXPECT_EQ(truncated.values, doubles({4, 7}));
  // a, b, d are appended in p0 order.
  const auto extended = gap_curve(rank(kP0), order, GapExtension::kExtendOptimal);
  EXPECT_EQ(extended.values, doubles({4, 7, 3, 1, 0}));
  EXPECT_EQ(extended.values.back(), 0.0);
}

TEST(GapCurveTest, ProbabilityUnit) {
  const GuessOrder order({"b", "a", "d"});
  const auto c = gap_curve(rank(kP0), order, GapExtension::kTruncate, Unit::kProbability);
  EXPECT_DOUBLE_EQ(c.values[0], 0.2);
}

TEST(ReorderTest, BestWorstRandom) {
  const auto r = rank(table_of({{"a", 5}, {"b", 3}}));
  EXPECT_EQ(reorder(r, Ordering::kBest).tokens(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(reorder(r, Ordering::kWorst).tokens(), (std::vector<std::string>{"b", "a"}));

  FrequencyTable big;
  for (int i = 0; i < 100; ++i) big.add("t" + std::to_string(i), 1 + i);
  const auto rb = rank(big);
  const auto x = reorder(rb, Ordering::kRandom, 17);
  EXPECT_EQ(x.tokens(), reorder(rb, Ordering::kRandom, 17).tokens());
  EXPECT_NE(x.tokens(), reorder(rb, Ordering::kRandom, 18).tokens());
  EXPECT_EQ(x.seed(), std::optional<std::uint64_t>(17));
  auto sorted = x.tokens();
  std::sort(sorted.begin(), sorted.end());
  auto best = reorder(rb, Ordering::kBest).tokens();
  std::sort(best.begin(), best.end());
  EXPECT_EQ(sorted, best);
}

TEST(ReorderTest, WorstReversesTieBreakToo) {
  const auto r = rank(table_of({{"x", 1}, {"y", 1}, {"z", 2}}));
  EXPECT_EQ(reorder(r, Ordering::kWorst).tokens(), (std::vector<std::string>{"y", "x", "z"}));
}

TEST(GuessOrderTest, RejectsDuplicates) {
  EXPECT_THROW(GuessOrder({"a", "a"}), InvalidArgument);
}

TEST(GuessCurveTest, AtClampsBeyondEnd) {
  GuessCurve c;
  c.values = {1, 4, 6};
  EXPECT_EQ(c.at(0), 0.0);
  EXPECT_EQ(c.at(2), 4.0);
  EXPECT_EQ(c.at(50), 6.0);
  EXPECT_EQ(GuessCurve{}.at(3), 0.0);
}

FrequencyTable random_table(Xoshiro256& rng, std::size_t max_unique, std::uint64_t max_count,
                            std::size_t alphabet) {
  FrequencyTable t;
  const auto u = 1 + rng.below(max_unique);
  while (t.unique_count() < u) {
    const std::string token = "k" + std::to_string(rng.below(alphabet));
    if (!t.contains(token)) t.add(token, 1 + rng.below(max_count));
  }
  return t;
}

GuessOrder random_order(Xoshiro256& rng, std::size_t alphabet) {
  std::vector<std::string> pool;
  for (std::size_t i = 0; i < alphabet; ++i) pool.push_back("k" + std::to_string(i));
  for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.below(i)]);
  pool.resize(1 + rng.below(alphabet));
  return GuessOrder(pool);
}

std::vector<double> as_doubles(const std::vector<std::int64_t>& v) {
  return {v.begin(), v.end()};
}

TEST(CurveOracleTest, MatchesBruteForceOnSmallTables) {
  Xoshiro256 rng(31337);
  for (int round = 0; round < 300; ++round) {
    const auto target = random_table(rng, 10, 6, 14);
    const auto order = random_order(rng, 14);
    const auto m = oracle::to_map(target);
    ASSERT_EQ(optimal_curve(rank(target)).values, as_doubles(oracle::naive_f(m)));
    ASSERT_EQ(attack_curve(order, target).values, as_doubles(oracle::naive_g(order.tokens(), m)));
    ASSERT_EQ(gap_curve(rank(target), order).values,
              as_doubles(oracle::naive_h(m, order.tokens())));
  }
}

TEST(CurveOracleTest, DominanceAndNonNegativeGap) {
  Xoshiro256 rng(4242);
  for (int round = 0; round < 300; ++round) {
    const auto target = random_table(rng, 40, 50, 60);
    const auto order = random_order(rng, 60);
    const auto f = optimal_curve(rank(target));
    const auto g = attack_curve(order, target);
    for (std::size_t i = 0; i < std::min(f.size(), g.size()); ++i) ASSERT_LE(g.values[i], f.values[i]);
    for (auto mode : {GapExtension::kTruncate, GapExtension::kExtendOptimal}) {
      for (double h : gap_curve(rank(target), order, mode).values) ASSERT_GE(h, 0.0);
    }
    // F increments never grow.
    for (std::size_t i = 2; i < f.size(); ++i) {
      ASSERT_LE(f.values[i] - f.values[i - 1], f.values[i - 1] - f.values[i - 2]);
    }
  }
}

TEST(CurveOracleTest, AveragedOrderingsAreRanked) {
  // Distinct counts so best and worst are unambiguous.
  FrequencyTable p0;
  for (int i = 1; i <= 40; ++i) p0.add("t" + std::to_string(i), static_cast<std::uint64_t>(i * i));
  const auto r = rank(p0);
  const auto best = gap_curve(r, reorder(r, Ordering::kBest));
  const auto worst = gap_curve(r, reorder(r, Ordering::kWorst));
  std::vector<double> mean(r.unique_count(), 0.0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto c = gap_curve(r, reorder(r, Ordering::kRandom, seed));
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += c.values[i] / 100.0;
  }
  for (std::size_t i = 0; i < mean.size(); ++i) {
    EXPECT_LE(best.values[i], mean[i]);
    EXPECT_LE(mean[i], worst.values[i]);
  }
}

TEST(PlateauTest, WorstOrderOnProfile) {
  // 3 repeated passwords and 5 singletons: worst order climbs for 3 guesses,
  // holds while the singletons pair off, then falls.
  const std::vector<std::uint64_t> counts = {4, 3, 2, 1, 1, 1, 1, 1};
  const auto r = rank(from_profile(counts));
  const auto h = gap_curve(r, reorder(r, Ordering::kWorst));
  EXPECT_EQ(h.values, doubles({3, 5, 6, 6, 6, 5, 3, 0}));
  const auto p = plateau_report(h);
  EXPECT_EQ(p.max_value, 6.0);
  EXPECT_EQ(p.first_argmax, 3U);
  EXPECT_EQ(p.last_argmax, 5U);
  const auto segs = stable_segments(h, 2);
  ASSERT_EQ(segs.size(), 1U);
  EXPECT_EQ(segs[0].begin_g, 3U);
  EXPECT_EQ(segs[0].end_g, 5U);
}

TEST(CurveCsvTest, LongFormat) {
  GuessCurve c;
  c.values = {2, 5};
  c.kind = CurveKind::kAttack;
  c.trial = 3;
  GuessCurve p;
  p.values = {0.25};
  p.kind = CurveKind::kGap;
  p.unit = Unit::kProbability;
  std::ostringstream out;
  const std::vector<GuessCurve> curves = {c, p};
  write_curve_csv(out, curves);
  EXPECT_EQ(out.str(),
            "trial,g,value,kind,unit\n3,1,2,G,users\n3,2,5,G,users\n0,1,0.25,H,probability\n");
}

}  // namespace
}  // namespace leakguess
