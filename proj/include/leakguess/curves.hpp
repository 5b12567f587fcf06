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

// Guess curves. With tokens guessed in some order, a curve records after
// each guess g how many users of a dataset have been compromised:
//
//   optimal  F(g) = sum of the g largest counts of the dataset itself
//   attack   G(g) = sum of target counts of the first g guessed tokens
//   gap      H(g) = sum_k [ p0(best k-th token) - p0(k-th guessed token) ]
//
// F is the pointwise maximum of every G against the same target, so H >= 0.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leakguess/dist.hpp"
#include "leakguess/ingest.hpp"

namespace leakguess {

enum class Ordering { kBest, kWorst, kRandom };
enum class CurveKind { kOptimal, kAttack, kGap };
enum class Unit { kUsers, kProbability };
enum class GapExtension { kTruncate, kExtendOptimal };

const char* to_string(Ordering o) noexcept;
const char* to_string(CurveKind k) noexcept;
const char* to_string(Unit u) noexcept;
const char* to_string(GapExtension e) noexcept;
std::optional<Ordering> parse_ordering(std::string_view text) noexcept;
std::optional<Unit> parse_unit(std::string_view text) noexcept;
std::optional<GapExtension> parse_gap_extension(std::string_view text) noexcept;

/// A sequence of distinct tokens to guess, with where it came from.
class GuessOrder {
 public:
  /// Throws InvalidArgument on a repeated token.
  GuessOrder(std::vector<std::string> tokens, std::string source_id = {},
             Ordering ordering = Ordering::kBest, std::optional<std::uint64_t> seed = {});

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  const std::string& source_id() const noexcept { return source_id_; }
  Ordering ordering() const noexcept { return ordering_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }

 private:
  std::vector<std::string> tokens_;
  std::string source_id_;
  Ordering ordering_;
  std::optional<std::uint64_t> seed_;
};

/// values[g-1] is the curve at guess g, for g = 1..size().
struct GuessCurve {
  std::vector<double> values;
  CurveKind kind = CurveKind::kOptimal;
  Unit unit = Unit::kUsers;
  std::string source_id;
  std::string target_id;
  std::uint64_t trial = 0;

  std::size_t size() const noexcept { return values.size(); }

  /// Value after g guesses. Beyond the last guess the curve holds its final
  /// value (no further guesses are made); at g == 0 or on an empty curve it
  /// is 0.
  double at(std::size_t g) const noexcept;
};

/// Best = rank order; worst = the exact reverse of best; random = a
/// Fisher-Yates shuffle of best driven by Xoshiro256(seed).
GuessOrder reorder(const RankedDistribution& ranking, Ordering ordering, std::uint64_t seed = 0,
                   std::string source_id = {});

GuessCurve optimal_curve(const RankedDistribution& dist, Unit unit = Unit::kUsers);

/// Tokens missing from the target contribute nothing. Probability units
/// divide by target.total_users(); an empty target yields zeros.
GuessCurve attack_curve(const GuessOrder& order, const FrequencyTable& target,
                        Unit unit = Unit::kUsers);

/// Shortfall of `order` against guessing p0 optimally, measured on p0.
/// kTruncate stops after the order's last token. kExtendOptimal then
/// appends the p0 tokens not yet guessed, in p0 rank order, so the curve
/// ends at 0.
GuessCurve gap_curve(const RankedDistribution& p0, const GuessOrder& order,
                     GapExtension extend = GapExtension::kTruncate, Unit unit = Unit::kUsers);

/// Where a curve peaks. first/last_argmax are 1-based guess numbers.
struct PlateauReport {
  double max_value = 0.0;
  std::size_t first_argmax = 0;
  std::size_t last_argmax = 0;
};

PlateauReport plateau_report(const GuessCurve& curve);

/// Maximal runs of equal consecutive values, at least `min_length` long.
struct StableSegment {
  std::size_t begin_g = 0;
  std::size_t end_g = 0;
  double value = 0.0;
};

std::vector<StableSegment> stable_segments(const GuessCurve& curve, std::size_t min_length);

/// Long-format curve CSV: "trial,g,value,kind,unit", one row per (trial, g).
/// Kinds print as F/G/H, units as users/probability.
void write_curve_csv(std::ostream& out, std::span<const GuessCurve> curves);

/// Formats a curve value: integers for user counts, %.17g otherwise.
std::string format_value(double value, Unit unit);

}  // namespace leakguess
