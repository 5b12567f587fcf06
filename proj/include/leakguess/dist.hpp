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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "leakguess/ingest.hpp"

namespace leakguess {

struct RankedEntry {
  std::string token;
  std::uint64_t count = 0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// How equal-count tokens are ordered.
struct TieBreak {
  enum class Kind { kLexicographic, kSeededShuffle };
  Kind kind = Kind::kLexicographic;
  std::uint64_t seed = 0;
};

/// A frequency table laid out by rank: rank 1 is the most common token.
/// Counts are non-increasing along the list and sum to total_users().
/// Immutable; copies share storage.
class RankedDistribution {
 public:
  /// Builds from entries already in rank order. Throws InvalidArgument if
  /// the list is empty, a count is zero, a token repeats, or the counts
  /// increase anywhere.
  explicit RankedDistribution(std::vector<RankedEntry> ordered);

  std::size_t unique_count() const noexcept { return data_->entries.size(); }
  std::uint64_t total_users() const noexcept { return data_->total; }
  const std::vector<RankedEntry>& entries() const noexcept { return data_->entries; }

  /// 1-indexed; throws InvalidArgument when out of range.
  const RankedEntry& at_rank(std::size_t rank) const;

  std::uint64_t count_of(std::string_view token) const noexcept;
  std::optional<std::size_t> rank_of(std::string_view token) const noexcept;

  FrequencyTable to_table() const;

  friend bool operator==(const RankedDistribution& a, const RankedDistribution& b) {
    return a.entries() == b.entries();
  }

 private:
  struct Data {
    std::vector<RankedEntry> entries;
    std::unordered_map<std::string_view, std::size_t> index;
    std::uint64_t total = 0;
  };
  std::shared_ptr<const Data> data_;
};

/// Orders a table by descending count. Throws InvalidArgument("empty
/// distribution") for an empty table.
RankedDistribution rank(const FrequencyTable& table, const TieBreak& tie_break = {});

struct TailStats {
  std::uint64_t unique_count = 0;
  std::uint64_t freq1_count = 0;
  std::uint64_t freq_gt1_count = 0;
  std::uint64_t total_users = 0;
  /// #unique / #users.
  double unique_per_user = 0.0;
  /// #users / #unique.
  double users_per_unique = 0.0;
};

TailStats tail_stats(const RankedDistribution& dist);
TailStats tail_stats(const AnonProfile& profile);

/// count at `rank` / total_users. Throws InvalidArgument for a bad rank.
double probability(const RankedDistribution& dist, std::size_t rank);

/// Running sums of counts along the ranking; back() == total_users().
std::vector<std::uint64_t> cumulative_counts(const RankedDistribution& dist);

}  // namespace leakguess
