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
#include <utility>
#include <vector>

#include "leakguess/dist.hpp"
#include "leakguess/ingest.hpp"
#include "leakguess/rng.hpp"

namespace leakguess {

enum class SampleMode { kWithReplacement, kWithoutReplacement };

const char* to_string(SampleMode mode) noexcept;

/// Where a sample's randomness came from: the generator is seeded with
/// derive_trial_seed(base_seed, trial_index).
struct SeedSpec {
  std::uint64_t base_seed = 0;
  std::uint64_t trial_index = 0;

  std::uint64_t generator_seed() const noexcept {
    return derive_trial_seed(base_seed, trial_index);
  }
};

/// n user rows drawn from a source table.
struct Sample {
  FrequencyTable table;
  std::uint64_t n = 0;
  SampleMode mode = SampleMode::kWithReplacement;
  std::uint64_t base_seed = 0;
  std::uint64_t trial_index = 0;
};

/// A without-replacement draw and the rows left behind. For every token
/// sample.count + remainder.count == source.count.
struct SplitResult {
  Sample sample;
  FrequencyTable remainder;
};

/// (rank index, drawn count) pairs in ascending rank index; 0-based ranks.
using RankCounts = std::vector<std::pair<std::size_t, std::uint64_t>>;

/// Draws user rows from a ranked distribution. Each user row is equally
/// likely, so a token's chance is its count / total_users. Keeps the
/// cumulative count array so repeated trials do not rebuild it.
class RowSampler {
 public:
  explicit RowSampler(RankedDistribution dist);

  const RankedDistribution& distribution() const noexcept { return dist_; }

  /// n independent row draws. O(n log U).
  RankCounts with_replacement(std::uint64_t n, Xoshiro256& rng) const;

  /// n distinct rows, uniformly over all subsets of size n. Throws
  /// InvalidArgument if n > total_users. O(U + n log U).
  RankCounts without_replacement(std::uint64_t n, Xoshiro256& rng) const;

  FrequencyTable to_table(const RankCounts& counts) const;

 private:
  RankedDistribution dist_;
  std::vector<std::uint64_t> cumulative_;
};

/// Throws InvalidArgument for an empty source with n > 0.
Sample sample_with_replacement(const FrequencyTable& source, std::uint64_t n, SeedSpec seed);

/// Throws InvalidArgument when n > source.total_users().
SplitResult sample_without_replacement(const FrequencyTable& source, std::uint64_t n,
                                       SeedSpec seed);

/// Exact multiset check: sample + remainder reproduces source token by token.
bool conserves(const FrequencyTable& source, const SplitResult& split);

}  // namespace leakguess
