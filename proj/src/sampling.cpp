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

#include "leakguess/sampling.hpp"

#include <algorithm>

#include "leakguess/error.hpp"

namespace leakguess {

namespace {

// Fenwick tree over per-rank counts supporting "find the row with global
// index u" and point decrements.
class RowIndex {
 public:
  explicit RowIndex(const std::vector<RankedEntry>& entries) : tree_(entries.size() + 1, 0) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const std::size_t node = i + 1;
      tree_[node] += entries[i].count;
      const std::size_t parent = node + (node & (~node + 1));
      if (parent < tree_.size()) tree_[parent] += tree_[node];
    }
    top_bit_ = 1;
    while (top_bit_ * 2 < tree_.size()) top_bit_ *= 2;
  }

  // 0-based rank holding row u, where rows are numbered across ranks in
  // order and u < current total.
  std::size_t find(std::uint64_t u) const {
    std::size_t pos = 0;
    for (std::size_t step = top_bit_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= u) {
        pos = next;
        u -= tree_[next];
      }
    }
    return pos;
  }

  void decrement(std::size_t rank_index) {
    for (std::size_t node = rank_index + 1; node < tree_.size(); node += node & (~node + 1)) {
      --tree_[node];
    }
  }

 private:
  std::vector<std::uint64_t> tree_;
  std::size_t top_bit_ = 1;
};

RankCounts run_length(std::vector<std::size_t>& indices) {
  std::sort(indices.begin(), indices.end());
  RankCounts out;
  for (std::size_t i = 0; i < indices.size();) {
    std::size_t j = i;
    while (j < indices.size() && indices[j] == indices[i]) ++j;
    out.emplace_back(indices[i], j - i);
    i = j;
  }
  return out;
}

}  // namespace

const char* to_string(SampleMode mode) noexcept {
  return mode == SampleMode::kWithReplacement ? "with" : "without";
}

RowSampler::RowSampler(RankedDistribution dist)
    : dist_(std::move(dist)), cumulative_(cumulative_counts(dist_)) {}

RankCounts RowSampler::with_replacement(std::uint64_t n, Xoshiro256& rng) const {
  const std::uint64_t total = dist_.total_users();
  std::vector<std::size_t> picks;
  picks.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t row = rng.below(total);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), row);
    picks.push_back(static_cast<std::size_t>(it - cumulative_.begin()));
  }
  return run_length(picks);
}

RankCounts RowSampler::without_replacement(std::uint64_t n, Xoshiro256& rng) const {
  const std::uint64_t total = dist_.total_users();
  if (n > total) {
    throw InvalidArgument("cannot draw " + std::to_string(n) + " rows without replacement from " +
                          std::to_string(total));
  }
  // Draw whichever side of the split is smaller; the complement of a
  // uniform k-subset is a uniform (total-k)-subset.
  const bool draw_complement = n > total - n;
  const std::uint64_t draws = draw_complement ? total - n : n;

  RowIndex index(dist_.entries());
  std::vector<std::size_t> picks;
  picks.reserve(draws);
  for (std::uint64_t i = 0; i < draws; ++i) {
    const std::size_t r = index.find(rng.below(total - i));
    index.decrement(r);
    picks.push_back(r);
  }
  RankCounts drawn = run_length(picks);
  if (!draw_complement) return drawn;

  RankCounts kept;
  std::size_t d = 0;
  const auto& entries = dist_.entries();
  for (std::size_t r = 0; r < entries.size(); ++r) {
    std::uint64_t c = entries[r].count;
    if (d < drawn.size() && drawn[d].first == r) c -= drawn[d++].second;
    if (c > 0) kept.emplace_back(r, c);
  }
  return kept;
}

FrequencyTable RowSampler::to_table(const RankCounts& counts) const {
  FrequencyTable table;
  const auto& entries = dist_.entries();
  for (const auto& [r, c] : counts) table.add(entries[r].token, c);
  return table;
}

Sample sample_with_replacement(const FrequencyTable& source, std::uint64_t n, SeedSpec seed) {
  Sample out{{}, n, SampleMode::kWithReplacement, seed.base_seed, seed.trial_index};
  if (n == 0) return out;
  if (source.empty()) throw InvalidArgument("cannot sample from an empty table");
  RowSampler sampler(rank(source));
  Xoshiro256 rng(seed.generator_seed());
  out.table = sampler.to_table(sampler.with_replacement(n, rng));
  return out;
}

SplitResult sample_without_replacement(const FrequencyTable& source, std::uint64_t n,
                                       SeedSpec seed) {
  if (n > source.total_users()) {
    throw InvalidArgument("cannot draw " + std::to_string(n) + " rows without replacement from " +
                          std::to_string(source.total_users()));
  }
  SplitResult out{{{}, n, SampleMode::kWithoutReplacement, seed.base_seed, seed.trial_index},
                  source};
  if (n == 0) return out;
  RowSampler sampler(rank(source));
  Xoshiro256 rng(seed.generator_seed());
  out.sample.table = sampler.to_table(sampler.without_replacement(n, rng));
  for (const auto& [token, count] : out.sample.table) out.remainder.remove(token, count);
  return out;
}

bool conserves(const FrequencyTable& source, const SplitResult& split) {
  if (split.sample.table.total_users() + split.remainder.total_users() != source.total_users()) {
    return false;
  }
  for (const auto& [token, count] : split.sample.table) {
    if (!source.contains(token)) return false;
  }
  for (const auto& [token, count] : split.remainder) {
    if (!source.contains(token)) return false;
  }
  for (const auto& [token, count] : source) {
    if (split.sample.table.count(token) + split.remainder.count(token) != count) return false;
  }
  return true;
}

}  // namespace leakguess
