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

#include "leakguess/dist.hpp"

#include <algorithm>

#include "leakguess/error.hpp"
#include "leakguess/rng.hpp"

namespace leakguess {

RankedDistribution::RankedDistribution(std::vector<RankedEntry> ordered) {
  if (ordered.empty()) throw InvalidArgument("empty distribution");
  auto data = std::make_shared<Data>();
  data->entries = std::move(ordered);
  data->index.reserve(data->entries.size());
  for (std::size_t i = 0; i < data->entries.size(); ++i) {
    const auto& e = data->entries[i];
    if (e.count == 0) throw InvalidArgument("zero count in distribution");
    if (i > 0 && e.count > data->entries[i - 1].count) {
      throw InvalidArgument("counts must be non-increasing along the ranking");
    }
    if (!data->index.emplace(e.token, i).second) {
      throw InvalidArgument("duplicate token in distribution");
    }
    data->total += e.count;
  }
  data_ = std::move(data);
}

const RankedEntry& RankedDistribution::at_rank(std::size_t rank) const {
  if (rank == 0 || rank > unique_count()) {
    throw InvalidArgument("rank " + std::to_string(rank) + " outside [1, " +
                          std::to_string(unique_count()) + "]");
  }
  return data_->entries[rank - 1];
}

std::uint64_t RankedDistribution::count_of(std::string_view token) const noexcept {
  auto it = data_->index.find(token);
  return it == data_->index.end() ? 0 : data_->entries[it->second].count;
}

std::optional<std::size_t> RankedDistribution::rank_of(std::string_view token) const noexcept {
  auto it = data_->index.find(token);
  if (it == data_->index.end()) return std::nullopt;
  return it->second + 1;
}

FrequencyTable RankedDistribution::to_table() const {
  FrequencyTable table;
  for (const auto& e : entries()) table.add(e.token, e.count);
  return table;
}

RankedDistribution rank(const FrequencyTable& table, const TieBreak& tie_break) {
  if (table.empty()) throw InvalidArgument("empty distribution");
  std::vector<RankedEntry> ordered;
  ordered.reserve(table.unique_count());
  for (const auto& [token, count] : table) ordered.push_back({token, count});
  std::sort(ordered.begin(), ordered.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.token < b.token;
  });

  if (tie_break.kind == TieBreak::Kind::kSeededShuffle) {
    // Fisher-Yates within each run of equal counts, starting from the
    // lexicographic order so the result depends only on the seed.
    Xoshiro256 rng(tie_break.seed);
    std::size_t begin = 0;
    while (begin < ordered.size()) {
      std::size_t end = begin + 1;
      while (end < ordered.size() && ordered[end].count == ordered[begin].count) ++end;
      for (std::size_t i = end - begin; i > 1; --i) {
        std::swap(ordered[begin + i - 1], ordered[begin + rng.below(i)]);
      }
      begin = end;
    }
  }
  return RankedDistribution(std::move(ordered));
}

namespace {

TailStats tail_from_counts(std::size_t unique, std::uint64_t freq1, std::uint64_t total) {
  TailStats s;
  s.unique_count = unique;
  s.freq1_count = freq1;
  s.freq_gt1_count = unique - freq1;
  s.total_users = total;
  if (total > 0) s.unique_per_user = static_cast<double>(unique) / static_cast<double>(total);
  if (unique > 0) s.users_per_unique = static_cast<double>(total) / static_cast<double>(unique);
  return s;
}

}  // namespace

TailStats tail_stats(const RankedDistribution& dist) {
  std::uint64_t freq1 = 0;
  for (const auto& e : dist.entries()) freq1 += e.count == 1 ? 1 : 0;
  return tail_from_counts(dist.unique_count(), freq1, dist.total_users());
}

TailStats tail_stats(const AnonProfile& profile) {
  const auto freq1 = static_cast<std::uint64_t>(
      std::count(profile.descending_counts.begin(), profile.descending_counts.end(), 1U));
  return tail_from_counts(profile.descending_counts.size(), freq1, profile.total_users);
}

double probability(const RankedDistribution& dist, std::size_t rank) {
  return static_cast<double>(dist.at_rank(rank).count) /
         static_cast<double>(dist.total_users());
}

std::vector<std::uint64_t> cumulative_counts(const RankedDistribution& dist) {
  std::vector<std::uint64_t> out;
  out.reserve(dist.unique_count());
  std::uint64_t running = 0;
  for (const auto& e : dist.entries()) out.push_back(running += e.count);
  return out;
}

}  // namespace leakguess
