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

#include <algorithm>
#include <cmath>
#include <thread>

#include "leakguess/error.hpp"
#include "leakguess/rng.hpp"

namespace leakguess {

namespace {

constexpr std::uint64_t kBlockDraws = 1 << 16;

std::vector<double> cumulative_weights(const ZipfMandelbrotSpec& spec) {
  std::vector<double> cdf(spec.vocab_size);
  double running = 0.0;
  for (std::uint64_t r = 1; r <= spec.vocab_size; ++r) {
    running += std::pow(static_cast<double>(r) + spec.shift, -spec.exponent);
    cdf[r - 1] = running;
  }
  return cdf;
}

void draw_block(const std::vector<double>& cdf, std::uint64_t seed, std::uint64_t draws,
                std::vector<std::uint64_t>& counts) {
  Xoshiro256 rng(seed);
  const double total = cdf.back();
  for (std::uint64_t i = 0; i < draws; ++i) {
    const double u = rng.unit() * total;
    auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    if (idx >= cdf.size()) idx = cdf.size() - 1;
    ++counts[idx];
  }
}

}  // namespace

void validate(const ZipfMandelbrotSpec& spec) {
  if (spec.vocab_size == 0) throw InvalidArgument("synth: vocab size must be positive");
  if (spec.users == 0) throw InvalidArgument("synth: users must be positive");
  if (!std::isfinite(spec.exponent) || spec.exponent < 0.0) {
    throw InvalidArgument("synth: exponent must be finite and >= 0");
  }
  if (!std::isfinite(spec.shift) || spec.shift < 0.0) {
    throw InvalidArgument("synth: shift must be finite and >= 0");
  }
}

std::vector<double> rank_probabilities(const ZipfMandelbrotSpec& spec) {
  validate(spec);
  auto p = cumulative_weights(spec);
  const double total = p.back();
  for (std::size_t i = p.size(); i-- > 1;) p[i] -= p[i - 1];
  for (auto& x : p) x /= total;
  return p;
}

FrequencyTable generate(const ZipfMandelbrotSpec& spec, unsigned threads) {
  validate(spec);
  const auto cdf = cumulative_weights(spec);
  const std::uint64_t blocks = (spec.users + kBlockDraws - 1) / kBlockDraws;
  const auto block_size = [&](std::uint64_t b) {
    return std::min(kBlockDraws, spec.users - b * kBlockDraws);
  };

  const unsigned workers = static_cast<unsigned>(
      std::clamp<std::uint64_t>(threads == 0 ? 1 : threads, 1, blocks));
  std::vector<std::vector<std::uint64_t>> partial(workers,
                                                  std::vector<std::uint64_t>(spec.vocab_size, 0));
  auto work = [&](unsigned w) {
    for (std::uint64_t b = w; b < blocks; b += workers) {
      draw_block(cdf, derive_trial_seed(spec.seed, b), block_size(b), partial[w]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  FrequencyTable table;
  for (std::uint64_t r = 0; r < spec.vocab_size; ++r) {
    std::uint64_t c = 0;
    for (const auto& p : partial) c += p[r];
    if (c > 0) table.add(spec.token_prefix + std::to_string(r + 1 + spec.token_offset), c);
  }
  return table;
}

FrequencyTable from_profile(std::span<const std::uint64_t> descending_counts,
                            std::string_view token_prefix) {
  FrequencyTable table;
  for (std::size_t i = 0; i < descending_counts.size(); ++i) {
    const auto c = descending_counts[i];
    if (c == 0) throw InvalidArgument("profile counts must be positive");
    if (i > 0 && c > descending_counts[i - 1]) {
      throw InvalidArgument("profile counts must be non-increasing");
    }
    table.add(std::string(token_prefix) + std::to_string(i + 1), c);
  }
  return table;
}

namespace {

struct PresetRow {
  std::string_view name;
  std::uint64_t vocab;
  double exponent;
  double shift;
  std::uint64_t users;
};

// Exponents chosen so the expected #unique/#users lands near the ratios
// reported for the corresponding real leaks (0.92, 0.91, 0.44). The
// rockyou-like row keeps a 10^5 vocabulary at 10^6 users, which caps its
// ratio near 0.065; its exponent instead gives a steep head.
constexpr PresetRow kPresets[] = {
    {"rockyou-like", 100'000, 1.10, 0.0, 1'000'000},
    {"flirtlife-like", 1'000'000, 0.96, 0.0, 98'912},
    {"hotmail-like", 1'000'000, 0.74, 0.0, 7'300},
    {"compubits-like", 1'000'000, 0.80, 0.0, 1'795},
};

}  // namespace

std::optional<ZipfMandelbrotSpec> preset(std::string_view name, std::uint64_t seed) {
  for (const auto& row : kPresets) {
    if (row.name == name) {
      ZipfMandelbrotSpec spec;
      spec.vocab_size = row.vocab;
      spec.exponent = row.exponent;
      spec.shift = row.shift;
      spec.users = row.users;
      spec.seed = seed;
      return spec;
    }
  }
  return std::nullopt;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& row : kPresets) out.emplace_back(row.name);
  return out;
}

std::vector<std::uint64_t> hotmail_like_profile() {
  constexpr std::size_t kRepeated = 420;
  constexpr std::size_t kSingles = 6250;
  constexpr std::uint64_t kUsers = 7300;
  // Every repeated password gets 2 users; the remaining users are spread
  // over the head with 1/rank weights by largest remainder.
  const std::uint64_t extra = kUsers - kSingles - 2 * kRepeated;
  double harmonic = 0.0;
  for (std::size_t i = 1; i <= kRepeated; ++i) harmonic += 1.0 / static_cast<double>(i);

  std::vector<std::uint64_t> counts(kRepeated, 2);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < kRepeated; ++i) {
    const double share = static_cast<double>(extra) / (static_cast<double>(i + 1) * harmonic);
    const auto whole = static_cast<std::uint64_t>(share);
    counts[i] += whole;
    assigned += whole;
    remainders.emplace_back(share - static_cast<double>(whole), i);
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (std::size_t k = 0; assigned < extra; ++k, ++assigned) ++counts[remainders[k].second];

  std::sort(counts.begin(), counts.end(), std::greater<>());
  counts.resize(kRepeated + kSingles, 1);
  return counts;
}

}  // namespace leakguess
