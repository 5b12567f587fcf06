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

// Synthetic heavy-tailed datasets. Rank r in 1..V is drawn with probability
// proportional to 1 / (r + shift)^exponent (Zipf-Mandelbrot) and becomes the
// token "<prefix><r + token_offset>".

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leakguess/ingest.hpp"

namespace leakguess {

struct ZipfMandelbrotSpec {
  std::uint64_t vocab_size = 1;
  double exponent = 1.0;
  double shift = 0.0;
  std::uint64_t users = 1;
  std::uint64_t seed = 0;
  /// Added to the rank when naming tokens. Two specs with offsets d apart
  /// over vocab V share V - d token names.
  std::uint64_t token_offset = 0;
  std::string token_prefix = "w";
};

/// Throws InvalidArgument on V == 0, users == 0, negative or non-finite
/// exponent/shift.
void validate(const ZipfMandelbrotSpec& spec);

/// Normalized rank probabilities, index 0 is rank 1.
std::vector<double> rank_probabilities(const ZipfMandelbrotSpec& spec);

/// `users` i.i.d. draws by inverse CDF. Draws are made in fixed blocks, each
/// with its own derived seed, so the table depends only on `spec` and not
/// on `threads`.
FrequencyTable generate(const ZipfMandelbrotSpec& spec, unsigned threads = 1);

/// A table whose counts are exactly `descending_counts`, under synthetic
/// tokens "<prefix>1", "<prefix>2", ... Throws InvalidArgument unless the
/// counts are positive and non-increasing.
FrequencyTable from_profile(std::span<const std::uint64_t> descending_counts,
                            std::string_view token_prefix = "p");

/// Named generator settings that mimic the head and tail of well-known
/// leaks at desk scale: "rockyou-like", "flirtlife-like", "hotmail-like",
/// "compubits-like".
std::optional<ZipfMandelbrotSpec> preset(std::string_view name, std::uint64_t seed);
std::vector<std::string> preset_names();

/// 7300 users over 6670 passwords: 420 passwords used more than once and
/// 6250 used exactly once. Deterministic.
std::vector<std::uint64_t> hotmail_like_profile();

}  // namespace leakguess
