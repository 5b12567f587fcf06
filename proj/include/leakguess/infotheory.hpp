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

// Information measures in bits, and the large-deviation bound on drawing
// an atypical sample:
//
//   P[ D(q^n || p0) > alpha ] <= (n + 1)^|X| * 2^(-n * alpha)
//
// evaluated in log2 so huge n and |X| do not overflow. Its logarithm
// |X| log2(n+1) - n alpha peaks at n* = |X| / (alpha ln 2) - 1 and falls
// from there on.

#include <cstdint>
#include <iosfwd>

#include "leakguess/dist.hpp"

namespace leakguess {

/// Shannon entropy, -sum p log2 p.
double entropy(const RankedDistribution& p);

/// D(q || p) = sum over q's support of q(w) log2(q(w) / p(w)). Returns
/// +infinity when some token of q is missing from p.
double kl_divergence(const RankedDistribution& q, const RankedDistribution& p);

struct SanovReport {
  std::uint64_t n = 0;
  std::uint64_t support_size = 0;
  double alpha = 0.0;
  /// support_size * log2(n + 1) - n * alpha
  double log2_bound = 0.0;
  /// support_size / (alpha ln 2) - 1
  double turning_point_n = 0.0;
};

/// Throws InvalidArgument unless n >= 1, support_size >= 1 and alpha > 0.
SanovReport sanov_report(std::uint64_t n, std::uint64_t support_size, double alpha);

/// "n,support_size,alpha,log2_bound,turning_point_n"
void write_sanov_csv_header(std::ostream& out);
void write_sanov_csv_row(std::ostream& out, const SanovReport& report);

/// Fraction of `trials` with-replacement samples of size n whose empirical
/// distribution lies more than alpha bits (KL) from p0. Trial t draws with
/// Xoshiro256(derive_trial_seed(seed, t)). Throws InvalidArgument if
/// trials == 0 or n == 0.
double atypicality_rate(const RankedDistribution& p0, std::uint64_t n, double alpha,
                        std::uint64_t trials, std::uint64_t seed);

}  // namespace leakguess
