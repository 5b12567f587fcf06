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

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "leakguess/error.hpp"
#include "leakguess/rng.hpp"
#include "leakguess/sampling.hpp"

namespace leakguess {

namespace {

// Equal distributions whose probabilities come from different divisions
// can sum to a few ulps instead of exactly 0.
constexpr double kRoundingResidue = 1e-12;

}  // namespace

double entropy(const RankedDistribution& p) {
  const double total = static_cast<double>(p.total_users());
  double h = 0.0;
  for (const auto& e : p.entries()) {
    const double pi = static_cast<double>(e.count) / total;
    h -= pi * std::log2(pi);
  }
  return h;
}

double kl_divergence(const RankedDistribution& q, const RankedDistribution& p) {
  const double q_total = static_cast<double>(q.total_users());
  const double p_total = static_cast<double>(p.total_users());
  double d = 0.0;
  for (const auto& e : q.entries()) {
    const std::uint64_t pc = p.count_of(e.token);
    if (pc == 0) return std::numeric_limits<double>::infinity();
    const double qi = static_cast<double>(e.count) / q_total;
    const double pi = static_cast<double>(pc) / p_total;
    d += qi * std::log2(qi / pi);
  }
  return d < kRoundingResidue ? 0.0 : d;
}

SanovReport sanov_report(std::uint64_t n, std::uint64_t support_size, double alpha) {
  if (n == 0) throw InvalidArgument("sanov: n must be >= 1");
  if (support_size == 0) throw InvalidArgument("sanov: support size must be >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("sanov: alpha must be > 0");
  SanovReport r;
  r.n = n;
  r.support_size = support_size;
  r.alpha = alpha;
  const double nd = static_cast<double>(n);
  const double xd = static_cast<double>(support_size);
  r.log2_bound = xd * std::log2(nd + 1.0) - nd * alpha;
  r.turning_point_n = xd / (alpha * std::numbers::ln2) - 1.0;
  return r;
}

void write_sanov_csv_header(std::ostream& out) {
  out << "n,support_size,alpha,log2_bound,turning_point_n\n";
}

void write_sanov_csv_row(std::ostream& out, const SanovReport& report) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%llu,%llu,%.17g,%.17g,%.17g\n",
                static_cast<unsigned long long>(report.n),
                static_cast<unsigned long long>(report.support_size), report.alpha,
                report.log2_bound, report.turning_point_n);
  out << buf;
}

double atypicality_rate(const RankedDistribution& p0, std::uint64_t n, double alpha,
                        std::uint64_t trials, std::uint64_t seed) {
  if (trials == 0) throw InvalidArgument("atypicality_rate: trials must be >= 1");
  if (n == 0) throw InvalidArgument("atypicality_rate: n must be >= 1");
  const RowSampler sampler(p0);
  const auto& entries = p0.entries();
  const double p_total = static_cast<double>(p0.total_users());
  const double nd = static_cast<double>(n);

  std::uint64_t atypical = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Xoshiro256 rng(derive_trial_seed(seed, t));
    double d = 0.0;
    for (const auto& [r, c] : sampler.with_replacement(n, rng)) {
      const double qi = static_cast<double>(c) / nd;
      const double pi = static_cast<double>(entries[r].count) / p_total;
      d += qi * std::log2(qi / pi);
    }
    if (d < kRoundingResidue) d = 0.0;
    if (d > alpha) ++atypical;
  }
  return static_cast<double>(atypical) / static_cast<double>(trials);
}

}  // namespace leakguess
