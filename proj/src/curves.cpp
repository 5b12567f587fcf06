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

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <ostream>
#include <string_view>
#include <unordered_set>

#include "leakguess/error.hpp"
#include "leakguess/rng.hpp"

namespace leakguess {

const char* to_string(Ordering o) noexcept {
  switch (o) {
    case Ordering::kBest: return "best";
    case Ordering::kWorst: return "worst";
    case Ordering::kRandom: return "random";
  }
  return "?";
}

const char* to_string(CurveKind k) noexcept {
  switch (k) {
    case CurveKind::kOptimal: return "F";
    case CurveKind::kAttack: return "G";
    case CurveKind::kGap: return "H";
  }
  return "?";
}

const char* to_string(Unit u) noexcept {
  return u == Unit::kUsers ? "users" : "probability";
}

const char* to_string(GapExtension e) noexcept {
  return e == GapExtension::kTruncate ? "truncate" : "extend_optimal";
}

std::optional<Ordering> parse_ordering(std::string_view text) noexcept {
  if (text == "best") return Ordering::kBest;
  if (text == "worst") return Ordering::kWorst;
  if (text == "random") return Ordering::kRandom;
  return std::nullopt;
}

std::optional<Unit> parse_unit(std::string_view text) noexcept {
  if (text == "users") return Unit::kUsers;
  if (text == "probability") return Unit::kProbability;
  return std::nullopt;
}

std::optional<GapExtension> parse_gap_extension(std::string_view text) noexcept {
  if (text == "truncate") return GapExtension::kTruncate;
  if (text == "extend_optimal" || text == "extend") return GapExtension::kExtendOptimal;
  return std::nullopt;
}

GuessOrder::GuessOrder(std::vector<std::string> tokens, std::string source_id,
                       Ordering ordering, std::optional<std::uint64_t> seed)
    : tokens_(std::move(tokens)),
      source_id_(std::move(source_id)),
      ordering_(ordering),
      seed_(seed) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(tokens_.size());
  for (const auto& t : tokens_) {
    if (!seen.insert(t).second) throw InvalidArgument("guess order repeats a token");
  }
}

double GuessCurve::at(std::size_t g) const noexcept {
  if (g == 0 || values.empty()) return 0.0;
  return values[std::min(g, values.size()) - 1];
}

GuessOrder reorder(const RankedDistribution& ranking, Ordering ordering, std::uint64_t seed,
                   std::string source_id) {
  std::vector<std::string> tokens;
  tokens.reserve(ranking.unique_count());
  for (const auto& e : ranking.entries()) tokens.push_back(e.token);
  std::optional<std::uint64_t> used_seed;
  switch (ordering) {
    case Ordering::kBest:
      break;
    case Ordering::kWorst:
      std::reverse(tokens.begin(), tokens.end());
      break;
    case Ordering::kRandom: {
      Xoshiro256 rng(seed);
      for (std::size_t i = tokens.size(); i > 1; --i) {
        std::swap(tokens[i - 1], tokens[rng.below(i)]);
      }
      used_seed = seed;
      break;
    }
  }
  return GuessOrder(std::move(tokens), std::move(source_id), ordering, used_seed);
}

namespace {

double scale(std::int64_t users, Unit unit, std::uint64_t total) {
  if (unit == Unit::kUsers || total == 0) return static_cast<double>(users);
  return static_cast<double>(users) / static_cast<double>(total);
}

}  // namespace

GuessCurve optimal_curve(const RankedDistribution& dist, Unit unit) {
  GuessCurve curve;
  curve.kind = CurveKind::kOptimal;
  curve.unit = unit;
  curve.values.reserve(dist.unique_count());
  std::int64_t running = 0;
  for (const auto& e : dist.entries()) {
    running += static_cast<std::int64_t>(e.count);
    curve.values.push_back(scale(running, unit, dist.total_users()));
  }
  return curve;
}

GuessCurve attack_curve(const GuessOrder& order, const FrequencyTable& target, Unit unit) {
  GuessCurve curve;
  curve.kind = CurveKind::kAttack;
  curve.unit = unit;
  curve.source_id = order.source_id();
  curve.values.reserve(order.size());
  std::int64_t running = 0;
  for (const auto& token : order.tokens()) {
    running += static_cast<std::int64_t>(target.count(token));
    curve.values.push_back(scale(running, unit, target.total_users()));
  }
  return curve;
}

GuessCurve gap_curve(const RankedDistribution& p0, const GuessOrder& order, GapExtension extend,
                     Unit unit) {
  GuessCurve curve;
  curve.kind = CurveKind::kGap;
  curve.unit = unit;
  curve.source_id = order.source_id();

  const auto& best = p0.entries();
  std::vector<std::uint64_t> guessed;
  guessed.reserve(std::max(order.size(), best.size()));
  for (const auto& token : order.tokens()) guessed.push_back(p0.count_of(token));
  if (extend == GapExtension::kExtendOptimal) {
    std::unordered_set<std::string_view> used(order.tokens().begin(), order.tokens().end());
    for (const auto& e : best) {
      if (!used.contains(e.token)) guessed.push_back(e.count);
    }
  }

  curve.values.reserve(guessed.size());
  std::int64_t running = 0;
  for (std::size_t k = 0; k < guessed.size(); ++k) {
    const std::uint64_t optimal = k < best.size() ? best[k].count : 0;
    running += static_cast<std::int64_t>(optimal) - static_cast<std::int64_t>(guessed[k]);
    curve.values.push_back(scale(running, unit, p0.total_users()));
  }
  return curve;
}

PlateauReport plateau_report(const GuessCurve& curve) {
  PlateauReport report;
  if (curve.values.empty()) return report;
  const auto max_it = std::max_element(curve.values.begin(), curve.values.end());
  report.max_value = *max_it;
  report.first_argmax = static_cast<std::size_t>(max_it - curve.values.begin()) + 1;
  for (std::size_t g = curve.values.size(); g >= 1; --g) {
    if (curve.values[g - 1] == report.max_value) {
      report.last_argmax = g;
      break;
    }
  }
  return report;
}

std::vector<StableSegment> stable_segments(const GuessCurve& curve, std::size_t min_length) {
  std::vector<StableSegment> out;
  const auto& v = curve.values;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i + 1;
    while (j < v.size() && v[j] == v[i]) ++j;
    if (j - i >= std::max<std::size_t>(min_length, 1)) out.push_back({i + 1, j, v[i]});
    i = j;
  }
  return out;
}

std::string format_value(double value, Unit unit) {
  char buf[64];
  if (unit == Unit::kUsers) {
    std::snprintf(buf, sizeof buf, "%" PRId64, static_cast<std::int64_t>(value));
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", value);
  }
  return buf;
}

void write_curve_csv(std::ostream& out, std::span<const GuessCurve> curves) {
  out << "trial,g,value,kind,unit\n";
  for (const auto& c : curves) {
    const char* kind = to_string(c.kind);
    const char* unit = to_string(c.unit);
    for (std::size_t g = 1; g <= c.values.size(); ++g) {
      out << c.trial << ',' << g << ',' << format_value(c.values[g - 1], c.unit) << ',' << kind
          << ',' << unit << '\n';
    }
  }
}

}  // namespace leakguess
