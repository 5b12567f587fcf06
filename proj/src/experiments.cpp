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

#include "leakguess/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <limits>
#include <thread>

#include "leakguess/error.hpp"
#include "leakguess/rng.hpp"

namespace leakguess {

namespace {

// Seed stream roles.
constexpr std::uint64_t kRoleAttacker = 0;
constexpr std::uint64_t kRoleTarget = 1;
constexpr std::uint64_t kRoleGapSample = 2;  // + mode index
constexpr std::uint64_t kRoleShuffle = 4;    // + mode index
constexpr std::uint64_t kSynthStream = 0xD5;

// Runs fn(0..count-1) on up to `threads` workers. Each index writes only its
// own output slot, so results do not depend on scheduling. The exception of
// the lowest failing index is rethrown.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const auto workers = std::min<std::size_t>(threads, count);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string format_number(double v) {
  char buf[64];
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9.0e15) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

std::string g_label(std::size_t g) { return g == kLastGuess ? "max" : std::to_string(g); }

double value_at(const GuessCurve& c, std::size_t g) {
  return g == kLastGuess ? c.at(c.size()) : c.at(g);
}

std::uint64_t resolve_n(std::uint64_t n, const FrequencyTable& table) {
  return n == kFullDataset ? table.total_users() : n;
}

std::uint64_t stream_seed(const ScenarioConfig& cfg, std::size_t dataset, std::size_t n_index,
                          std::uint64_t role, std::uint64_t trial) {
  return derive_stream_seed(cfg.base_seed, {dataset, n_index, role, trial});
}

FrequencyTable draw(const RowSampler& sampler, std::uint64_t n, SampleMode mode,
                    std::uint64_t seed) {
  if (n == 0) return {};
  Xoshiro256 rng(seed);
  return sampler.to_table(mode == SampleMode::kWithReplacement
                              ? sampler.with_replacement(n, rng)
                              : sampler.without_replacement(n, rng));
}

void check_datasets(const std::vector<NamedTable>& data, std::size_t min_count,
                    const char* scenario) {
  if (data.size() < min_count) {
    throw InvalidArgument(std::string(scenario) + " needs at least " + std::to_string(min_count) +
                          " dataset(s)");
  }
  for (const auto& d : data) {
    if (d.table.empty()) throw InvalidArgument("dataset '" + d.name + "' is empty");
  }
}

void check_common(const ScenarioConfig& cfg) {
  if (cfg.trials == 0) throw InvalidArgument("trials must be >= 1");
  if (cfg.n_values.empty()) throw InvalidArgument("scenario needs at least one n");
}

void summarize(std::vector<SummaryRow>& out, const ScenarioConfig& cfg, const std::string& target,
               const std::string& source, std::uint64_t n, const std::string& series,
               const std::vector<const GuessCurve*>& curves) {
  for (auto g : cfg.report_g) {
    std::vector<double> values;
    values.reserve(curves.size());
    for (const auto* c : curves) values.push_back(value_at(*c, g));
    const Spread s = spread(values);
    out.push_back({target, source, n, series, g, curves.size(), s.min, s.median, s.max});
  }
}

std::vector<SampleMode> both_modes() {
  return {SampleMode::kWithReplacement, SampleMode::kWithoutReplacement};
}

ScenarioResult self_sample_core(const ScenarioConfig& cfg, const std::vector<NamedTable>& data) {
  check_common(cfg);
  ScenarioResult result;
  result.config = cfg;
  for (std::size_t d = 0; d < data.size(); ++d) {
    const auto& [name, table] = data[d];
    const RowSampler sampler(rank(table));
    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
      const std::uint64_t n = resolve_n(cfg.n_values[ni], table);
      const std::uint64_t target_n = resolve_n(cfg.target_n.value_or(cfg.n_values[ni]), table);
      const FrequencyTable q0 = draw(sampler, n, cfg.mode, stream_seed(cfg, d, ni, kRoleAttacker, 0));
      if (q0.empty()) throw InvalidArgument("self-sample needs n >= 1");
      const RankedDistribution ranking0 = rank(q0);
      const GuessOrder order = reorder(ranking0, Ordering::kBest, 0, name);

      CurveSet set{name + "_n" + std::to_string(n), {}};
      GuessCurve f = optimal_curve(ranking0, cfg.unit);
      f.source_id = f.target_id = name;
      set.curves.push_back(std::move(f));
      result.samples.push_back({name, n, "q0", 0, q0.total_users(), q0.unique_count(),
                                q0.total_users()});

      std::vector<GuessCurve> g_curves(cfg.trials);
      std::vector<SampleRow> rows(cfg.trials);
      parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
        const std::uint64_t t = i + 1;
        const FrequencyTable qt =
            draw(sampler, target_n, cfg.mode, stream_seed(cfg, d, ni, kRoleTarget, t));
        GuessCurve g = attack_curve(order, qt, cfg.unit);
        g.target_id = name;
        g.trial = t;
        const auto hits = static_cast<std::uint64_t>(attack_curve(order, qt).at(order.size()));
        rows[i] = {name, n, "qt", t, qt.total_users(), qt.unique_count(), hits};
        g_curves[i] = std::move(g);
      });

      std::vector<const GuessCurve*> gs;
      for (auto& g : g_curves) set.curves.push_back(std::move(g));
      for (std::size_t i = 1; i < set.curves.size(); ++i) gs.push_back(&set.curves[i]);
      summarize(result.summary, cfg, name, name, n, "F", {&set.curves[0]});
      summarize(result.summary, cfg, name, name, n, "G", gs);
      result.samples.insert(result.samples.end(), rows.begin(), rows.end());
      result.curves.push_back(std::move(set));
    }
  }
  return result;
}

ScenarioResult cross_core(const ScenarioConfig& cfg, const std::vector<NamedTable>& data,
                          bool remainder) {
  check_common(cfg);
  const SampleMode mode = remainder ? SampleMode::kWithoutReplacement : cfg.mode;
  ScenarioResult result;
  result.config = cfg;
  result.config.mode = mode;

  std::vector<RankedDistribution> p0;
  std::vector<RowSampler> samplers;
  for (const auto& d : data) {
    p0.push_back(rank(d.table));
    samplers.emplace_back(p0.back());
  }
  const std::size_t k = data.size();

  for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
    // curves[target][source][trial-1]
    std::vector<std::vector<std::vector<GuessCurve>>> h(
        k, std::vector<std::vector<GuessCurve>>(k, std::vector<GuessCurve>(cfg.trials)));
    std::vector<std::uint64_t> source_n(k);

    for (std::size_t s = 0; s < k; ++s) {
      const auto& src = data[s];
      const std::uint64_t n = resolve_n(cfg.n_values[ni], src.table);
      source_n[s] = n;
      std::vector<SampleRow> rows(cfg.trials);
      std::vector<AuditRow> audits(cfg.trials);
      parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
        const std::uint64_t t = i + 1;
        const FrequencyTable q =
            draw(samplers[s], n, mode, stream_seed(cfg, s, ni, kRoleAttacker, t));
        if (q.empty()) throw InvalidArgument("cross-dataset needs n >= 1");
        const GuessOrder order = reorder(rank(q), Ordering::kBest, 0, src.name);
        rows[i] = {src.name, n, "sample", t, q.total_users(), q.unique_count(), 0};

        FrequencyTable rest;
        if (remainder) {
          rest = src.table;
          for (const auto& [token, count] : q) rest.remove(token, count);
          SplitResult split{{q, n, mode, cfg.base_seed, t}, rest};
          audits[i] = {src.name, n, t, q.total_users(), rest.total_users(),
                       conserves(src.table, split)};
        }
        for (std::size_t target = 0; target < k; ++target) {
          GuessCurve c;
          if (remainder && target == s) {
            if (!rest.empty()) c = gap_curve(rank(rest), order, cfg.gap_mode, cfg.unit);
            c.kind = CurveKind::kGap;
            c.unit = cfg.unit;
            c.source_id = src.name;
          } else {
            c = gap_curve(p0[target], order, cfg.gap_mode, cfg.unit);
          }
          c.target_id = data[target].name;
          c.trial = t;
          h[target][s][i] = std::move(c);
        }
      });
      result.samples.insert(result.samples.end(), rows.begin(), rows.end());
      if (remainder) result.audits.insert(result.audits.end(), audits.begin(), audits.end());
    }

    for (std::size_t target = 0; target < k; ++target) {
      const auto& tname = data[target].name;
      for (std::size_t s = 0; s < k; ++s) {
        CurveSet set{tname + "_from_" + data[s].name + "_n" + std::to_string(source_n[s]),
                     std::move(h[target][s])};
        std::vector<const GuessCurve*> ptrs;
        for (const auto& c : set.curves) ptrs.push_back(&c);
        summarize(result.summary, cfg, tname, data[s].name, source_n[s], "H", ptrs);
        result.curves.push_back(std::move(set));
      }
      // The k sets just pushed, indexed by source.
      const std::size_t first = result.curves.size() - k;
      auto curve_of = [&](std::size_t s, std::size_t i) -> const GuessCurve& {
        return result.curves[first + s].curves[i];
      };
      auto median_at = [&](std::size_t s, std::size_t g) {
        std::vector<double> v;
        for (std::size_t i = 0; i < cfg.trials; ++i) v.push_back(value_at(curve_of(s, i), g));
        return spread(v).median;
      };

      auto rank_row = [&](std::size_t g, std::uint64_t trial, const std::vector<double>& vals) {
        RankingRow row;
        row.target = tname;
        row.n = source_n[target];
        row.g = g;
        row.trial = trial;
        const double best = *std::min_element(vals.begin(), vals.end());
        std::size_t winners = 0;
        for (std::size_t s = 0; s < k; ++s) {
          if (vals[s] == best) {
            if (winners++ == 0) row.best_source = data[s].name;
          }
        }
        row.tie = winners > 1;
        row.own_value = vals[target];
        row.best_foreign_value = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < k; ++s) {
          if (s != target) row.best_foreign_value = std::min(row.best_foreign_value, vals[s]);
        }
        row.own_strictly_best = row.own_value < row.best_foreign_value;
        result.ranking.push_back(row);
      };

      for (auto g : cfg.report_g) {
        std::vector<double> med(k);
        for (std::size_t s = 0; s < k; ++s) med[s] = median_at(s, g);
        rank_row(g, 0, med);
        for (std::size_t i = 0; i < cfg.trials; ++i) {
          std::vector<double> vals(k);
          for (std::size_t s = 0; s < k; ++s) vals[s] = value_at(curve_of(s, i), g);
          rank_row(g, i + 1, vals);
        }
      }

      std::size_t horizon = 0;
      for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t i = 0; i < cfg.trials; ++i) {
          horizon = std::max(horizon, curve_of(s, i).size());
        }
      }
      std::optional<std::size_t> leader;
      for (std::size_t g = 1; g <= horizon; ++g) {
        std::vector<double> med(k);
        for (std::size_t s = 0; s < k; ++s) med[s] = median_at(s, g);
        const double best = *std::min_element(med.begin(), med.end());
        if (leader && med[*leader] == best) continue;
        const auto next = static_cast<std::size_t>(
            std::find(med.begin(), med.end(), best) - med.begin());
        if (leader) {
          result.crossovers.push_back(
              {tname, source_n[target], g, data[*leader].name, data[next].name});
        }
        leader = next;
      }
    }
  }
  return result;
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::kSelfSample: return "self_sample";
    case Scenario::kRatio: return "ratio";
    case Scenario::kSampleVsFull: return "sample_vs_full";
    case Scenario::kGapOrderings: return "gap_orderings";
    case Scenario::kCrossDataset: return "cross_dataset";
    case Scenario::kRemainder: return "remainder";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view text) noexcept {
  for (auto s : {Scenario::kSelfSample, Scenario::kRatio, Scenario::kSampleVsFull,
                 Scenario::kGapOrderings, Scenario::kCrossDataset, Scenario::kRemainder}) {
    std::string_view name = to_string(s);
    if (text == name) return s;
    // Also accept hyphenated spellings such as "self-sample".
    std::string dashed(name);
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    if (text == dashed) return s;
  }
  return std::nullopt;
}

std::uint64_t default_trials(Scenario s) noexcept {
  switch (s) {
    case Scenario::kSelfSample:
    case Scenario::kRatio:
      return 10;
    case Scenario::kGapOrderings:
      return 1;
    default:
      return 5;
  }
}

Spread spread(std::vector<double> values) {
  Spread s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  const std::size_t m = values.size() / 2;
  s.median = values.size() % 2 == 1 ? values[m] : (values[m - 1] + values[m]) / 2.0;
  return s;
}

const CurveSet* ScenarioResult::find_curves(std::string_view stem) const noexcept {
  for (const auto& c : curves) {
    if (c.stem == stem) return &c;
  }
  return nullptr;
}

ScenarioResult run_self_sample(const ScenarioConfig& cfg, const std::vector<NamedTable>& data) {
  check_datasets(data, 1, "self_sample");
  return self_sample_core(cfg, data);
}

ScenarioResult run_ratio(const ScenarioConfig& cfg, const std::vector<NamedTable>& data) {
  check_datasets(data, 1, "ratio");
  return self_sample_core(cfg, data);
}

ScenarioResult run_sample_vs_full(const ScenarioConfig& cfg, const std::vector<NamedTable>& data) {
  check_datasets(data, 1, "sample_vs_full");
  check_common(cfg);
  ScenarioResult result;
  result.config = cfg;
  for (std::size_t d = 0; d < data.size(); ++d) {
    const auto& [name, table] = data[d];
    const RankedDistribution full = rank(table);
    const RowSampler sampler(full);
    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
      const std::uint64_t n = resolve_n(cfg.n_values[ni], table);
      CurveSet set{name + "_n" + std::to_string(n), {}};
      GuessCurve f = optimal_curve(full, cfg.unit);
      f.source_id = f.target_id = name;
      set.curves.push_back(std::move(f));

      std::vector<GuessCurve> g_curves(cfg.trials);
      std::vector<SampleRow> rows(cfg.trials);
      parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
        const std::uint64_t t = i + 1;
        const FrequencyTable q = draw(sampler, n, cfg.mode, stream_seed(cfg, d, ni, kRoleAttacker, t));
        if (q.empty()) throw InvalidArgument("sample_vs_full needs n >= 1");
        const GuessOrder order = reorder(rank(q), Ordering::kBest, 0, name);
        GuessCurve g = attack_curve(order, table, cfg.unit);
        g.target_id = name;
        g.trial = t;
        const auto hits = static_cast<std::uint64_t>(attack_curve(order, table).at(order.size()));
        rows[i] = {name, n, "sample", t, q.total_users(), q.unique_count(), hits};
        g_curves[i] = std::move(g);
      });
      std::vector<const GuessCurve*> gs;
      for (auto& g : g_curves) set.curves.push_back(std::move(g));
      for (std::size_t i = 1; i < set.curves.size(); ++i) gs.push_back(&set.curves[i]);
      summarize(result.summary, cfg, name, name, n, "F", {&set.curves[0]});
      summarize(result.summary, cfg, name, name, n, "G", gs);
      result.samples.insert(result.samples.end(), rows.begin(), rows.end());
      result.curves.push_back(std::move(set));
    }
  }
  return result;
}

ScenarioResult run_gap_orderings(const ScenarioConfig& cfg, const std::vector<NamedTable>& data) {
  check_datasets(data, 1, "gap_orderings");
  check_common(cfg);
  constexpr Ordering kOrderings[] = {Ordering::kBest, Ordering::kWorst, Ordering::kRandom};
  ScenarioResult result;
  result.config = cfg;
  for (std::size_t d = 0; d < data.size(); ++d) {
    const auto& [name, table] = data[d];
    const RankedDistribution p0 = rank(table);
    const RowSampler sampler(p0);
    for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
      const std::uint64_t n = resolve_n(cfg.n_values[ni], table);
      const auto modes = both_modes();
      for (std::size_t m = 0; m < modes.size(); ++m) {
        const SampleMode mode = modes[m];
        // curves[ordering][trial-1]
        std::vector<std::vector<GuessCurve>> curves(3, std::vector<GuessCurve>(cfg.trials));
        std::vector<SampleRow> rows(cfg.trials);
        parallel_for(cfg.trials, cfg.threads, [&](std::size_t i) {
          const std::uint64_t t = i + 1;
          const FrequencyTable q =
              draw(sampler, n, mode, stream_seed(cfg, d, ni, kRoleGapSample + m, t));
          if (q.empty()) throw InvalidArgument("gap_orderings needs n >= 1");
          const RankedDistribution ranking = rank(q);
          rows[i] = {name, n, std::string("sample_") + to_string(mode), t, q.total_users(),
                     q.unique_count(), 0};
          for (std::size_t o = 0; o < 3; ++o) {
            const GuessOrder order = reorder(ranking, kOrderings[o],
                                             stream_seed(cfg, d, ni, kRoleShuffle + m, t), name);
            GuessCurve c = gap_curve(p0, order, cfg.gap_mode, cfg.unit);
            c.target_id = name;
            c.trial = t;
            curves[o][i] = std::move(c);
          }
        });
        result.samples.insert(result.samples.end(), rows.begin(), rows.end());
        for (std::size_t o = 0; o < 3; ++o) {
          const std::string suffix = std::string(to_string(mode)) + "_" + to_string(kOrderings[o]);
          CurveSet set{name + "_n" + std::to_string(n) + "_" + suffix, std::move(curves[o])};
          std::vector<const GuessCurve*> ptrs;
          for (const auto& c : set.curves) {
            ptrs.push_back(&c);
            PlateauRow row;
            row.dataset = name;
            row.n = n;
            row.mode = mode;
            row.ordering = kOrderings[o];
            row.trial = c.trial;
            row.length = c.size();
            row.peak = plateau_report(c);
            for (const auto& seg : stable_segments(c, 1)) {
              if (seg.end_g - seg.begin_g > row.longest_stable.end_g - row.longest_stable.begin_g ||
                  row.longest_stable.end_g == 0) {
                row.longest_stable = seg;
              }
            }
            result.plateaus.push_back(row);
          }
          summarize(result.summary, cfg, name, name, n, "H_" + suffix, ptrs);
          result.curves.push_back(std::move(set));
        }
      }
    }
  }
  return result;
}

ScenarioResult run_cross_dataset(const ScenarioConfig& cfg, const std::vector<NamedTable>& data) {
  check_datasets(data, 2, "cross_dataset");
  return cross_core(cfg, data, false);
}

ScenarioResult run_remainder(const ScenarioConfig& cfg, const std::vector<NamedTable>& data) {
  check_datasets(data, 2, "remainder");
  return cross_core(cfg, data, true);
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& base_dir) {
  std::vector<NamedTable> data;
  for (std::size_t i = 0; i < cfg.datasets.size(); ++i) {
    data.push_back({cfg.datasets[i].name,
                    load_dataset(cfg.datasets[i], i, cfg.base_seed, base_dir, cfg.threads)});
  }
  switch (cfg.scenario) {
    case Scenario::kSelfSample: return run_self_sample(cfg, data);
    case Scenario::kRatio: return run_ratio(cfg, data);
    case Scenario::kSampleVsFull: return run_sample_vs_full(cfg, data);
    case Scenario::kGapOrderings: return run_gap_orderings(cfg, data);
    case Scenario::kCrossDataset: return run_cross_dataset(cfg, data);
    case Scenario::kRemainder: return run_remainder(cfg, data);
  }
  throw InvalidArgument("unknown scenario");
}

FrequencyTable load_dataset(const DatasetRef& ref, std::size_t index, std::uint64_t base_seed,
                            const std::filesystem::path& base_dir, unsigned threads) {
  auto resolve = [&](const std::filesystem::path& p) {
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  if (ref.table_path) return load_frequency_table(resolve(*ref.table_path));
  if (ref.profile_path) {
    const AnonProfile profile = load_anon_profile(resolve(*ref.profile_path));
    return from_profile(profile.descending_counts, ref.name + "#");
  }
  if (ref.synth) {
    ZipfMandelbrotSpec spec = *ref.synth;
    if (ref.synth_seed_from_base) spec.seed = derive_stream_seed(base_seed, {kSynthStream, index});
    return generate(spec, threads);
  }
  throw InvalidArgument("dataset '" + ref.name + "' has no source");
}

// ---------------------------------------------------------------------------
// Config text format

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto end = comma == std::string_view::npos ? s.size() : comma;
    out.push_back(trim(s.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool to_u64(std::string_view s, std::uint64_t& v) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

bool to_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(v);
}

bool valid_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.';
  });
}

struct PendingDataset {
  std::map<std::string, std::pair<std::string, std::size_t>> fields;  // key -> (value, line)
};

}  // namespace

ScenarioConfig parse_scenario_config(std::istream& in, std::string_view source_name) {
  const std::string source = source_name.empty() ? "<config>" : std::string(source_name);
  ScenarioConfig cfg;
  bool have_scenario = false;
  bool have_trials = false;
  std::map<std::uint64_t, PendingDataset> pending;

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw DataError(source, line_number, "expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    auto fail = [&](const std::string& what) -> void {
      throw DataError(source, line_number, key + ": " + what);
    };

    if (key == "scenario") {
      const auto s = parse_scenario(value);
      if (!s) fail("unknown scenario '" + value + "'");
      cfg.scenario = *s;
      have_scenario = true;
    } else if (key == "n") {
      cfg.n_values.clear();
      for (const auto& item : split_list(value)) {
        std::uint64_t v = 0;
        if (item == "all") {
          v = kFullDataset;
        } else if (!to_u64(item, v) || v == 0) {
          fail("expected positive integers or 'all'");
        }
        cfg.n_values.push_back(v);
      }
    } else if (key == "target_n") {
      std::uint64_t v = 0;
      if (value == "all") {
        v = kFullDataset;
      } else if (!to_u64(value, v) || v == 0) {
        fail("expected a positive integer or 'all'");
      }
      cfg.target_n = v;
    } else if (key == "trials") {
      if (!to_u64(value, cfg.trials) || cfg.trials == 0) fail("expected a positive integer");
      have_trials = true;
    } else if (key == "seed") {
      if (!to_u64(value, cfg.base_seed)) fail("expected an unsigned 64-bit integer");
    } else if (key == "unit") {
      const auto u = parse_unit(value);
      if (!u) fail("expected users or probability");
      cfg.unit = *u;
    } else if (key == "gap_mode") {
      const auto e = parse_gap_extension(value);
      if (!e) fail("expected truncate or extend_optimal");
      cfg.gap_mode = *e;
    } else if (key == "report_g") {
      cfg.report_g.clear();
      for (const auto& item : split_list(value)) {
        std::uint64_t v = 0;
        if (item == "max") {
          cfg.report_g.push_back(kLastGuess);
        } else if (to_u64(item, v) && v > 0) {
          cfg.report_g.push_back(v);
        } else {
          fail("expected positive integers or 'max'");
        }
      }
    } else if (key == "mode") {
      if (value == "with") {
        cfg.mode = SampleMode::kWithReplacement;
      } else if (value == "without") {
        cfg.mode = SampleMode::kWithoutReplacement;
      } else {
        fail("expected with or without");
      }
    } else if (key == "threads") {
      std::uint64_t v = 0;
      if (!to_u64(value, v) || v == 0 || v > 1024) fail("expected 1..1024");
      cfg.threads = static_cast<unsigned>(v);
    } else if (key == "plot") {
      if (value == "true" || value == "1") {
        cfg.emit_plot = true;
      } else if (value == "false" || value == "0") {
        cfg.emit_plot = false;
      } else {
        fail("expected true or false");
      }
    } else if (key.starts_with("dataset.")) {
      const auto rest = std::string_view(key).substr(8);
      const auto dot = rest.find('.');
      std::uint64_t index = 0;
      if (dot == std::string_view::npos || !to_u64(rest.substr(0, dot), index)) {
        fail("expected dataset.<index>.<field>");
      }
      const std::string field(rest.substr(dot + 1));
      static const char* kFields[] = {"name",           "path",         "profile",
                                      "preset",         "synth.vocab",  "synth.exponent",
                                      "synth.shift",    "synth.users",  "synth.seed",
                                      "synth.offset",   "synth.prefix"};
      if (std::none_of(std::begin(kFields), std::end(kFields),
                       [&](const char* f) { return field == f; })) {
        fail("unknown dataset field '" + field + "'");
      }
      pending[index].fields[field] = {value, line_number};
    } else {
      fail("unknown key");
    }
  }
  if (in.bad()) throw DataError(source, line_number + 1, "read error");
  if (!have_scenario) throw DataError(source, 0, "missing 'scenario' key");
  if (!have_trials) cfg.trials = default_trials(cfg.scenario);
  if (cfg.n_values.empty() && cfg.scenario == Scenario::kGapOrderings) {
    cfg.n_values = {kFullDataset};
  }

  std::uint64_t expected_index = 0;
  for (auto& [index, p] : pending) {
    if (index != expected_index++) {
      throw DataError(source, p.fields.begin()->second.second,
                      "dataset indices must be 0, 1, 2, ... without gaps");
    }
    DatasetRef ref;
    auto get = [&](const std::string& f) -> const std::pair<std::string, std::size_t>* {
      auto it = p.fields.find(f);
      return it == p.fields.end() ? nullptr : &it->second;
    };
    auto field_error = [&](const std::string& f, const std::string& what) {
      const auto* v = get(f);
      throw DataError(source, v ? v->second : p.fields.begin()->second.second,
                      "dataset." + std::to_string(index) + "." + f + ": " + what);
    };
    int sources = 0;
    if (const auto* v = get("path")) {
      ref.table_path = v->first;
      ref.name = std::filesystem::path(v->first).stem().string();
      ++sources;
    }
    if (const auto* v = get("profile")) {
      ref.profile_path = v->first;
      ref.name = std::filesystem::path(v->first).stem().string();
      ++sources;
    }
    const bool has_synth_fields = std::any_of(p.fields.begin(), p.fields.end(), [](const auto& kv) {
      return kv.first.starts_with("synth.");
    });
    if (const auto* v = get("preset")) {
      auto spec = preset(v->first, 0);
      if (!spec) field_error("preset", "unknown preset '" + v->first + "'");
      ref.synth = *spec;
      ref.name = v->first;
      ++sources;
    } else if (has_synth_fields) {
      ref.synth = ZipfMandelbrotSpec{};
      ref.name = "synth" + std::to_string(index);
      ++sources;
    }
    if (sources != 1) {
      throw DataError(source, p.fields.begin()->second.second,
                      "dataset." + std::to_string(index) +
                          " needs exactly one of path, profile, preset/synth.*");
    }
    if (ref.synth) {
      auto& spec = *ref.synth;
      auto u64_field = [&](const char* f, std::uint64_t& out) {
        if (const auto* v = get(f)) {
          if (!to_u64(v->first, out)) field_error(f, "expected an unsigned integer");
        }
      };
      auto real_field = [&](const char* f, double& out) {
        if (const auto* v = get(f)) {
          if (!to_double(v->first, out)) field_error(f, "expected a real number");
        }
      };
      u64_field("synth.vocab", spec.vocab_size);
      u64_field("synth.users", spec.users);
      u64_field("synth.offset", spec.token_offset);
      real_field("synth.exponent", spec.exponent);
      real_field("synth.shift", spec.shift);
      if (const auto* v = get("synth.prefix")) spec.token_prefix = v->first;
      if (get("synth.seed")) {
        u64_field("synth.seed", spec.seed);
      } else {
        ref.synth_seed_from_base = true;
      }
      try {
        validate(spec);
      } catch (const InvalidArgument& e) {
        throw DataError(source, p.fields.begin()->second.second, e.what());
      }
    }
    if (const auto* v = get("name")) ref.name = v->first;
    if (!valid_name(ref.name)) field_error("name", "names may use only [A-Za-z0-9_.-]");
    for (const auto& other : cfg.datasets) {
      if (other.name == ref.name) field_error("name", "duplicate dataset name '" + ref.name + "'");
    }
    cfg.datasets.push_back(std::move(ref));
  }
  if (cfg.datasets.empty()) throw DataError(source, 0, "no datasets configured");
  return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string(), 0, "cannot open for reading");
  return parse_scenario_config(in, path.string());
}

void write_scenario_config(std::ostream& out, const ScenarioConfig& cfg) {
  auto join_n = [](const auto& values, const char* sentinel_text, auto sentinel) {
    std::string s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ",";
      s += values[i] == sentinel ? std::string(sentinel_text) : std::to_string(values[i]);
    }
    return s;
  };
  out << "scenario = " << to_string(cfg.scenario) << '\n';
  out << "n = " << join_n(cfg.n_values, "all", kFullDataset) << '\n';
  if (cfg.target_n) {
    out << "target_n = "
        << (*cfg.target_n == kFullDataset ? std::string("all") : std::to_string(*cfg.target_n))
        << '\n';
  }
  out << "trials = " << cfg.trials << '\n';
  out << "seed = " << cfg.base_seed << '\n';
  out << "unit = " << to_string(cfg.unit) << '\n';
  out << "gap_mode = " << to_string(cfg.gap_mode) << '\n';
  out << "report_g = " << join_n(cfg.report_g, "max", kLastGuess) << '\n';
  out << "mode = " << to_string(cfg.mode) << '\n';
  out << "plot = " << (cfg.emit_plot ? "true" : "false") << '\n';
  for (std::size_t i = 0; i < cfg.datasets.size(); ++i) {
    const auto& d = cfg.datasets[i];
    const std::string p = "dataset." + std::to_string(i) + ".";
    out << p << "name = " << d.name << '\n';
    if (d.table_path) out << p << "path = " << d.table_path->string() << '\n';
    if (d.profile_path) out << p << "profile = " << d.profile_path->string() << '\n';
    if (d.synth) {
      const auto& s = *d.synth;
      char buf[64];
      out << p << "synth.vocab = " << s.vocab_size << '\n';
      std::snprintf(buf, sizeof buf, "%.17g", s.exponent);
      out << p << "synth.exponent = " << buf << '\n';
      std::snprintf(buf, sizeof buf, "%.17g", s.shift);
      out << p << "synth.shift = " << buf << '\n';
      out << p << "synth.users = " << s.users << '\n';
      if (!d.synth_seed_from_base) out << p << "synth.seed = " << s.seed << '\n';
      out << p << "synth.offset = " << s.token_offset << '\n';
      out << p << "synth.prefix = " << s.token_prefix << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Output files

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open for writing");
  return out;
}

void write_plot_script(std::ostream& out, const ScenarioResult& r) {
  out << "#!/usr/bin/env python3\n"
         "# Plots every curve file of this run. Requires pandas and matplotlib.\n"
         "import pathlib\n"
         "import matplotlib.pyplot as plt\n"
         "import pandas as pd\n\n"
         "here = pathlib.Path(__file__).resolve().parent\n"
         "stems = [\n";
  for (const auto& c : r.curves) out << "    \"" << c.stem << "\",\n";
  out << "]\n"
         "for stem in stems:\n"
         "    df = pd.read_csv(here / \"curves\" / f\"{stem}.csv\")\n"
         "    fig, ax = plt.subplots()\n"
         "    for (trial, kind), part in df.groupby([\"trial\", \"kind\"]):\n"
         "        ax.plot(part[\"g\"], part[\"value\"], label=f\"{kind} t{trial}\", lw=1)\n"
         "    ax.set_xscale(\"log\")\n"
         "    ax.set_xlabel(\"guesses g\")\n"
         "    ax.set_ylabel(df[\"unit\"].iloc[0] if len(df) else \"\")\n"
         "    ax.set_title(stem)\n"
         "    ax.legend(fontsize=6)\n"
         "    fig.savefig(here / f\"{stem}.png\", dpi=150)\n"
         "    plt.close(fig)\n";
}

}  // namespace

void write_scenario_outputs(const ScenarioResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "curves");
  for (const auto& set : r.curves) {
    auto out = open_out(dir / "curves" / (set.stem + ".csv"));
    write_curve_csv(out, set.curves);
  }
  {
    auto out = open_out(dir / "config.txt");
    write_scenario_config(out, r.config);
  }
  const char* scenario = to_string(r.config.scenario);
  {
    auto out = open_out(dir / "summary.csv");
    out << "scenario,target,source,n,series,g,trials,min,median,max\n";
    for (const auto& s : r.summary) {
      out << scenario << ',' << s.target << ',' << s.source << ',' << s.n << ',' << s.series << ','
          << g_label(s.g) << ',' << s.trials << ',' << format_number(s.min) << ','
          << format_number(s.median) << ',' << format_number(s.max) << '\n';
    }
  }
  {
    auto out = open_out(dir / "samples.csv");
    out << "dataset,n,role,trial,users,unique,successes\n";
    for (const auto& s : r.samples) {
      out << s.dataset << ',' << s.n << ',' << s.role << ',' << s.trial << ',' << s.users << ','
          << s.unique << ',' << s.successes << '\n';
    }
  }
  if (!r.ranking.empty()) {
    auto out = open_out(dir / "ranking.csv");
    out << "target,n,g,trial,best_source,tie,own_value,best_foreign_value,own_strictly_best\n";
    for (const auto& x : r.ranking) {
      out << x.target << ',' << x.n << ',' << g_label(x.g) << ','
          << (x.trial == 0 ? std::string("median") : std::to_string(x.trial)) << ','
          << x.best_source << ',' << (x.tie ? 1 : 0) << ',' << format_number(x.own_value) << ','
          << format_number(x.best_foreign_value) << ',' << (x.own_strictly_best ? 1 : 0) << '\n';
    }
  }
  if (!r.ranking.empty()) {
    auto out = open_out(dir / "crossovers.csv");
    out << "target,n,g,from_source,to_source\n";
    for (const auto& x : r.crossovers) {
      out << x.target << ',' << x.n << ',' << x.g << ',' << x.from_source << ',' << x.to_source
          << '\n';
    }
  }
  if (!r.plateaus.empty()) {
    auto out = open_out(dir / "plateaus.csv");
    out << "dataset,n,mode,ordering,trial,length,max_value,first_argmax,last_argmax,"
           "stable_begin,stable_end,stable_value\n";
    for (const auto& x : r.plateaus) {
      out << x.dataset << ',' << x.n << ',' << to_string(x.mode) << ',' << to_string(x.ordering)
          << ',' << x.trial << ',' << x.length << ',' << format_number(x.peak.max_value) << ','
          << x.peak.first_argmax << ',' << x.peak.last_argmax << ',' << x.longest_stable.begin_g
          << ',' << x.longest_stable.end_g << ',' << format_number(x.longest_stable.value) << '\n';
    }
  }
  if (!r.audits.empty()) {
    auto out = open_out(dir / "audit.csv");
    out << "dataset,n,trial,sample_users,remainder_users,conserved\n";
    for (const auto& x : r.audits) {
      out << x.dataset << ',' << x.n << ',' << x.trial << ',' << x.sample_users << ','
          << x.remainder_users << ',' << (x.conserved ? 1 : 0) << '\n';
    }
  }
  if (r.config.emit_plot) {
    auto out = open_out(dir / "plot.py");
    write_plot_script(out, r);
  }
}

}  // namespace leakguess
