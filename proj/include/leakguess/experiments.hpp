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

// Experiment scenarios. Each scenario samples from one or more datasets,
// turns the samples into guess orders and records F/G/H curves, then
// aggregates the trials. A run is a pure function of its configuration and
// base seed: trial t of stream (dataset, n, role) always draws from
// derive_stream_seed(seed, {dataset, n_index, role, t}), whatever the
// thread count.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leakguess/curves.hpp"
#include "leakguess/ingest.hpp"
#include "leakguess/sampling.hpp"
#include "leakguess/synth.hpp"

namespace leakguess {

enum class Scenario {
  kSelfSample,
  kRatio,
  kSampleVsFull,
  kGapOrderings,
  kCrossDataset,
  kRemainder,
};

const char* to_string(Scenario s) noexcept;
std::optional<Scenario> parse_scenario(std::string_view text) noexcept;

/// One dataset of a scenario: a frequency-table file, an anonymized
/// profile, or a generator spec (optionally starting from a preset).
struct DatasetRef {
  std::string name;
  std::optional<std::filesystem::path> table_path;
  std::optional<std::filesystem::path> profile_path;
  std::optional<ZipfMandelbrotSpec> synth;
  /// Set when the generator settings carried no explicit seed; the seed
  /// then derives from the scenario base seed and the dataset index.
  bool synth_seed_from_base = false;
};

/// Sentinel in n lists meaning "the full dataset size".
inline constexpr std::uint64_t kFullDataset = 0;
/// Sentinel in report_g meaning "the last guess of each curve".
inline constexpr std::size_t kLastGuess = 0;

struct ScenarioConfig {
  Scenario scenario = Scenario::kSelfSample;
  std::vector<DatasetRef> datasets;
  std::vector<std::uint64_t> n_values;
  /// Size of the attacked samples q_1..q_t in self-sample/ratio runs;
  /// defaults to n.
  std::optional<std::uint64_t> target_n;
  std::uint64_t trials = 10;
  std::uint64_t base_seed = 0;
  Unit unit = Unit::kUsers;
  GapExtension gap_mode = GapExtension::kTruncate;
  std::vector<std::size_t> report_g{10, 100, 1000, kLastGuess};
  SampleMode mode = SampleMode::kWithReplacement;
  unsigned threads = 1;
  bool emit_plot = false;
};

/// Trial counts matching the protocols being replayed: 10 for the
/// self-sample and ratio studies, 5 for the rest, 1 for gap orderings.
std::uint64_t default_trials(Scenario s) noexcept;

/// Parses the flat "key = value" scenario format. '#' starts a comment.
/// Keys: scenario, n, target_n, trials, seed, unit, gap_mode, report_g,
/// mode, threads, plot, and per dataset dataset.<i>.{name, path, profile,
/// preset, synth.vocab, synth.exponent, synth.shift, synth.users,
/// synth.seed, synth.offset, synth.prefix}. Lists are comma separated; n
/// accepts "all" and report_g accepts "max". Throws DataError naming the
/// line on any unknown key or bad value.
ScenarioConfig parse_scenario_config(std::istream& in, std::string_view source_name = {});
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// Canonical text form; parse_scenario_config(write(...)) reproduces cfg
/// except for threads, which is left out because it never changes results.
void write_scenario_config(std::ostream& out, const ScenarioConfig& cfg);

/// Loads or generates a dataset. Relative paths resolve against base_dir.
FrequencyTable load_dataset(const DatasetRef& ref, std::size_t index, std::uint64_t base_seed,
                            const std::filesystem::path& base_dir = {}, unsigned threads = 1);

struct NamedTable {
  std::string name;
  FrequencyTable table;
};

/// Curves destined for one CSV file.
struct CurveSet {
  std::string stem;
  std::vector<GuessCurve> curves;
};

/// min/median/max of one curve family across trials at one guess count.
struct SummaryRow {
  std::string target;
  std::string source;
  std::uint64_t n = 0;
  std::string series;
  std::size_t g = 0;
  std::uint64_t trials = 0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

struct SampleRow {
  std::string dataset;
  std::uint64_t n = 0;
  std::string role;
  std::uint64_t trial = 0;
  std::uint64_t users = 0;
  std::uint64_t unique = 0;
  /// Users compromised after the last guess (0 where not applicable).
  std::uint64_t successes = 0;
};

/// Which source's sample does best (lowest H) against a target at g.
/// trial == 0 rows compare the per-g medians across trials.
struct RankingRow {
  std::string target;
  std::uint64_t n = 0;
  std::size_t g = 0;
  std::uint64_t trial = 0;
  std::string best_source;
  bool tie = false;
  double own_value = 0.0;
  double best_foreign_value = 0.0;
  bool own_strictly_best = false;
};

/// The best source by median H changes between g-1 and g.
struct CrossoverRow {
  std::string target;
  std::uint64_t n = 0;
  std::size_t g = 0;
  std::string from_source;
  std::string to_source;
};

struct PlateauRow {
  std::string dataset;
  std::uint64_t n = 0;
  SampleMode mode = SampleMode::kWithReplacement;
  Ordering ordering = Ordering::kBest;
  std::uint64_t trial = 0;
  std::size_t length = 0;
  PlateauReport peak;
  /// Longest run of equal values (0/0 on an empty curve).
  StableSegment longest_stable;
};

struct AuditRow {
  std::string dataset;
  std::uint64_t n = 0;
  std::uint64_t trial = 0;
  std::uint64_t sample_users = 0;
  std::uint64_t remainder_users = 0;
  bool conserved = false;
};

struct ScenarioResult {
  ScenarioConfig config;
  std::vector<CurveSet> curves;
  std::vector<SummaryRow> summary;
  std::vector<SampleRow> samples;
  std::vector<RankingRow> ranking;
  std::vector<CrossoverRow> crossovers;
  std::vector<PlateauRow> plateaus;
  std::vector<AuditRow> audits;

  /// Finds a curve file by stem, or nullptr.
  const CurveSet* find_curves(std::string_view stem) const noexcept;
};

/// q_0 and q_1..q_t from each dataset; F of q_0 (trial 0) and G of each q_t
/// under q_0's best order. One curve file per (dataset, n).
ScenarioResult run_self_sample(const ScenarioConfig& cfg, const std::vector<NamedTable>& data);

/// The self-sample protocol over datasets of different sizes; summary rows
/// carry the per-dataset minimum of G(g*) across trials.
ScenarioResult run_ratio(const ScenarioConfig& cfg, const std::vector<NamedTable>& data);

/// Each sample's best order attacks its whole source dataset. Trial 0 is
/// the dataset's own F.
ScenarioResult run_sample_vs_full(const ScenarioConfig& cfg, const std::vector<NamedTable>& data);

/// H of best, worst and random orders of samples drawn with and without
/// replacement, against the source dataset.
ScenarioResult run_gap_orderings(const ScenarioConfig& cfg, const std::vector<NamedTable>& data);

/// Samples from every dataset attack every dataset; H per (target, source).
ScenarioResult run_cross_dataset(const ScenarioConfig& cfg, const std::vector<NamedTable>& data);

/// Like run_cross_dataset with without-replacement samples; a dataset's own
/// sample attacks only the users left after removing the sample.
ScenarioResult run_remainder(const ScenarioConfig& cfg, const std::vector<NamedTable>& data);

/// Loads every dataset and dispatches on cfg.scenario.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& base_dir = {});

/// Writes curves/<stem>.csv, summary.csv, samples.csv, config.txt and, when
/// present, ranking.csv, crossovers.csv, plateaus.csv, audit.csv and
/// plot.py into `dir` (created if needed).
void write_scenario_outputs(const ScenarioResult& result, const std::filesystem::path& dir);

/// min/median/max of values (median averages the middle pair).
struct Spread {
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};
Spread spread(std::vector<double> values);

}  // namespace leakguess
