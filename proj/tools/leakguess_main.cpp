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

// leakguess command-line entry point. Exit status: 0 on success, 1 on a
// usage error, 2 on unreadable or malformed input.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "leakguess/curves.hpp"
#include "leakguess/dist.hpp"
#include "leakguess/error.hpp"
#include "leakguess/experiments.hpp"
#include "leakguess/infotheory.hpp"
#include "leakguess/ingest.hpp"
#include "leakguess/sampling.hpp"
#include "leakguess/synth.hpp"

namespace fs = std::filesystem;
using namespace leakguess;

namespace {

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

constexpr const char* kFormats = R"(File formats:
  raw dump       one record per line, "<user><sep><password>" or, with
                 --mode password-only, the password alone
  .lwft table    "LWFT1", "total=<N>", then "<count>\t<token>" lines in
                 descending count order; \\ \t \r \n escape token bytes
  .lwap profile  "LWAP1", "total=<N>", then one count per line, descending;
                 holds no password text
  curve CSV      trial,g,value,kind,unit
)";

// Accepts a single byte or one of \t \n \0 \\ and the names "tab", "nul".
char parse_char_option(const std::string& text, const char* flag) {
  if (text.size() == 1) return text[0];
  if (text == "\\t" || text == "tab") return '\t';
  if (text == "\\n") return '\n';
  if (text == "\\0" || text == "nul") return '\0';
  if (text == "\\\\") return '\\';
  throw CLI::ValidationError(flag, "expected a single character, \\t, \\n or \\0");
}

bool is_profile_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), 0, "cannot open for reading");
  std::string first;
  std::getline(in, first);
  return first == "LWAP1";
}

// Tables or profiles; profiles get synthetic token names.
FrequencyTable load_table_any(const fs::path& path) {
  if (is_profile_file(path)) return from_profile(load_anon_profile(path).descending_counts);
  return load_frequency_table(path);
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path, 0, "cannot open for writing");
  fn(out);
  if (!out) throw DataError(path, 0, "write failed");
}

void print_stats(std::ostream& out, const TailStats& s) {
  out << "unique,freq1,gt1,total,unique_per_user,users_per_unique\n";
  char ratios[96];
  std::snprintf(ratios, sizeof ratios, "%.17g,%.17g", s.unique_per_user, s.users_per_unique);
  out << s.unique_count << ',' << s.freq1_count << ',' << s.freq_gt1_count << ','
      << s.total_users << ',' << ratios << '\n';
}

Ordering require_ordering(const std::string& text) {
  auto o = parse_ordering(text);
  if (!o) throw CLI::ValidationError("--ordering", "expected best, worst or random");
  return *o;
}

Unit require_unit(const std::string& text) {
  auto u = parse_unit(text);
  if (!u) throw CLI::ValidationError("--unit", "expected users or probability");
  return *u;
}

// Stochastic subcommands refuse to run without an explicit seed.
std::uint64_t require_seed(const std::optional<std::uint64_t>& seed, const char* why) {
  if (!seed) throw CLI::RequiredError(std::string("--seed (") + why + ")");
  return *seed;
}

struct IngestArgs {
  std::string input, out, anon_out, sep = ":", delim = "\\n", mode = "user-password";
  bool keep_whitespace = false;
};

int run_ingest(const IngestArgs& a) {
  ParseConfig cfg;
  cfg.separator = parse_char_option(a.sep, "--sep");
  cfg.line_delimiter = parse_char_option(a.delim, "--delim");
  cfg.mode = a.mode == "password-only" ? ParseMode::kPasswordOnly : ParseMode::kUserPassword;
  CleanOptions clean_opts;
  clean_opts.drop_whitespace = !a.keep_whitespace;
  const IngestResult r = ingest_file(a.input, cfg, clean_opts);
  save_frequency_table(r.table, a.out);
  if (!a.anon_out.empty()) save_anon_profile(anonymize(r.table), a.anon_out);
  std::cout << "lines=" << r.stats.lines << " entries=" << r.stats.entries
            << " skipped=" << r.stats.skipped << " users=" << r.table.total_users()
            << " unique=" << r.table.unique_count() << '\n';
  if (!r.stats.skipped_examples.empty()) {
    std::cerr << a.input << ": skipped lines without a separator, first at";
    for (auto l : r.stats.skipped_examples) std::cerr << ' ' << l;
    std::cerr << '\n';
  }
  return 0;
}

struct StatsArgs {
  std::string input;
  std::size_t top = 0;
  bool reveal = false;
};

int run_stats(const StatsArgs& a) {
  if (is_profile_file(a.input)) {
    const AnonProfile p = load_anon_profile(fs::path(a.input));
    print_stats(std::cout, tail_stats(p));
    if (a.top > 0) {
      std::cout << "rank,count\n";
      for (std::size_t i = 0; i < std::min(a.top, p.descending_counts.size()); ++i) {
        std::cout << i + 1 << ',' << p.descending_counts[i] << '\n';
      }
    }
    return 0;
  }
  const RankedDistribution dist = rank(load_frequency_table(fs::path(a.input)));
  print_stats(std::cout, tail_stats(dist));
  if (a.top > 0) {
    std::cout << (a.reveal ? "rank,count,token\n" : "rank,count\n");
    for (std::size_t r = 1; r <= std::min(a.top, dist.unique_count()); ++r) {
      const auto& e = dist.at_rank(r);
      std::cout << r << ',' << e.count;
      if (a.reveal) std::cout << ',' << escape_token(e.token);
      std::cout << '\n';
    }
  }
  return 0;
}

struct SampleArgs {
  std::string input, out, remainder_out, mode = "with";
  std::uint64_t n = 0, trial = 0;
  std::optional<std::uint64_t> seed;
};

int run_sample(const SampleArgs& a) {
  const std::uint64_t seed = require_seed(a.seed, "sampling is random");
  const FrequencyTable source = load_table_any(a.input);
  const SeedSpec spec{seed, a.trial};
  if (a.mode == "with") {
    if (!a.remainder_out.empty()) {
      throw CLI::ValidationError("--remainder", "only meaningful with --mode without");
    }
    const Sample s = sample_with_replacement(source, a.n, spec);
    save_frequency_table(s.table, a.out);
    std::cout << "users=" << s.table.total_users() << " unique=" << s.table.unique_count()
              << '\n';
    return 0;
  }
  const SplitResult split = sample_without_replacement(source, a.n, spec);
  save_frequency_table(split.sample.table, a.out);
  if (!a.remainder_out.empty()) save_frequency_table(split.remainder, a.remainder_out);
  std::cout << "users=" << split.sample.table.total_users()
            << " unique=" << split.sample.table.unique_count()
            << " remainder_users=" << split.remainder.total_users()
            << " conserved=" << (conserves(source, split) ? 1 : 0) << '\n';
  return 0;
}

struct CurveArgs {
  std::string target, order_from, kind = "F", ordering = "best", unit = "users", gap_mode,
                                  out;
  std::optional<std::uint64_t> seed;
};

GuessOrder order_from_file(const CurveArgs& a) {
  const Ordering ordering = require_ordering(a.ordering);
  std::uint64_t seed = 0;
  if (ordering == Ordering::kRandom) seed = require_seed(a.seed, "random ordering");
  return reorder(rank(load_table_any(a.order_from)), ordering, seed,
                 fs::path(a.order_from).stem().string());
}

int run_curve(const CurveArgs& a) {
  const Unit unit = require_unit(a.unit);
  const FrequencyTable target = load_table_any(a.target);
  GuessCurve curve;
  if (a.kind == "F") {
    if (!a.order_from.empty()) {
      throw CLI::ValidationError("--order-from", "F uses the target's own order");
    }
    curve = optimal_curve(rank(target), unit);
  } else {
    if (a.order_from.empty()) throw CLI::RequiredError("--order-from (needed for G)");
    curve = attack_curve(order_from_file(a), target, unit);
  }
  curve.target_id = fs::path(a.target).stem().string();
  with_output(a.out, [&](std::ostream& out) { write_curve_csv(out, {&curve, 1}); });
  return 0;
}

int run_gap(const CurveArgs& a) {
  const Unit unit = require_unit(a.unit);
  const auto extend = parse_gap_extension(a.gap_mode);
  if (!extend) throw CLI::ValidationError("--gap-mode", "expected truncate or extend_optimal");
  const RankedDistribution p0 = rank(load_table_any(a.target));
  GuessCurve curve = gap_curve(p0, order_from_file(a), *extend, unit);
  curve.target_id = fs::path(a.target).stem().string();
  with_output(a.out, [&](std::ostream& out) { write_curve_csv(out, {&curve, 1}); });
  return 0;
}

struct SanovArgs {
  std::uint64_t n = 0;
  std::optional<std::uint64_t> support, trials, seed;
  double alpha = 0.0;
  std::string p0;
};

int run_sanov(const SanovArgs& a) {
  std::optional<RankedDistribution> p0;
  if (!a.p0.empty()) p0 = rank(load_table_any(a.p0));
  std::uint64_t support = 0;
  if (a.support) {
    support = *a.support;
  } else if (p0) {
    support = p0->unique_count();
  } else {
    throw CLI::RequiredError("--support (or --p0)");
  }
  const SanovReport report = sanov_report(a.n, support, a.alpha);
  write_sanov_csv_header(std::cout);
  write_sanov_csv_row(std::cout, report);
  if (a.trials) {
    if (!p0) throw CLI::RequiredError("--p0 (needed for --trials)");
    const std::uint64_t seed = require_seed(a.seed, "atypicality trials are random");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g",
                  atypicality_rate(*p0, a.n, a.alpha, *a.trials, seed));
    std::cout << "atypicality_rate,trials\n" << buf << ',' << *a.trials << '\n';
  }
  return 0;
}

struct SynthArgs {
  std::string preset_name, profile, out, anon_out, prefix = "w";
  std::optional<std::uint64_t> vocab, users, seed, offset;
  std::optional<double> exponent, shift;
  unsigned threads = 1;
  bool hotmail_profile = false;
};

int run_synth(const SynthArgs& a) {
  FrequencyTable table;
  const bool generator_flags = !a.preset_name.empty() || a.vocab || a.users || a.exponent ||
                               a.shift;
  if (!a.profile.empty() || a.hotmail_profile) {
    if (generator_flags || (!a.profile.empty() && a.hotmail_profile)) {
      throw CLI::ValidationError("--profile", "cannot be combined with other table sources");
    }
    const auto counts = a.hotmail_profile
                            ? hotmail_like_profile()
                            : load_anon_profile(fs::path(a.profile)).descending_counts;
    table = from_profile(counts, a.prefix);
  } else {
    const std::uint64_t seed = require_seed(a.seed, "generation is random");
    ZipfMandelbrotSpec spec;
    if (!a.preset_name.empty()) {
      auto p = preset(a.preset_name, seed);
      if (!p) throw CLI::ValidationError("--preset", "unknown preset '" + a.preset_name + "'");
      spec = *p;
    } else if (!a.vocab || !a.users) {
      throw CLI::RequiredError("--vocab and --users (or --preset / --profile)");
    }
    spec.seed = seed;
    if (a.vocab) spec.vocab_size = *a.vocab;
    if (a.users) spec.users = *a.users;
    if (a.exponent) spec.exponent = *a.exponent;
    if (a.shift) spec.shift = *a.shift;
    if (a.offset) spec.token_offset = *a.offset;
    spec.token_prefix = a.prefix;
    table = generate(spec, a.threads);
  }
  if (!a.out.empty()) save_frequency_table(table, a.out);
  if (!a.anon_out.empty()) save_anon_profile(anonymize(table), a.anon_out);
  print_stats(std::cout, tail_stats(rank(table)));
  return 0;
}

struct ScenarioArgs {
  std::string config, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

int run_scenario_cmd(const ScenarioArgs& a) {
  ScenarioConfig cfg = load_scenario_config(a.config);
  cfg.base_seed = require_seed(a.seed, "scenarios are random");
  if (a.threads) cfg.threads = *a.threads;
  const ScenarioResult result = run_scenario(cfg, fs::path(a.config).parent_path());
  write_scenario_outputs(result, a.out_dir);
  std::cout << "scenario=" << to_string(cfg.scenario) << " curve_files=" << result.curves.size()
            << " summary_rows=" << result.summary.size() << " out=" << a.out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Password frequency analysis and guess-curve toolkit.\n" + std::string(kFormats),
               "leakguess"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "leakguess 0.1.0");

  IngestArgs ingest_args;
  auto* ingest = app.add_subcommand("ingest", "Clean a raw dump into a frequency table");
  ingest->add_option("input", ingest_args.input, "Raw dump")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", ingest_args.out, ".lwft output")->required();
  ingest->add_option("--anon-out", ingest_args.anon_out, "Also write an .lwap profile");
  ingest->add_option("--sep", ingest_args.sep, "User/password separator")->capture_default_str();
  ingest->add_option("--delim", ingest_args.delim, "Record delimiter")->capture_default_str();
  ingest->add_option("--mode", ingest_args.mode, "user-password or password-only")
      ->check(CLI::IsMember({"user-password", "password-only"}))
      ->capture_default_str();
  ingest->add_flag("--keep-whitespace", ingest_args.keep_whitespace,
                   "Keep empty and whitespace-only passwords");
  ingest->footer(kFormats);

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Tail statistics of a table or profile");
  stats->add_option("input", stats_args.input, ".lwft or .lwap file")->required();
  stats->add_option("--top", stats_args.top, "Also list the K most frequent ranks");
  stats->add_flag("--reveal", stats_args.reveal, "Print tokens in the --top listing");
  stats->footer(kFormats);

  SampleArgs sample_args;
  auto* sample = app.add_subcommand("sample", "Draw n users from a table");
  sample->add_option("input", sample_args.input, "Source .lwft or .lwap")->required();
  sample->add_option("--n", sample_args.n, "Users to draw")->required();
  sample->add_option("--mode", sample_args.mode, "with or without replacement")
      ->check(CLI::IsMember({"with", "without"}))
      ->capture_default_str();
  sample->add_option("--seed", sample_args.seed, "Base seed (required)");
  sample->add_option("--trial", sample_args.trial, "Trial index mixed into the seed")
      ->capture_default_str();
  sample->add_option("--out", sample_args.out, "Sample .lwft")->required();
  sample->add_option("--remainder", sample_args.remainder_out, "Remainder .lwft (mode without)");
  sample->footer(kFormats);

  CurveArgs curve_args;
  auto* curve = app.add_subcommand("curve", "Optimal (F) or attack (G) guess curve as CSV");
  curve->add_option("target", curve_args.target, "Target .lwft or .lwap")->required();
  curve->add_option("--kind", curve_args.kind, "F or G")
      ->check(CLI::IsMember({"F", "G"}))
      ->capture_default_str();
  curve->add_option("--order-from", curve_args.order_from, "Table whose ranking gives the order");
  curve->add_option("--ordering", curve_args.ordering, "best, worst or random")
      ->capture_default_str();
  curve->add_option("--unit", curve_args.unit, "users or probability")->capture_default_str();
  curve->add_option("--seed", curve_args.seed, "Shuffle seed (required for random)");
  curve->add_option("--out", curve_args.out, "CSV output (default stdout)");
  curve->footer(kFormats);

  CurveArgs gap_args;
  gap_args.gap_mode = "truncate";
  auto* gap = app.add_subcommand("gap", "Guessing-gap (H) curve of an order against p0");
  gap->add_option("p0", gap_args.target, "True distribution .lwft or .lwap")->required();
  gap->add_option("--order-from", gap_args.order_from, "Table whose ranking gives the order")
      ->required();
  gap->add_option("--ordering", gap_args.ordering, "best, worst or random")->capture_default_str();
  gap->add_option("--gap-mode", gap_args.gap_mode, "truncate or extend_optimal")
      ->capture_default_str();
  gap->add_option("--unit", gap_args.unit, "users or probability")->capture_default_str();
  gap->add_option("--seed", gap_args.seed, "Shuffle seed (required for random)");
  gap->add_option("--out", gap_args.out, "CSV output (default stdout)");
  gap->footer(kFormats);

  SanovArgs sanov_args;
  auto* sanov = app.add_subcommand("sanov", "Sanov bound and turning point as CSV");
  sanov->add_option("--n", sanov_args.n, "Sample size")->required();
  sanov->add_option("--support", sanov_args.support, "Support size |X| (default: --p0 size)");
  sanov->add_option("--alpha", sanov_args.alpha, "KL threshold in bits")->required();
  sanov->add_option("--p0", sanov_args.p0, "Source table for the Monte-Carlo rate");
  sanov->add_option("--trials", sanov_args.trials, "Monte-Carlo trials for atypicality_rate");
  sanov->add_option("--seed", sanov_args.seed, "Seed (required with --trials)");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic Zipf-Mandelbrot table");
  synth->add_option("--preset", synth_args.preset_name, "rockyou-like, flirtlife-like, "
                                                        "hotmail-like or compubits-like");
  synth->add_option("--profile", synth_args.profile, "Rebuild a table from an .lwap profile");
  synth->add_flag("--hotmail-profile", synth_args.hotmail_profile,
                  "Use the built-in 7300-user profile (420 repeated, 6250 single)");
  synth->add_option("--vocab", synth_args.vocab, "Vocabulary size V");
  synth->add_option("--exponent", synth_args.exponent, "Exponent s >= 0");
  synth->add_option("--shift", synth_args.shift, "Shift b >= 0");
  synth->add_option("--users", synth_args.users, "Users N");
  synth->add_option("--offset", synth_args.offset, "Added to ranks when naming tokens");
  synth->add_option("--prefix", synth_args.prefix, "Token name prefix")->capture_default_str();
  synth->add_option("--seed", synth_args.seed, "Seed (required for generated tables)");
  synth->add_option("--threads", synth_args.threads, "Worker threads")->check(CLI::Range(1, 1024));
  synth->add_option("--out", synth_args.out, ".lwft output");
  synth->add_option("--anon-out", synth_args.anon_out, ".lwap output");
  synth->footer(kFormats);

  ScenarioArgs scenario_args;
  auto* scenario = app.add_subcommand("scenario", "Run an experiment scenario file");
  scenario->add_option("config", scenario_args.config, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  scenario->add_option("--seed", scenario_args.seed, "Base seed (required)");
  scenario->add_option("--out", scenario_args.out_dir, "Output directory")->required();
  scenario->add_option("--threads", scenario_args.threads, "Worker threads")
      ->check(CLI::Range(1, 1024));
  scenario->footer(
      "Scenario files are 'key = value' lines; '#' starts a comment.\n"
      "Keys: scenario (self_sample, ratio, sample_vs_full, gap_orderings,\n"
      "cross_dataset, remainder), n (list, 'all'), target_n, trials, unit,\n"
      "gap_mode, report_g (list, 'max'), mode (with/without), threads, plot,\n"
      "dataset.<i>.{name, path, profile, preset, synth.vocab, synth.exponent,\n"
      "synth.shift, synth.users, synth.seed, synth.offset, synth.prefix}.\n"
      "Outputs: curves/<stem>.csv, summary.csv, samples.csv, config.txt and\n"
      "where relevant ranking.csv, crossovers.csv, plateaus.csv, audit.csv, plot.py.");

  try {
    app.parse(argc, argv);
    if (*ingest) return run_ingest(ingest_args);
    if (*stats) return run_stats(stats_args);
    if (*sample) return run_sample(sample_args);
    if (*curve) return run_curve(curve_args);
    if (*gap) return run_gap(gap_args);
    if (*sanov) return run_sanov(sanov_args);
    if (*synth) return run_synth(synth_args);
    if (*scenario) return run_scenario_cmd(scenario_args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  } catch (const DataError& e) {
    std::cerr << "leakguess: " << e.what() << '\n';
    return kDataError;
  } catch (const InvalidArgument& e) {
    std::cerr << "leakguess: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "leakguess: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}
