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

// Raw leak parsing, the last-entry/whitespace cleaning rule, and the two
// on-disk formats (LWFT1 frequency tables, LWAP1 anonymized profiles).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace leakguess {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

/// Multiset of password tokens. Tokens are opaque byte strings; counts are
/// always >= 1 and total_users() is the sum of all counts.
class FrequencyTable {
 public:
  using Map = std::unordered_map<std::string, std::uint64_t, StringHash, std::equal_to<>>;

  FrequencyTable() = default;

  /// Adds `count` users with password `token`. count must be positive.
  void add(std::string_view token, std::uint64_t count = 1);

  /// Removes `count` users from `token`; the token disappears at zero.
  void remove(std::string_view token, std::uint64_t count);

  std::uint64_t count(std::string_view token) const noexcept;
  bool contains(std::string_view token) const noexcept { return count(token) > 0; }

  std::uint64_t total_users() const noexcept { return total_; }
  std::size_t unique_count() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return counts_.empty(); }

  /// Iteration order is unspecified; use sorted_entries() when order matters.
  Map::const_iterator begin() const noexcept { return counts_.begin(); }
  Map::const_iterator end() const noexcept { return counts_.end(); }

  /// Entries by descending count, then ascending token bytes.
  std::vector<std::pair<std::string, std::uint64_t>> sorted_entries() const;

  /// Adds every entry of `other` into this table.
  void merge(const FrequencyTable& other);

  friend bool operator==(const FrequencyTable& a, const FrequencyTable& b) {
    return a.total_ == b.total_ && a.counts_ == b.counts_;
  }

 private:
  Map counts_;
  std::uint64_t total_ = 0;
};

struct RawEntry {
  std::string user_id;
  std::string password;
  std::uint64_t line_number = 0;
};

enum class ParseMode { kUserPassword, kPasswordOnly };

struct ParseConfig {
  char line_delimiter = '\n';
  char separator = ':';
  ParseMode mode = ParseMode::kUserPassword;
};

struct ParseStats {
  std::uint64_t lines = 0;
  std::uint64_t entries = 0;
  std::uint64_t skipped = 0;
  /// Line numbers of the first few skipped lines, for diagnostics.
  std::vector<std::uint64_t> skipped_examples;
};

/// Pull-style reader over a raw dump. Holds no more than one line in memory.
class LeakReader {
 public:
  LeakReader(std::istream& in, ParseConfig config, std::string source_name = {});

  /// Fills `entry` with the next parseable line; false at end of stream.
  /// Throws DataError if the stream fails for a reason other than EOF.
  bool next(RawEntry& entry);

  const ParseStats& stats() const noexcept { return stats_; }

 private:
  std::istream& in_;
  ParseConfig config_;
  std::string source_;
  std::string line_;
  ParseStats stats_;
};

struct ParseResult {
  std::vector<RawEntry> entries;
  ParseStats stats;
};

/// Reads a whole stream into memory. Prefer ingest_stream for large dumps.
ParseResult parse_leak_file(std::istream& in, const ParseConfig& config,
                            std::string_view source_name = {});

struct CleanOptions {
  /// Drop users whose final password is empty or only space/tab/CR/LF.
  bool drop_whitespace = true;
};

bool is_whitespace_password(std::string_view password) noexcept;

/// Keeps the last entry per user (by line number). Accumulators built over
/// disjoint chunks of a stream can be merged in any order and grouping;
/// the per-user winner is always the entry with the highest line number.
class CleanAccumulator {
 public:
  void add(const RawEntry& entry);
  void add(RawEntry&& entry);
  void merge(CleanAccumulator&& other);
  std::size_t user_count() const noexcept { return last_.size(); }
  FrequencyTable finish(const CleanOptions& options = {}) const;

 private:
  struct Latest {
    std::uint64_t line_number;
    std::string password;
  };
  std::unordered_map<std::string, Latest, StringHash, std::equal_to<>> last_;
};

FrequencyTable clean(std::span<const RawEntry> entries, const CleanOptions& options = {});

struct IngestResult {
  FrequencyTable table;
  ParseStats stats;
};

/// Streams a dump straight into a cleaned table. Password-only dumps are
/// counted directly (every line is its own user), so memory is proportional
/// to the number of distinct passwords. User-password dumps must remember
/// each user's latest password.
IngestResult ingest_stream(std::istream& in, const ParseConfig& config,
                           const CleanOptions& options = {}, std::string_view source_name = {});
IngestResult ingest_file(const std::filesystem::path& path, const ParseConfig& config,
                         const CleanOptions& options = {});

// Frequency-table format (LWFT1):
//   LWFT1
//   total=<N>
//   <count>\t<escaped token>      one per token, descending count then token bytes
// Backslash, tab, CR and LF in tokens are written as \\ \t \r \n.

std::string escape_token(std::string_view token);
/// Throws InvalidArgument on a dangling or unknown escape.
std::string unescape_token(std::string_view escaped);

void write_frequency_table(const FrequencyTable& table, std::ostream& out);
FrequencyTable load_frequency_table(std::istream& in, std::string_view source_name = {});
void save_frequency_table(const FrequencyTable& table, const std::filesystem::path& path);
FrequencyTable load_frequency_table(const std::filesystem::path& path);

/// Frequency-only view of a dataset; holds no password text.
struct AnonProfile {
  std::vector<std::uint64_t> descending_counts;
  std::uint64_t total_users = 0;

  friend bool operator==(const AnonProfile&, const AnonProfile&) = default;
};

AnonProfile anonymize(const FrequencyTable& table);

// Anonymized profile format (LWAP1): magic, "total=<N>", one count per line.
void write_anon_profile(const AnonProfile& profile, std::ostream& out);
AnonProfile load_anon_profile(std::istream& in, std::string_view source_name = {});
void save_anon_profile(const AnonProfile& profile, const std::filesystem::path& path);
AnonProfile load_anon_profile(const std::filesystem::path& path);

}  // namespace leakguess
