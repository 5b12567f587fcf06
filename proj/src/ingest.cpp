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

#include "leakguess/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "leakguess/error.hpp"

namespace leakguess {

namespace {

constexpr std::string_view kTableMagic = "LWFT1";
constexpr std::string_view kProfileMagic = "LWAP1";
constexpr std::size_t kMaxSkippedExamples = 8;

bool parse_u64(std::string_view text, std::uint64_t& value) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string display_name(std::string_view source) {
  return source.empty() ? std::string("<stream>") : std::string(source);
}

// Reads "total=<N>" from line 2 of either format.
std::uint64_t read_total_line(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source, 2, "missing total line");
  constexpr std::string_view prefix = "total=";
  std::uint64_t total = 0;
  if (!std::string_view(line).starts_with(prefix) ||
      !parse_u64(std::string_view(line).substr(prefix.size()), total)) {
    throw DataError(source, 2, "expected 'total=<N>'");
  }
  return total;
}

void read_magic(std::istream& in, const std::string& source, std::string_view magic) {
  std::string line;
  if (!std::getline(in, line) || line != magic) {
    throw DataError(source, 1, "bad magic header, expected '" + std::string(magic) + "'");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// FrequencyTable

void FrequencyTable::add(std::string_view token, std::uint64_t count) {
  if (count == 0) throw InvalidArgument("FrequencyTable::add: count must be positive");
  auto it = counts_.find(token);
  if (it == counts_.end()) {
    counts_.emplace(std::string(token), count);
  } else {
    it->second += count;
  }
  total_ += count;
}

void FrequencyTable::remove(std::string_view token, std::uint64_t count) {
  auto it = counts_.find(token);
  if (it == counts_.end() || it->second < count) {
    throw InvalidArgument("FrequencyTable::remove: more users than present");
  }
  it->second -= count;
  total_ -= count;
  if (it->second == 0) counts_.erase(it);
}

std::uint64_t FrequencyTable::count(std::string_view token) const noexcept {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<std::string, std::uint64_t>> FrequencyTable::sorted_entries() const {
  std::vector<std::pair<std::string, std::uint64_t>> out(counts_.begin(), counts_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

void FrequencyTable::merge(const FrequencyTable& other) {
  for (const auto& [token, count] : other) add(token, count);
}

// ---------------------------------------------------------------------------
// Parsing

LeakReader::LeakReader(std::istream& in, ParseConfig config, std::string source_name)
    : in_(in), config_(config), source_(std::move(source_name)) {}

bool LeakReader::next(RawEntry& entry) {
  while (std::getline(in_, line_, config_.line_delimiter)) {
    const std::uint64_t line_number = ++stats_.lines;
    if (config_.mode == ParseMode::kPasswordOnly) {
      entry.user_id = "#" + std::to_string(line_number);
      entry.password.assign(line_);
    } else {
      const auto pos = line_.find(config_.separator);
      if (pos == std::string::npos) {
        ++stats_.skipped;
        if (stats_.skipped_examples.size() < kMaxSkippedExamples) {
          stats_.skipped_examples.push_back(line_number);
        }
        continue;
      }
      entry.user_id.assign(line_, 0, pos);
      entry.password.assign(line_, pos + 1, std::string::npos);
    }
    entry.line_number = line_number;
    ++stats_.entries;
    return true;
  }
  if (in_.bad()) throw DataError(display_name(source_), stats_.lines + 1, "read error");
  return false;
}

ParseResult parse_leak_file(std::istream& in, const ParseConfig& config,
                            std::string_view source_name) {
  ParseResult result;
  LeakReader reader(in, config, std::string(source_name));
  RawEntry entry;
  while (reader.next(entry)) result.entries.push_back(entry);
  result.stats = reader.stats();
  return result;
}

// ---------------------------------------------------------------------------
// Cleaning

bool is_whitespace_password(std::string_view password) noexcept {
  return std::all_of(password.begin(), password.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; });
}

void CleanAccumulator::add(const RawEntry& entry) {
  auto it = last_.find(std::string_view(entry.user_id));
  if (it == last_.end()) {
    last_.emplace(entry.user_id, Latest{entry.line_number, entry.password});
  } else if (entry.line_number > it->second.line_number) {
    it->second = Latest{entry.line_number, entry.password};
  }
}

void CleanAccumulator::add(RawEntry&& entry) {
  auto it = last_.find(std::string_view(entry.user_id));
  if (it == last_.end()) {
    last_.emplace(std::move(entry.user_id),
                  Latest{entry.line_number, std::move(entry.password)});
  } else if (entry.line_number > it->second.line_number) {
    it->second = Latest{entry.line_number, std::move(entry.password)};
  }
}

void CleanAccumulator::merge(CleanAccumulator&& other) {
  for (auto& [user, latest] : other.last_) {
    auto it = last_.find(std::string_view(user));
    if (it == last_.end()) {
      last_.emplace(user, std::move(latest));
    } else if (latest.line_number > it->second.line_number) {
      it->second = std::move(latest);
    }
  }
  other.last_.clear();
}

FrequencyTable CleanAccumulator::finish(const CleanOptions& options) const {
  FrequencyTable table;
  for (const auto& [user, latest] : last_) {
    if (options.drop_whitespace && is_whitespace_password(latest.password)) continue;
    table.add(latest.password);
  }
  return table;
}

FrequencyTable clean(std::span<const RawEntry> entries, const CleanOptions& options) {
  CleanAccumulator acc;
  for (const auto& e : entries) acc.add(e);
  return acc.finish(options);
}

IngestResult ingest_stream(std::istream& in, const ParseConfig& config,
                           const CleanOptions& options, std::string_view source_name) {
  LeakReader reader(in, config, std::string(source_name));
  RawEntry entry;
  IngestResult result;
  if (config.mode == ParseMode::kPasswordOnly) {
    while (reader.next(entry)) {
      if (options.drop_whitespace && is_whitespace_password(entry.password)) continue;
      result.table.add(entry.password);
    }
  } else {
    CleanAccumulator acc;
    while (reader.next(entry)) acc.add(std::move(entry));
    result.table = acc.finish(options);
  }
  result.stats = reader.stats();
  return result;
}

IngestResult ingest_file(const std::filesystem::path& path, const ParseConfig& config,
                         const CleanOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), 0, "cannot open for reading");
  std::vector<char> buffer(1 << 20);
  in.rdbuf()->pubsetbuf(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  return ingest_stream(in, config, options, path.string());
}

// ---------------------------------------------------------------------------
// LWFT1

std::string escape_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_token(std::string_view escaped) {
  std::string out;
  out.reserve(escaped.size());
  for (std::size_t i = 0; i < escaped.size(); ++i) {
    const char c = escaped[i];
    if (c == '\t' || c == '\r' || c == '\n') {
      throw InvalidArgument("raw control byte inside token");
    }
    if (c != '\\') {
      out += c;
      continue;
    }
    if (++i == escaped.size()) throw InvalidArgument("dangling backslash in token");
    switch (escaped[i]) {
      case '\\': out += '\\'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case 'n': out += '\n'; break;
      default: throw InvalidArgument(std::string("unknown escape \\") + escaped[i]);
    }
  }
  return out;
}

void write_frequency_table(const FrequencyTable& table, std::ostream& out) {
  out << kTableMagic << '\n' << "total=" << table.total_users() << '\n';
  for (const auto& [token, count] : table.sorted_entries()) {
    out << count << '\t' << escape_token(token) << '\n';
  }
}

FrequencyTable load_frequency_table(std::istream& in, std::string_view source_name) {
  const std::string source = display_name(source_name);
  read_magic(in, source, kTableMagic);
  const std::uint64_t total = read_total_line(in, source);

  FrequencyTable table;
  std::string line;
  std::size_t line_number = 2;
  while (std::getline(in, line)) {
    ++line_number;
    const auto tab = line.find('\t');
    std::uint64_t count = 0;
    if (tab == std::string::npos || !parse_u64(std::string_view(line).substr(0, tab), count) ||
        count == 0) {
      throw DataError(source, line_number, "expected '<count>\\t<token>' with positive count");
    }
    std::string token;
    try {
      token = unescape_token(std::string_view(line).substr(tab + 1));
    } catch (const InvalidArgument& e) {
      throw DataError(source, line_number, e.what());
    }
    if (table.contains(token)) throw DataError(source, line_number, "duplicate token");
    table.add(token, count);
  }
  if (in.bad()) throw DataError(source, line_number + 1, "read error");
  if (table.total_users() != total) {
    throw DataError(source, 2,
                    "total=" + std::to_string(total) + " but records sum to " +
                        std::to_string(table.total_users()));
  }
  return table;
}

void save_frequency_table(const FrequencyTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open for writing");
  write_frequency_table(table, out);
  if (!out) throw DataError(path.string(), 0, "write failed");
}

FrequencyTable load_frequency_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), 0, "cannot open for reading");
  return load_frequency_table(in, path.string());
}

// ---------------------------------------------------------------------------
// LWAP1

AnonProfile anonymize(const FrequencyTable& table) {
  AnonProfile profile;
  profile.descending_counts.reserve(table.unique_count());
  for (const auto& [token, count] : table) profile.descending_counts.push_back(count);
  std::sort(profile.descending_counts.begin(), profile.descending_counts.end(),
            std::greater<>());
  profile.total_users = table.total_users();
  return profile;
}

void write_anon_profile(const AnonProfile& profile, std::ostream& out) {
  out << kProfileMagic << '\n' << "total=" << profile.total_users << '\n';
  for (auto c : profile.descending_counts) out << c << '\n';
}

AnonProfile load_anon_profile(std::istream& in, std::string_view source_name) {
  const std::string source = display_name(source_name);
  read_magic(in, source, kProfileMagic);
  AnonProfile profile;
  profile.total_users = read_total_line(in, source);

  std::string line;
  std::size_t line_number = 2;
  std::uint64_t sum = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::uint64_t count = 0;
    if (!parse_u64(line, count) || count == 0) {
      throw DataError(source, line_number, "expected a positive count");
    }
    if (!profile.descending_counts.empty() && count > profile.descending_counts.back()) {
      throw DataError(source, line_number, "counts must be non-increasing");
    }
    profile.descending_counts.push_back(count);
    sum += count;
  }
  if (in.bad()) throw DataError(source, line_number + 1, "read error");
  if (sum != profile.total_users) {
    throw DataError(source, 2,
                    "total=" + std::to_string(profile.total_users) + " but counts sum to " +
                        std::to_string(sum));
  }
  return profile;
}

void save_anon_profile(const AnonProfile& profile, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open for writing");
  write_anon_profile(profile, out);
  if (!out) throw DataError(path.string(), 0, "write failed");
}

AnonProfile load_anon_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), 0, "cannot open for reading");
  return load_anon_profile(in, path.string());
}

}  // namespace leakguess
