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

#include <gtest/gtest.h>

#include <sstream>

#include "leakguess/error.hpp"
#include "leakguess/rng.hpp"

namespace leakguess {
namespace {

FrequencyTable table_of(std::initializer_list<std::pair<const char*, std::uint64_t>> items) {
  FrequencyTable t;
  for (const auto& [k, v] : items) t.add(k, v);
  return t;
}

TEST(ParseTest, SplitsAtFirstSeparator) {
  std::istringstream in("alice:pw:1\n");
  const auto r = parse_leak_file(in, {});
  ASSERT_EQ(r.entries.size(), 1U);
  EXPECT_EQ(r.entries[0].user_id, "alice");
  EXPECT_EQ(r.entries[0].password, "pw:1");
  EXPECT_EQ(r.entries[0].line_number, 1U);
}

TEST(ParseTest, PasswordOnlySynthesizesUsers) {
  std::istringstream in("raw\nraw\n");
  ParseConfig cfg;
  cfg.mode = ParseMode::kPasswordOnly;
  const auto r = parse_leak_file(in, cfg);
  ASSERT_EQ(r.entries.size(), 2U);
  EXPECT_EQ(r.entries[0].password, "raw");
  EXPECT_NE(r.entries[0].user_id, r.entries[1].user_id);
}

TEST(ParseTest, LinesWithoutSeparatorAreSkippedAndCounted) {
  std::istringstream in("a:1\nbroken\nb:2\n");
  const auto r = parse_leak_file(in, {});
  EXPECT_EQ(r.entries.size(), 2U);
  EXPECT_EQ(r.stats.skipped, 1U);
  EXPECT_EQ(r.stats.lines, 3U);
  ASSERT_EQ(r.stats.skipped_examples.size(), 1U);
  EXPECT_EQ(r.stats.skipped_examples[0], 2U);
}

TEST(ParseTest, CustomDelimiterAndSeparatorKeepBytes) {
  std::string raw = std::string("u1\tp\xff\r") + '\0' + "u2\t \n";
  std::istringstream in(raw);
  ParseConfig cfg;
  cfg.line_delimiter = '\0';
  cfg.separator = '\t';
  const auto r = parse_leak_file(in, cfg);
  ASSERT_EQ(r.entries.size(), 2U);
  EXPECT_EQ(r.entries[0].password, "p\xff\r");
  EXPECT_EQ(r.entries[1].password, " \n");
  EXPECT_LT(r.entries[0].line_number, r.entries[1].line_number);
}

TEST(CleanTest, LastEntryWinsAndWhitespaceDropped) {
  const std::vector<RawEntry> entries = {
      {"u1", "x", 1}, {"u1", "y", 2}, {"u2", " ", 3}, {"u3", "x", 4}};
  const auto t = clean(entries);
  EXPECT_EQ(t, table_of({{"y", 1}, {"x", 1}}));
  EXPECT_EQ(t.total_users(), 2U);
}

TEST(CleanTest, CountsSharedPasswords) {
  const std::vector<RawEntry> entries = {{"u1", "a", 1}, {"u2", "a", 2}};
  EXPECT_EQ(clean(entries), table_of({{"a", 2}}));
}

TEST(CleanTest, EmptyInput) {
  const auto t = clean({});
  EXPECT_TRUE(t.empty());
  EXPECT_EQ(t.total_users(), 0U);
}

TEST(CleanTest, WhitespaceRuleCanBeDisabled) {
  const std::vector<RawEntry> entries = {{"u1", "", 1}, {"u2", "\t\r\n ", 2}};
  EXPECT_TRUE(clean(entries).empty());
  const auto kept = clean(entries, {.drop_whitespace = false});
  EXPECT_EQ(kept.total_users(), 2U);
  EXPECT_FALSE(is_whitespace_password("a "));
}

TEST(CleanTest, LastEntryResolvedByLineNumberNotArrivalOrder) {
  CleanAccumulator acc;
  acc.add(RawEntry{"u", "late", 9});
  acc.add(RawEntry{"u", "early", 3});
  EXPECT_EQ(acc.finish(), table_of({{"late", 1}}));
}

TEST(CleanTest, IdempotentOnReconstructedEntries) {
  const auto t = table_of({{"a", 3}, {"b", 1}, {"c", 2}});
  std::vector<RawEntry> entries;
  std::uint64_t line = 0;
  for (const auto& [token, count] : t.sorted_entries()) {
    for (std::uint64_t i = 0; i < count; ++i) {
      entries.push_back({"user" + std::to_string(line), token, line + 1});
      ++line;
    }
  }
  EXPECT_EQ(clean(entries), t);
}

// Property: any split of the stream into chunks, cleaned separately and
// merged in any order, gives the sequential table.
TEST(CleanTest, ChunkedMergeMatchesSequential) {
  Xoshiro256 rng(2024);
  for (int round = 0; round < 50; ++round) {
    std::vector<RawEntry> entries;
    const auto n = 1 + rng.below(200);
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto pw = rng.below(8);
      entries.push_back({"u" + std::to_string(rng.below(40)),
                         pw == 0 ? std::string(" ") : "p" + std::to_string(pw), i + 1});
    }
    const auto expected = clean(entries);

    std::vector<CleanAccumulator> chunks(1 + rng.below(6));
    std::size_t begin = 0;
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      const std::size_t end = c + 1 == chunks.size()
                                  ? entries.size()
                                  : begin + rng.below(entries.size() - begin + 1);
      for (std::size_t i = begin; i < end; ++i) chunks[c].add(entries[i]);
      begin = end;
    }
    // Merge back to front so later chunks arrive first.
    CleanAccumulator merged;
    for (auto it = chunks.rbegin(); it != chunks.rend(); ++it) merged.merge(std::move(*it));
    ASSERT_EQ(merged.finish(), expected) << "round " << round;
  }
}

TEST(IngestTest, StreamingMatchesBatchInBothModes) {
  const std::string raw = "a:x\nb:y\na:z\nc: \nd:y\nbad\n";
  {
    std::istringstream s1(raw), s2(raw);
    const auto streamed = ingest_stream(s1, {});
    const auto batch = parse_leak_file(s2, {});
    EXPECT_EQ(streamed.table, clean(batch.entries));
    EXPECT_EQ(streamed.stats.skipped, 1U);
    EXPECT_EQ(streamed.table, table_of({{"z", 1}, {"y", 2}}));
  }
  {
    ParseConfig cfg;
    cfg.mode = ParseMode::kPasswordOnly;
    std::istringstream s1(raw), s2(raw);
    EXPECT_EQ(ingest_stream(s1, cfg).table, clean(parse_leak_file(s2, cfg).entries));
  }
}

TEST(FrequencyTableTest, ConservationAndRemove) {
  FrequencyTable t;
  t.add("a", 2);
  t.add("b");
  t.add("a");
  EXPECT_EQ(t.total_users(), 4U);
  t.remove("a", 3);
  EXPECT_FALSE(t.contains("a"));
  EXPECT_EQ(t.total_users(), 1U);
  EXPECT_THROW(t.remove("b", 2), InvalidArgument);
  EXPECT_THROW(t.add("c", 0), InvalidArgument);
}

TEST(TableFormatTest, RoundTrip) {
  const auto t = table_of({{"a", 5}, {"b", 3}});
  std::stringstream io;
  write_frequency_table(t, io);
  EXPECT_EQ(io.str(), "LWFT1\ntotal=8\n5\ta\n3\tb\n");
  EXPECT_EQ(load_frequency_table(io), t);
}

TEST(TableFormatTest, EscapesControlBytes) {
  FrequencyTable t;
  t.add("tab\there", 2);
  t.add("back\\slash\r\n", 1);
  t.add("", 1);
  std::stringstream io;
  write_frequency_table(t, io);
  EXPECT_NE(io.str().find("tab\\there"), std::string::npos);
  EXPECT_EQ(load_frequency_table(io), t);
}

TEST(TableFormatTest, RecordsSortedByCountThenBytes) {
  const auto t = table_of({{"b", 1}, {"a", 1}, {"z", 4}});
  std::stringstream io;
  write_frequency_table(t, io);
  EXPECT_EQ(io.str(), "LWFT1\ntotal=6\n4\tz\n1\ta\n1\tb\n");
}

TEST(TableFormatTest, MalformedInputsNameTheLine) {
  auto load = [](const std::string& text) {
    std::istringstream in(text);
    return load_frequency_table(in, "t.lwft");
  };
  EXPECT_THROW(load("LWFT2\ntotal=0\n"), DataError);
  EXPECT_THROW(load("LWFT1\ntotal=x\n"), DataError);
  EXPECT_THROW(load("LWFT1\ntotal=3\n3\ta\\q\n"), DataError);
  EXPECT_THROW(load("LWFT1\ntotal=3\n3\ta\n"  "1\ta\n"), DataError);
  EXPECT_THROW(load("LWFT1\ntotal=9\n3\ta\n"), DataError);
  try {
    load("LWFT1\ntotal=1\nnotab\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.line(), 3U);
    EXPECT_NE(std::string(e.what()).find("t.lwft:3"), std::string::npos);
  }
}

TEST(AnonymizeTest, SortedCountsOnly) {
  const auto p = anonymize(table_of({{"a", 5}, {"b", 3}, {"c", 1}, {"d", 1}}));
  EXPECT_EQ(p.descending_counts, (std::vector<std::uint64_t>{5, 3, 1, 1}));
  EXPECT_EQ(p.total_users, 10U);
  EXPECT_TRUE(anonymize({}).descending_counts.empty());
}

TEST(AnonymizeTest, ProfileFileHasNoTokens) {
  const auto p = anonymize(table_of({{"secret", 2}, {"hunter2", 1}}));
  std::stringstream io;
  write_anon_profile(p, io);
  EXPECT_EQ(io.str(), "LWAP1\ntotal=3\n2\n1\n");
  EXPECT_EQ(load_anon_profile(io), p);
  std::istringstream bad("LWAP1\ntotal=3\n1\n2\n");
  EXPECT_THROW(load_anon_profile(bad), DataError);
}

}  // namespace
}  // namespace leakguess
