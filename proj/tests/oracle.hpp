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

// Naive reference implementations used only by tests. They share no code
// with the library: tables are plain std::map, orders are plain vectors,
// and every curve value is recomputed from scratch by a full sum.

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "leakguess/ingest.hpp"

namespace leakguess::oracle {

using Table = std::map<std::string, std::int64_t>;

inline Table to_map(const FrequencyTable& t) {
  Table m;
  for (const auto& [k, v] : t) m[k] = static_cast<std::int64_t>(v);
  return m;
}

// Selection-sort ranking: repeatedly pick the largest count, smallest token.
inline std::vector<std::string> naive_rank(Table t) {
  std::vector<std::string> out;
  while (!t.empty()) {
    auto best = t.begin();
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    out.push_back(best->first);
    t.erase(best);
  }
  return out;
}

inline std::int64_t lookup(const Table& t, const std::string& k) {
  auto it = t.find(k);
  return it == t.end() ? 0 : it->second;
}

inline std::vector<std::int64_t> naive_f(const Table& t) {
  const auto order = naive_rank(t);
  std::vector<std::int64_t> out;
  for (std::size_t g = 1; g <= order.size(); ++g) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < g; ++k) s += lookup(t, order[k]);
    out.push_back(s);
  }
  return out;
}

inline std::vector<std::int64_t> naive_g(const std::vector<std::string>& order, const Table& target) {
  std::vector<std::int64_t> out;
  for (std::size_t g = 1; g <= order.size(); ++g) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < g; ++k) s += lookup(target, order[k]);
    out.push_back(s);
  }
  return out;
}

// Truncated H: sum over k <= g of p0(best k-th) - p0(order k-th).
inline std::vector<std::int64_t> naive_h(const Table& p0, const std::vector<std::string>& order) {
  const auto best = naive_rank(p0);
  std::vector<std::int64_t> out;
  for (std::size_t g = 1; g <= order.size(); ++g) {
    std::int64_t s = 0;
    for (std::size_t k = 0; k < g; ++k) {
      const std::int64_t opt = k < best.size() ? lookup(p0, best[k]) : 0;
      s += opt - lookup(p0, order[k]);
    }
    out.push_back(s);
  }
  return out;
}

// Extended H: the order followed by the unguessed p0 tokens in p0 rank order.
inline std::vector<std::int64_t> naive_h_extended(const Table& p0,
                                                  std::vector<std::string> order) {
  for (const auto& token : naive_rank(p0)) {
    if (std::find(order.begin(), order.end(), token) == order.end()) order.push_back(token);
  }
  return naive_h(p0, order);
}

}  // namespace leakguess::oracle
