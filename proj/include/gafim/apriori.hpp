// Copyright 2026, the gafim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gafim/database.hpp"
#include "gafim/error.hpp"
#include "gafim/itemset.hpp"

namespace gafim {

/// Every frequent itemset of a database with its support count, in
/// LevelOrder (by size, then lexicographic). Never contains the empty set.
struct FrequentFamily {
  std::size_t transaction_count = 0;
  std::size_t item_count = 0;
  std::vector<CountedItemset> itemsets;

  std::size_t size() const noexcept { return itemsets.size(); }

  std::vector<Itemset> sets() const {
    std::vector<Itemset> out;
    out.reserve(itemsets.size());
    for (const auto& c : itemsets) out.push_back(c.items);
    return out;
  }

  std::unordered_map<Itemset, std::size_t, ItemsetHash> count_index() const {
    std::unordered_map<Itemset, std::size_t, ItemsetHash> idx;
    idx.reserve(itemsets.size());
    for (const auto& c : itemsets) idx.emplace(c.items, c.count);
    return idx;
  }

  friend bool operator==(const FrequentFamily&, const FrequentFamily&) = default;
};

inline void sort_level_order(std::vector<CountedItemset>& v) {
  std::sort(v.begin(), v.end(),
            [](const CountedItemset& a, const CountedItemset& b) { return LevelOrder{}(a.items, b.items); });
}

/// One Apriori pass: candidates C_k and the frequent subset L_k.
struct LevelSets {
  std::size_t k = 0;
  std::vector<Itemset> candidates;
  std::vector<CountedItemset> frequents;
};

struct LevelTrace {
  std::size_t k = 0;
  std::size_t candidate_count = 0;  // m_k = |C_k|
  std::size_t frequent_count = 0;   // |L_k|
  double seconds = 0.0;
};

struct AprioriTrace {
  std::vector<LevelTrace> levels;
  std::size_t total_candidates = 0;  // sum of m_k
  std::size_t database_scans = 0;
  double seconds = 0.0;

  std::size_t candidates_at(std::size_t k) const {
    for (const auto& l : levels) {
      if (l.k == k) return l.candidate_count;
    }
    return 0;
  }
};

struct AprioriResult {
  std::vector<LevelSets> levels;
  AprioriTrace trace;
  FrequentFamily family;
};

struct AprioriOptions {
  // Rows are partitioned across this many workers during each support scan.
  unsigned threads = 1;
};

namespace detail {

inline void require_uniform_cardinality(const std::vector<Itemset>& sets, std::size_t& k_out) {
  if (sets.empty()) {
    k_out = 0;
    return;
  }
  k_out = sets.front().cardinality();
  for (const auto& s : sets) {
    if (s.cardinality() != k_out) throw UsageError("itemsets of mixed cardinality in one level");
    if (s.width() != sets.front().width()) throw UsageError("itemsets of mixed width in one level");
  }
}

inline Itemset without_last(const Itemset& s) {
  Itemset r = s;
  if (!s.empty()) r.reset(s.last_position());
  return r;
}

}  // namespace detail

/// Candidate generation: joins every pair of (k-1)-itemsets that share their
/// first k-2 items, where the first one's last item is smaller. Input order
/// does not matter; output is lexicographically sorted and duplicate-free.
inline std::vector<Itemset> apriori_join(const std::vector<Itemset>& prev) {
  std::size_t k_minus_1 = 0;
  detail::require_uniform_cardinality(prev, k_minus_1);
  if (prev.empty()) return {};
  if (k_minus_1 == 0) throw UsageError("join needs itemsets of cardinality >= 1");

  std::vector<Itemset> sorted = prev;
  std::sort(sorted.begin(), sorted.end(), LexOrder{});
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  // Itemsets sharing a (k-2)-prefix are contiguous in lexicographic order.
  std::vector<Itemset> out;
  std::size_t group_start = 0;
  while (group_start < sorted.size()) {
    const Itemset prefix = detail::without_last(sorted[group_start]);
    std::size_t group_end = group_start + 1;
    while (group_end < sorted.size() && detail::without_last(sorted[group_end]) == prefix) ++group_end;
    for (std::size_t i = group_start; i < group_end; ++i) {
      for (std::size_t j = i + 1; j < group_end; ++j) out.push_back(sorted[i] | sorted[j]);
    }
    group_start = group_end;
  }
  return out;
}

/// Keeps the candidates whose every (k-1)-subset is in `prev`. Candidates of
/// cardinality 1 are kept unconditionally (their only such subset is the
/// empty set).
inline std::vector<Itemset> apriori_prune(const std::vector<Itemset>& cands, const std::vector<Itemset>& prev) {
  std::size_t k = 0;
  detail::require_uniform_cardinality(cands, k);
  if (cands.empty()) return {};
  if (k <= 1) return cands;
  std::size_t kp = 0;
  detail::require_uniform_cardinality(prev, kp);
  if (!prev.empty() && kp + 1 != k) throw UsageError("prune: previous level must have cardinality k-1");

  const std::unordered_set<Itemset, ItemsetHash> known(prev.begin(), prev.end());
  std::vector<Itemset> out;
  for (const auto& c : cands) {
    bool keep = true;
    c.for_each_position([&](std::size_t pos) {
      if (!keep) return;
      Itemset sub = c;
      sub.reset(pos);
      if (!known.contains(sub)) keep = false;
    });
    if (keep) out.push_back(c);
  }
  return out;
}

/// One pass over the database counting every candidate by bitmask
/// containment against each row.
inline std::vector<std::size_t> count_candidates(const TransactionDatabase& db, const std::vector<Itemset>& cands,
                                                 unsigned threads = 1) {
  const std::size_t m = cands.size();
  const std::size_t w = db.words_per_row();
  std::vector<Word> flat;
  flat.reserve(m * w);
  for (const auto& c : cands) {
    require_width(db, c);
    flat.insert(flat.end(), c.words().begin(), c.words().end());
  }

  auto scan = [&](std::size_t row_begin, std::size_t row_end, std::vector<std::size_t>& counts) {
    for (std::size_t t = row_begin; t < row_end; ++t) {
      const auto row = db.row_words(t);
      const Word* cand = flat.data();
      for (std::size_t ci = 0; ci < m; ++ci, cand += w) {
        bool inside = true;
        for (std::size_t i = 0; i < w; ++i) {
          if ((cand[i] & row[i]) != cand[i]) {
            inside = false;
            break;
          }
        }
        counts[ci] += inside ? 1 : 0;
      }
    }
  };

  std::vector<std::size_t> counts(m, 0);
  const std::size_t n = db.n();
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers == 1 || m == 0) {
    scan(0, n, counts);
    return counts;
  }
  std::vector<std::vector<std::size_t>> partial(workers, std::vector<std::size_t>(m, 0));
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned wi = 0; wi < workers; ++wi) {
    const std::size_t b = std::min(n, wi * chunk);
    const std::size_t e = std::min(n, b + chunk);
    pool.emplace_back([&, b, e, wi] { scan(b, e, partial[wi]); });
  }
  for (auto& th : pool) th.join();
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < m; ++i) counts[i] += p[i];
  }
  return counts;
}

/// Level-wise frequent itemset mining.
///
/// Level 1 takes all d single items as candidates. Each later level joins
/// and prunes the previous frequent level, then scans the database once.
/// Mining stops when a level yields no candidates or no frequent itemsets.
/// Every scanned level appears in `levels`, including a final one whose
/// frequent list is empty.
inline AprioriResult apriori_mine(const TransactionDatabase& db, const MiningParams& params,
                                  const AprioriOptions& options = {}) {
  using Clock = std::chrono::steady_clock;
  if (params.transaction_count() != db.n()) {
    throw UsageError("mining parameters were derived for a different transaction count");
  }
  AprioriResult result;
  result.family.transaction_count = db.n();
  result.family.item_count = db.d();
  const auto t_start = Clock::now();

  std::vector<Itemset> candidates;
  candidates.reserve(db.d());
  for (std::size_t pos = 0; pos < db.d(); ++pos) {
    Itemset s(db.d());
    s.set(pos);
    candidates.push_back(std::move(s));
  }

  std::vector<Itemset> prev_frequent;
  for (std::size_t k = 1; !candidates.empty(); ++k) {
    const auto t_level = Clock::now();
    const auto counts = count_candidates(db, candidates, options.threads);
    ++result.trace.database_scans;

    LevelSets level;
    level.k = k;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (counts[i] >= params.min_count()) level.frequents.push_back({candidates[i], counts[i]});
    }
    std::sort(level.frequents.begin(), level.frequents.end(),
              [](const CountedItemset& a, const CountedItemset& b) { return lex_less(a.items, b.items); });
    level.candidates = std::move(candidates);

    LevelTrace lt{k, level.candidates.size(), level.frequents.size(),
                  std::chrono::duration<double>(Clock::now() - t_level).count()};
    result.trace.levels.push_back(lt);
    result.trace.total_candidates += lt.candidate_count;

    prev_frequent.clear();
    for (const auto& f : level.frequents) {
      prev_frequent.push_back(f.items);
      result.family.itemsets.push_back(f);
    }
    result.levels.push_back(std::move(level));
    if (prev_frequent.empty()) break;

    candidates = apriori_prune(apriori_join(prev_frequent), prev_frequent);
  }
  result.trace.seconds = std::chrono::duration<double>(Clock::now() - t_start).count();
  return result;
}

inline constexpr std::size_t kBruteForceMaxItems = 20;

/// Enumerates all 2^d - 1 nonempty itemsets and keeps the frequent ones.
/// Test oracle for apriori_mine; refuses d > kBruteForceMaxItems.
inline FrequentFamily brute_force_mine(const TransactionDatabase& db, const MiningParams& params) {
  if (db.d() > kBruteForceMaxItems) {
    throw UsageError("brute-force enumeration is limited to " + std::to_string(kBruteForceMaxItems) + " items");
  }
  std::vector<std::uint32_t> rows;
  rows.reserve(db.n());
  for (const auto& r : db.rows()) rows.push_back(static_cast<std::uint32_t>(r.words()[0]));

  FrequentFamily fam;
  fam.transaction_count = db.n();
  fam.item_count = db.d();
  const std::uint32_t limit = std::uint32_t{1} << db.d();
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    std::size_t count = 0;
    for (std::uint32_t r : rows) count += ((r & mask) == mask) ? 1 : 0;
    if (count >= params.min_count()) {
      Itemset s(db.d());
      for (std::size_t pos = 0; pos < db.d(); ++pos) {
        if (mask & (std::uint32_t{1} << pos)) s.set(pos);
      }
      fam.itemsets.push_back({std::move(s), count});
    }
  }
  sort_level_order(fam.itemsets);
  return fam;
}

/// Members of a frequent family that have no proper superset in it.
inline std::vector<Itemset> maximal_frequent_sets(const std::vector<Itemset>& frequents) {
  std::vector<Itemset> out;
  for (const auto& a : frequents) {
    const bool dominated = std::any_of(frequents.begin(), frequents.end(),
                                       [&](const Itemset& b) { return a.is_proper_subset_of(b); });
    if (!dominated && std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  std::sort(out.begin(), out.end(), LevelOrder{});
  return out;
}

/// Infrequent itemsets whose proper subsets are all frequent. These are
/// exactly the pruned candidates that fail the support scan, collected from
/// every Apriori level.
inline std::vector<Itemset> border_sets(const TransactionDatabase& db, const MiningParams& params) {
  const auto mined = apriori_mine(db, params);
  std::vector<Itemset> out;
  for (const auto& level : mined.levels) {
    std::unordered_set<Itemset, ItemsetHash> frequent;
    for (const auto& f : level.frequents) frequent.insert(f.items);
    for (const auto& c : level.candidates) {
      if (!frequent.contains(c)) out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end(), LevelOrder{});
  return out;
}

/// Expands an antichain of maximal sets into every nonempty subset of its
/// members. Cost is exponential in the largest member's size.
inline std::vector<Itemset> reconstruct_from_maximal(const std::vector<Itemset>& maximal) {
  for (std::size_t i = 0; i < maximal.size(); ++i) {
    for (std::size_t j = 0; j < maximal.size(); ++j) {
      if (i != j && maximal[i].is_subset_of(maximal[j])) {
        throw UsageError("maximal family is not an antichain: " + maximal[i].to_string() + " is contained in " +
                         maximal[j].to_string());
      }
    }
  }
  std::unordered_set<Itemset, ItemsetHash> seen;
  for (const auto& m : maximal) {
    std::vector<std::size_t> positions;
    m.for_each_position([&](std::size_t p) { positions.push_back(p); });
    if (positions.size() >= 63) throw UsageError("maximal set too large to expand");
    const std::uint64_t limit = std::uint64_t{1} << positions.size();
    for (std::uint64_t sub = 1; sub < limit; ++sub) {
      Itemset s(m.width());
      for (std::size_t b = 0; b < positions.size(); ++b) {
        if (sub & (std::uint64_t{1} << b)) s.set(positions[b]);
      }
      seen.insert(std::move(s));
    }
  }
  std::vector<Itemset> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end(), LevelOrder{});
  return out;
}

}  // namespace gafim
