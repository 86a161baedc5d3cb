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

#include <algorithm>
#include <set>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace gafim;
using gafim::fixtures::S;
using gafim::fixtures::example_db;
using gafim::fixtures::example_count;

namespace {

using RuleIds = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;

std::set<RuleIds> rule_ids(const std::vector<AssociationRule>& rules) {
  std::set<RuleIds> out;
  for (const auto& r : rules) out.insert({r.antecedent.ids(), r.consequent.ids()});
  return out;
}

// Every rule X => Y over the lattice with X u Y frequent and confidence at
// least tau, computed from raw row containment.
std::set<RuleIds> brute_force_rules(const TransactionDatabase& db, double sigma, double tau) {
  const MiningParams p(sigma, db);
  const std::uint32_t limit = 1u << db.d();
  auto make = [&](std::uint32_t mask) {
    Itemset s(db.d());
    for (std::size_t b = 0; b < db.d(); ++b) {
      if (mask & (1u << b)) s.set(b);
    }
    return s;
  };
  auto count = [&](const Itemset& s) {
    std::size_t c = 0;
    for (const auto& r : db.rows()) c += s.is_subset_of(r) ? 1 : 0;
    return c;
  };
  std::set<RuleIds> out;
  for (std::uint32_t z = 1; z < limit; ++z) {
    const auto zs = make(z);
    const auto cz = count(zs);
    if (cz < p.min_count()) continue;
    for (std::uint32_t x = (z - 1) & z; x != 0; x = (x - 1) & z) {
      const auto xs = make(x);
      if (static_cast<double>(cz) / static_cast<double>(count(xs)) >= tau) out.insert({xs.ids(), (zs - xs).ids()});
    }
  }
  return out;
}

}  // namespace

TEST(Confidence, WorkedExamples) {
  const auto db = example_db();
  ASSERT_EQ(example_count({5}), 8u);
  ASSERT_EQ(example_count({5, 7}), 5u);
  EXPECT_DOUBLE_EQ(*confidence(db, S(9, {5}), S(9, {7})), 5.0 / 8.0);
  EXPECT_DOUBLE_EQ(*confidence(db, S(9, {3, 5}), S(9, {7})), 1.0);
  EXPECT_DOUBLE_EQ(*confidence(db, S(9, {7}), S(9, {5})), 5.0 / 7.0);
}

TEST(Confidence, UnsupportedAntecedentIsUndefined) {
  const auto db = example_db();
  ASSERT_EQ(example_count({2, 5}), 0u);
  EXPECT_FALSE(confidence(db, S(9, {2, 5}), S(9, {7})).has_value());
}

TEST(Confidence, InvalidRulesAreUsageErrors) {
  const auto db = example_db();
  EXPECT_THROW(confidence(db, Itemset(9), S(9, {7})), UsageError);
  EXPECT_THROW(confidence(db, S(9, {5}), S(9, {5, 7})), UsageError);
  EXPECT_THROW(confidence(db, S(8, {5}), S(8, {7})), UsageError);
  EXPECT_THROW(RuleParams(0.0, 0.2), UsageError);
  EXPECT_THROW(RuleParams(1.1, 0.2), UsageError);
  EXPECT_THROW(RuleParams(0.5, 0.0), UsageError);
}

TEST(GenerateRules, FullConfidenceOnWorkedExample) {
  const auto db = example_db();
  const auto fam = apriori_mine(db, MiningParams(0.2, db)).family;
  const auto rules = generate_rules(fam, RuleParams(1.0, 0.2));
  const auto ids = rule_ids(rules);
  EXPECT_TRUE(ids.contains({{3, 5}, {7}}));
  EXPECT_TRUE(ids.contains({{3, 7}, {5}}));
  for (const auto& r : rules) EXPECT_DOUBLE_EQ(r.confidence, 1.0);
  EXPECT_EQ(ids, brute_force_rules(db, 0.2, 1.0));
}

TEST(GenerateRules, ThresholdExcludesWeakRule) {
  const auto db = example_db();
  const auto fam = apriori_mine(db, MiningParams(0.2, db)).family;
  const auto ids = rule_ids(generate_rules(fam, RuleParams(0.9, 0.2)));
  EXPECT_FALSE(ids.contains({{5}, {7}}));
  EXPECT_TRUE(ids.contains({{3, 5}, {7}}));
}

TEST(GenerateRules, SingletonsOnlyGiveNoRules) {
  const TransactionDatabase db(3, {S(3, {1}), S(3, {2}), S(3, {3})});
  const auto fam = apriori_mine(db, MiningParams(0.3, db)).family;
  ASSERT_EQ(fam.size(), 3u);
  EXPECT_TRUE(generate_rules(fam, RuleParams(0.01, 0.3)).empty());
}

TEST(GenerateRules, MissingSubsetIsIntegrityError) {
  FrequentFamily fam{15, 9, {{S(9, {3}), 6}, {S(9, {3, 5}), 3}}};
  EXPECT_THROW(generate_rules(fam, RuleParams(0.5, 0.2)), IntegrityError);
}

TEST(GenerateRules, SortedBySupportThenConfidence) {
  const auto db = example_db();
  const auto rules = generate_rules(apriori_mine(db, MiningParams(0.2, db)).family, RuleParams(0.1, 0.2));
  EXPECT_TRUE(std::is_sorted(rules.begin(), rules.end(), RuleOrder{}));
  ASSERT_FALSE(rules.empty());
  EXPECT_EQ(rules.front().support_count, 5u);  // {5,7} is the strongest pair
}

// At a vanishing threshold every frequent Z contributes 2^|Z| - 2 rules, the
// counts match the database, and confidence never drops below support.
TEST(RulesProperty, CompletenessAndBounds) {
  Rng rng(8);
  for (int trial = 0; trial < 80; ++trial) {
    const std::size_t d = 2 + rng.below(7);
    const auto db = fixtures::random_db(rng, 1 + rng.below(40), d, 0.55);
    const double sigma = 0.1 + 0.4 * rng.uniform01();
    const auto fam = apriori_mine(db, MiningParams(sigma, db)).family;
    const auto rules = generate_rules(fam, RuleParams(1e-9, sigma));

    std::size_t expected = 0;
    for (const auto& f : fam.itemsets) expected += (std::size_t{1} << f.items.cardinality()) - 2;
    EXPECT_EQ(rules.size(), expected);
    EXPECT_EQ(rule_ids(rules).size(), rules.size());

    for (const auto& r : rules) {
      EXPECT_FALSE(r.antecedent.intersects(r.consequent));
      EXPECT_EQ(r.support_count, support_count(db, r.antecedent | r.consequent));
      EXPECT_EQ(r.antecedent_count, support_count(db, r.antecedent));
      EXPECT_DOUBLE_EQ(r.confidence, *confidence(db, r.antecedent, r.consequent));
      EXPECT_GE(r.confidence + 1e-12, r.support);
      EXPECT_LE(r.confidence, 1.0);
    }

    const double tau = 0.3 + 0.7 * rng.uniform01();
    EXPECT_EQ(rule_ids(generate_rules(fam, RuleParams(tau, sigma))), brute_force_rules(db, sigma, tau));
  }
}

// Moving items from antecedent to consequent never raises confidence.
TEST(RulesProperty, ConfidenceAntiMonotoneInAntecedent) {
  Rng rng(19);
  for (int trial = 0; trial < 60; ++trial) {
    const auto db = fixtures::random_db(rng, 10 + rng.below(40), 6, 0.6);
    const auto rules = generate_rules(apriori_mine(db, MiningParams(0.1, db)).family, RuleParams(1e-9, 0.1));
    for (const auto& r : rules) {
      r.antecedent.for_each_position([&](std::size_t pos) {
        Itemset smaller = r.antecedent;
        smaller.reset(pos);
        if (smaller.empty()) return;
        Itemset larger = r.consequent;
        larger.set(pos);
        EXPECT_LE(*confidence(db, smaller, larger), r.confidence + 1e-12);
      });
    }
  }
}
