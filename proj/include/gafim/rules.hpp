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
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gafim/apriori.hpp"
#include "gafim/database.hpp"
#include "gafim/error.hpp"
#include "gafim/itemset.hpp"

namespace gafim {

/// X => Y with its support and confidence.
struct AssociationRule {
  Itemset antecedent;
  Itemset consequent;
  std::size_t support_count = 0;     // n(X u Y)
  std::size_t antecedent_count = 0;  // n(X)
  double support = 0.0;
  double confidence = 0.0;

  friend bool operator==(const AssociationRule&, const AssociationRule&) = default;
};

class RuleParams {
 public:
  RuleParams(double tau, double sigma) : tau_(tau), sigma_(sigma) {
    if (!(tau > 0.0 && tau <= 1.0)) throw UsageError("minimum confidence must lie in (0, 1]");
    if (!(sigma > 0.0 && sigma <= 1.0)) throw UsageError("minimum support must lie in (0, 1]");
  }

  double tau() const noexcept { return tau_; }
  double sigma() const noexcept { return sigma_; }

 private:
  double tau_;
  double sigma_;
};

/// support(X u Y) / support(X), or nullopt when X never occurs.
inline std::optional<double> confidence(const TransactionDatabase& db, const Itemset& x, const Itemset& y) {
  require_width(db, x);
  require_width(db, y);
  if (x.empty()) throw UsageError("rule antecedent must be nonempty");
  if (x.intersects(y)) throw UsageError("rule antecedent and consequent must be disjoint");
  const std::size_t nx = support_count(db, x);
  if (nx == 0) return std::nullopt;
  return static_cast<double>(support_count(db, x | y)) / static_cast<double>(nx);
}

/// Canonical report order: support desc, confidence desc, then antecedent
/// and consequent lexicographically.
struct RuleOrder {
  bool operator()(const AssociationRule& a, const AssociationRule& b) const {
    if (a.support_count != b.support_count) return a.support_count > b.support_count;
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.antecedent != b.antecedent) return lex_less(a.antecedent, b.antecedent);
    return lex_less(a.consequent, b.consequent);
  }
};

/// Emits X => Z\X for every frequent Z with |Z| >= 2 and every nonempty
/// proper subset X whose confidence reaches tau. Counts come from the family;
/// the database is not rescanned.
inline std::vector<AssociationRule> generate_rules(const FrequentFamily& family, const RuleParams& params) {
  const auto index = family.count_index();
  const double n = static_cast<double>(family.transaction_count);
  if (family.transaction_count == 0) throw UsageError("family has no transaction count");

  std::vector<AssociationRule> out;
  for (const auto& z : family.itemsets) {
    std::vector<std::size_t> positions;
    z.items.for_each_position([&](std::size_t p) { positions.push_back(p); });
    if (positions.size() < 2) continue;
    if (positions.size() >= 63) throw UsageError("itemset too large for rule enumeration");
    const std::uint64_t full = (std::uint64_t{1} << positions.size()) - 1;
    for (std::uint64_t sub = 1; sub < full; ++sub) {
      Itemset x(z.items.width());
      for (std::size_t b = 0; b < positions.size(); ++b) {
        if (sub & (std::uint64_t{1} << b)) x.set(positions[b]);
      }
      const auto it = index.find(x);
      if (it == index.end()) {
        throw IntegrityError("frequent family is missing subset " + x.to_string() + " of " + z.items.to_string());
      }
      const double conf = static_cast<double>(z.count) / static_cast<double>(it->second);
      if (conf >= params.tau()) {
        out.push_back({x, z.items - x, z.count, it->second, static_cast<double>(z.count) / n, conf});
      }
    }
  }
  std::sort(out.begin(), out.end(), RuleOrder{});
  return out;
}

}  // namespace gafim
