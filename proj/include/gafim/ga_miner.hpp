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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gafim/apriori.hpp"
#include "gafim/database.hpp"
#include "gafim/error.hpp"
#include "gafim/itemset.hpp"
#include "gafim/rng.hpp"

namespace gafim {

/// A candidate itemset in bitstring form: gene i set means item i+1 present.
struct Chromosome {
  Itemset genes;
  std::optional<double> fitness;

  Chromosome() = default;
  explicit Chromosome(Itemset g) : genes(std::move(g)) {}

  std::size_t length() const noexcept { return genes.width(); }
};

struct GaConfig {
  std::size_t population_size = 20;
  double mutation_rate = 0.05;
  double crossover_rate = 1.0;
  double generation_gap = 0.9;
  std::size_t elitism_count = 1;
  std::size_t max_generations = 200;
  std::size_t stall_generations = 50;  // 0 disables the stall test
  std::uint64_t rng_seed = 1;
  double sigma = 0.2;
  double init_bit_probability = 0.5;
  std::size_t max_evaluations = 0;  // fitness-evaluation budget; 0 = unlimited
  // Breeding attempts per offspring slot before a duplicate of an existing
  // member is accepted. 0 admits duplicates immediately.
  std::size_t duplicate_retries = 8;

  void validate() const {
    if (population_size < 2) throw UsageError("population size must be at least 2");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw UsageError("mutation rate must lie in [0, 1]");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw UsageError("crossover rate must lie in [0, 1]");
    if (!(generation_gap > 0.0 && generation_gap <= 1.0)) throw UsageError("generation gap must lie in (0, 1]");
    if (elitism_count >= population_size) throw UsageError("elitism count must be below the population size");
    if (!(sigma > 0.0 && sigma <= 1.0)) throw UsageError("minimum support must lie in (0, 1]");
    if (!(init_bit_probability >= 0.0 && init_bit_probability <= 1.0)) {
      throw UsageError("initial bit probability must lie in [0, 1]");
    }
  }

  /// Offspring produced per generation: round(gap * (P - elites)), at least one.
  std::size_t offspring_per_generation() const {
    const std::size_t replaceable = population_size - elitism_count;
    const auto raw = static_cast<std::size_t>(std::llround(generation_gap * static_cast<double>(replaceable)));
    return std::clamp<std::size_t>(raw, 1, replaceable);
  }
};

enum class TerminationReason { max_generations, stall, budget, manual };

inline std::string_view to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::max_generations: return "max_generations";
    case TerminationReason::stall: return "stall";
    case TerminationReason::budget: return "budget";
    case TerminationReason::manual: return "manual";
  }
  return "unknown";
}

struct GenerationStats {
  std::size_t generation = 0;
  double best_fitness = 0.0;
  double mean_fitness = 0.0;
  std::size_t archive_size = 0;
  std::size_t evaluations = 0;

  friend bool operator==(const GenerationStats&, const GenerationStats&) = default;
};

/// Fitness of an itemset:
///   empty                -> 0
///   infrequent, nonempty -> support(X), in [0, 1)
///   frequent             -> 1 + |X| / d, in (1, 2]
/// Every frequent individual outranks every infrequent one, and larger
/// frequent itemsets outrank smaller ones.
inline double fitness_from_count(std::size_t count, std::size_t cardinality, const TransactionDatabase& db,
                                 const MiningParams& params) {
  if (cardinality == 0) return 0.0;
  if (count >= params.min_count()) {
    return 1.0 + static_cast<double>(cardinality) / static_cast<double>(db.d());
  }
  return static_cast<double>(count) / static_cast<double>(db.n());
}

inline double fitness(const TransactionDatabase& db, const Itemset& x, const MiningParams& params) {
  require_width(db, x);
  if (x.empty()) return 0.0;
  return fitness_from_count(support_count(db, x), x.cardinality(), db, params);
}

inline double fitness(const TransactionDatabase& db, const Chromosome& c, const MiningParams& params) {
  return fitness(db, c.genes, params);
}

/// Roulette-wheel sampling with replacement; returns indices into
/// `fitnesses`. Falls back to uniform sampling when total fitness is zero.
inline std::vector<std::size_t> select_parents(std::span<const double> fitnesses, std::size_t count, Rng& rng) {
  if (fitnesses.empty()) throw UsageError("cannot select from an empty population");
  std::vector<std::size_t> out;
  out.reserve(count);
  double total = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    if (fitnesses[i] < 0.0) throw UsageError("fitness values must be non-negative");
    if (fitnesses[i] > 0.0) last_positive = i;
    total += fitnesses[i];
  }
  for (std::size_t c = 0; c < count; ++c) {
    if (total <= 0.0) {
      out.push_back(static_cast<std::size_t>(rng.below(fitnesses.size())));
      continue;
    }
    const double r = rng.uniform01() * total;
    double cum = 0.0;
    std::size_t pick = last_positive;
    for (std::size_t i = 0; i < fitnesses.size(); ++i) {
      cum += fitnesses[i];
      if (r < cum) {
        pick = i;
        break;
      }
    }
    out.push_back(pick);
  }
  return out;
}

/// Single-point crossover at `locus` in [1, d-1]: child1 takes genes
/// 1..locus from p1 and the rest from p2; child2 the reverse.
inline std::pair<Chromosome, Chromosome> crossover_at(const Chromosome& p1, const Chromosome& p2,
                                                      std::size_t locus) {
  const std::size_t d = p1.length();
  if (p2.length() != d) throw UsageError("crossover parents differ in length");
  if (locus == 0 || locus >= d) throw UsageError("crossover locus must lie in [1, d-1]");
  Itemset head = Itemset(d);
  for (std::size_t pos = 0; pos < locus; ++pos) head.set(pos);
  const Itemset tail = head.complement();
  Chromosome c1((p1.genes & head) | (p2.genes & tail));
  Chromosome c2((p2.genes & head) | (p1.genes & tail));
  return {std::move(c1), std::move(c2)};
}

/// With probability `rate`, crosses the parents at a uniform locus in
/// [1, d-1]; otherwise returns copies. Length-1 chromosomes are always copied.
inline std::pair<Chromosome, Chromosome> crossover(const Chromosome& p1, const Chromosome& p2, double rate,
                                                   Rng& rng) {
  const std::size_t d = p1.length();
  if (p2.length() != d) throw UsageError("crossover parents differ in length");
  if (d >= 2 && rng.bernoulli(rate)) {
    const std::size_t locus = 1 + static_cast<std::size_t>(rng.below(d - 1));
    return crossover_at(p1, p2, locus);
  }
  return {Chromosome(p1.genes), Chromosome(p2.genes)};
}

/// Flips each gene independently with probability `rate`.
inline Chromosome mutate(const Chromosome& c, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw UsageError("mutation rate must lie in [0, 1]");
  Chromosome out(c.genes);
  for (std::size_t pos = 0; pos < c.length(); ++pos) {
    if (rng.bernoulli(rate)) out.genes.flip(pos);
  }
  return out;
}

/// Mutable state of one GA run. Every member of `population` has its
/// fitness evaluated and, if frequent, recorded in `archive`.
struct GaState {
  std::vector<Chromosome> population;
  std::map<Itemset, std::size_t, LevelOrder> archive;
  std::vector<GenerationStats> stats;  // stats[g] describes generation g; g = 0 is the initial population
  std::size_t generation = 0;
  std::size_t evaluations = 0;
  Rng rng{0};
  std::unordered_map<Itemset, std::size_t, ItemsetHash> count_cache;
};

namespace detail {

inline void evaluate(GaState& state, Chromosome& c, const TransactionDatabase& db, const MiningParams& params) {
  ++state.evaluations;
  auto it = state.count_cache.find(c.genes);
  if (it == state.count_cache.end()) {
    it = state.count_cache.emplace(c.genes, support_count(db, c.genes)).first;
  }
  const std::size_t count = it->second;
  const std::size_t card = c.genes.cardinality();
  c.fitness = fitness_from_count(count, card, db, params);
  if (card > 0 && count >= params.min_count()) state.archive.emplace(c.genes, count);
}

inline void record_stats(GaState& state) {
  GenerationStats s;
  s.generation = state.generation;
  double sum = 0.0;
  double best = 0.0;
  for (const auto& c : state.population) {
    sum += *c.fitness;
    best = std::max(best, *c.fitness);
  }
  s.best_fitness = best;
  s.mean_fitness = sum / static_cast<double>(state.population.size());
  s.archive_size = state.archive.size();
  s.evaluations = state.evaluations;
  state.stats.push_back(s);
}

}  // namespace detail

/// Random initial population (each gene set with init_bit_probability),
/// evaluated and archived as generation 0.
inline GaState initial_state(const TransactionDatabase& db, const GaConfig& config) {
  config.validate();
  const MiningParams params(config.sigma, db);
  GaState state;
  state.rng = Rng(config.rng_seed);
  state.population.reserve(config.population_size);
  for (std::size_t i = 0; i < config.population_size; ++i) {
    Itemset genes(db.d());
    for (std::size_t pos = 0; pos < db.d(); ++pos) {
      if (state.rng.bernoulli(config.init_bit_probability)) genes.set(pos);
    }
    state.population.emplace_back(std::move(genes));
  }
  for (auto& c : state.population) detail::evaluate(state, c, db, params);
  detail::record_stats(state);
  return state;
}

/// One generation: roulette selection over the current population, paired
/// single-point crossover and mutation to produce offspring, evaluation of
/// the offspring, then replacement of the worst-ranked non-elite members.
/// The elitism_count best members survive unchanged.
inline void evolve_generation(GaState& state, const GaConfig& config, const TransactionDatabase& db) {
  config.validate();
  if (state.population.size() != config.population_size) {
    throw UsageError("population size does not match configuration");
  }
  const MiningParams params(config.sigma, db);
  auto& pop = state.population;
  for (auto& c : pop) {
    if (!c.fitness) detail::evaluate(state, c, db, params);
  }

  std::vector<double> fit(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) fit[i] = *pop[i].fitness;
  std::vector<std::size_t> ranked(pop.size());
  std::iota(ranked.begin(), ranked.end(), std::size_t{0});
  std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });

  const std::size_t n_offspring = config.offspring_per_generation();
  std::vector<Chromosome> offspring;
  offspring.reserve(n_offspring + 1);
  std::unordered_set<Itemset, ItemsetHash> present;
  for (const auto& c : pop) present.insert(c.genes);
  std::size_t rejected = 0;
  auto admit = [&](Chromosome&& c) {
    if (offspring.size() >= n_offspring) return;
    if (present.contains(c.genes) && rejected < config.duplicate_retries * n_offspring) {
      ++rejected;
      return;
    }
    present.insert(c.genes);
    offspring.push_back(std::move(c));
  };
  while (offspring.size() < n_offspring) {
    const auto parents = select_parents(fit, 2, state.rng);
    auto [c1, c2] = crossover(pop[parents[0]], pop[parents[1]], config.crossover_rate, state.rng);
    admit(mutate(c1, config.mutation_rate, state.rng));
    admit(mutate(c2, config.mutation_rate, state.rng));
  }
  for (auto& c : offspring) detail::evaluate(state, c, db, params);

  // ranked[P - n_offspring ..] are the worst members; elites sit at the front
  // and n_offspring <= P - elitism_count keeps them out of this range.
  for (std::size_t i = 0; i < n_offspring; ++i) {
    pop[ranked[pop.size() - n_offspring + i]] = std::move(offspring[i]);
  }
  ++state.generation;
  detail::record_stats(state);
}

struct GaRunResult {
  FrequentFamily archive;
  std::size_t generations_run = 0;
  std::vector<GenerationStats> stats;
  TerminationReason termination = TerminationReason::max_generations;
  std::uint64_t seed = 0;
  std::size_t evaluations = 0;
  double seconds = 0.0;
};

struct GaHooks {
  // Called after the initial population and after every generation.
  std::function<void(const GaState&)> on_generation;
  // Polled before each generation; returning true stops the run (manual).
  std::function<bool(const GaState&)> stop_requested;
};

inline FrequentFamily archive_family(const GaState& state, const TransactionDatabase& db) {
  FrequentFamily fam;
  fam.transaction_count = db.n();
  fam.item_count = db.d();
  fam.itemsets.reserve(state.archive.size());
  for (const auto& [set, count] : state.archive) fam.itemsets.push_back({set, count});
  return fam;
}

/// Runs the GA until max_generations, an archive stall of stall_generations,
/// an exhausted evaluation budget, or a manual stop. The archive holds every
/// frequent itemset any individual has decoded to, so it is always a subset
/// of the true frequent family.
inline GaRunResult ga_mine(const TransactionDatabase& db, const GaConfig& config, const GaHooks& hooks = {}) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  GaState state = initial_state(db, config);
  if (hooks.on_generation) hooks.on_generation(state);

  GaRunResult result;
  std::size_t stalled = 0;
  while (true) {
    if (state.generation >= config.max_generations) {
      result.termination = TerminationReason::max_generations;
      break;
    }
    if (config.max_evaluations != 0 && state.evaluations >= config.max_evaluations) {
      result.termination = TerminationReason::budget;
      break;
    }
    if (hooks.stop_requested && hooks.stop_requested(state)) {
      result.termination = TerminationReason::manual;
      break;
    }
    const std::size_t before = state.archive.size();
    evolve_generation(state, config, db);
    if (hooks.on_generation) hooks.on_generation(state);
    stalled = state.archive.size() == before ? stalled + 1 : 0;
    if (config.stall_generations != 0 && stalled >= config.stall_generations) {
      result.termination = TerminationReason::stall;
      break;
    }
  }

  result.archive = archive_family(state, db);
  result.generations_run = state.generation;
  result.stats = std::move(state.stats);
  result.seed = config.rng_seed;
  result.evaluations = state.evaluations;
  result.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return result;
}

}  // namespace gafim
