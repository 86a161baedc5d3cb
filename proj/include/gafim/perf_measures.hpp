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
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "gafim/apriori.hpp"
#include "gafim/database.hpp"
#include "gafim/error.hpp"
#include "gafim/ga_miner.hpp"
#include "gafim/itemset.hpp"
#include "gafim/rng.hpp"

namespace gafim {

// ---------------------------------------------------------------------------
// Synthetic data

struct BernoulliModel {
  double p = 0.3;  // each item present independently with probability p
};

/// Each planted itemset appears whole in a row with probability q; every
/// item is additionally switched on with background probability noise.
struct PlantedModel {
  std::vector<std::vector<std::size_t>> itemsets;  // 1-based ids
  double q = 0.5;
  double noise = 0.05;
};

using SyntheticModel = std::variant<BernoulliModel, PlantedModel>;

inline TransactionDatabase generate_synthetic(std::size_t n, std::size_t d, const SyntheticModel& model,
                                              std::uint64_t seed) {
  if (n == 0 || d == 0 || d > kMaxItems) throw UsageError("synthetic data needs n >= 1 and d in [1, kMaxItems]");
  auto check_prob = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError(std::string(what) + " must lie in [0, 1]");
  };
  Rng rng(seed);
  std::vector<Itemset> rows;
  rows.reserve(n);
  std::string label;

  if (const auto* b = std::get_if<BernoulliModel>(&model)) {
    check_prob(b->p, "item probability");
    for (std::size_t t = 0; t < n; ++t) {
      Itemset r(d);
      for (std::size_t pos = 0; pos < d; ++pos) {
        if (rng.bernoulli(b->p)) r.set(pos);
      }
      rows.push_back(std::move(r));
    }
    label = "synthetic:bernoulli";
  } else {
    const auto& pm = std::get<PlantedModel>(model);
    check_prob(pm.q, "planted occurrence probability");
    check_prob(pm.noise, "noise probability");
    std::vector<Itemset> planted;
    for (const auto& ids : pm.itemsets) {
      if (ids.empty()) throw UsageError("planted itemsets must be nonempty");
      planted.push_back(Itemset::from_ids(d, ids));
    }
    for (std::size_t t = 0; t < n; ++t) {
      Itemset r(d);
      for (const auto& s : planted) {
        if (rng.bernoulli(pm.q)) r = r | s;
      }
      for (std::size_t pos = 0; pos < d; ++pos) {
        if (rng.bernoulli(pm.noise)) r.set(pos);
      }
      rows.push_back(std::move(r));
    }
    label = "synthetic:planted";
  }
  return TransactionDatabase(d, std::move(rows), label + ":seed=" + std::to_string(seed));
}

// ---------------------------------------------------------------------------
// GA campaigns

enum class OptimalityCriterion { full_recall, target_fitness };

inline std::string_view to_string(OptimalityCriterion c) {
  return c == OptimalityCriterion::full_recall ? "full_recall" : "target_fitness";
}

struct MeasureCampaign {
  std::size_t runs = 20;
  std::size_t k_max = 200;
  std::uint64_t base_seed = 1;
  OptimalityCriterion criterion = OptimalityCriterion::full_recall;
  double target_fitness = 0.0;  // used by OptimalityCriterion::target_fitness
  double leap_delta = 0.5;
  double cutoff_failure = 0.05;  // epsilon used to size the cutoff table
  unsigned threads = 1;

  void validate() const {
    if (runs == 0) throw UsageError("campaign needs at least one run");
    if (k_max == 0) throw UsageError("campaign needs k_max >= 1");
    if (!(leap_delta > 0.0)) throw UsageError("leap delta must be positive");
    if (!(cutoff_failure >= 0.0 && cutoff_failure <= 1.0)) throw UsageError("cutoff failure must lie in [0, 1]");
  }
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::optional<std::size_t> first_success;  // generation, 0 = initial population
  std::vector<double> best_fitness;          // index = generation, 0..k_max
  std::vector<std::size_t> archive_size;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct CutoffRow {
  std::size_t k = 0;
  std::size_t runs = 0;
  std::size_t cost = 0;  // k * runs
  double failure = 1.0;  // (1 - p_hat(k))^runs

  friend bool operator==(const CutoffRow&, const CutoffRow&) = default;
};

/// Curves are indexed by generation k = 0..k_max; entry 0 describes the
/// initial population.
struct PerfReport {
  MeasureCampaign campaign;
  GaConfig ga_config;
  std::size_t oracle_size = 0;  // Apriori family size under full_recall
  std::vector<RunRecord> runs;
  std::vector<double> p_hat;
  std::vector<double> avg_fitness;
  std::vector<double> leap_likelihood;
  std::vector<CutoffRow> cutoff_table;
  double seconds = 0.0;
};

/// Fraction of runs with at least one leap (best-fitness increase >= delta
/// between consecutive generations) at some generation g <= k. Index k runs
/// from 0 to the longest trace's last generation.
inline std::vector<double> leap_likelihood(const std::vector<std::vector<double>>& traces, double delta) {
  if (traces.empty()) throw UsageError("leap likelihood needs at least one trace");
  if (!(delta > 0.0)) throw UsageError("leap delta must be positive");
  std::size_t len = 0;
  for (const auto& t : traces) len = std::max(len, t.size());
  if (len == 0) return {};
  std::vector<std::size_t> leaped_by(len, 0);
  for (const auto& t : traces) {
    for (std::size_t g = 1; g < t.size(); ++g) {
      if (t[g] - t[g - 1] >= delta) {
        for (std::size_t k = g; k < len; ++k) ++leaped_by[k];
        break;
      }
    }
  }
  std::vector<double> curve(len);
  for (std::size_t k = 0; k < len; ++k) {
    curve[k] = static_cast<double>(leaped_by[k]) / static_cast<double>(traces.size());
  }
  return curve;
}

inline double failure_probability(double p, std::size_t runs) {
  return std::pow(1.0 - p, static_cast<double>(runs));
}

/// Smallest r >= 1 with (1 - p)^r <= epsilon, or nullopt if none exists.
inline std::optional<std::size_t> runs_needed(double p, double epsilon) {
  if (failure_probability(p, 1) <= epsilon) return 1;
  if (p <= 0.0 || epsilon <= 0.0) return std::nullopt;
  const double est = std::ceil(std::log(epsilon) / std::log1p(-p));
  auto r = static_cast<std::size_t>(std::max(1.0, est));
  while (r > 1 && failure_probability(p, r - 1) <= epsilon) --r;
  while (failure_probability(p, r) > epsilon) ++r;
  return r;
}

inline std::vector<CutoffRow> build_cutoff_table(const std::vector<double>& p_hat, double epsilon) {
  std::vector<CutoffRow> rows;
  for (std::size_t k = 1; k < p_hat.size(); ++k) {
    if (auto r = runs_needed(p_hat[k], epsilon)) {
      rows.push_back({k, *r, k * *r, failure_probability(p_hat[k], *r)});
    }
  }
  return rows;
}

/// Runs `campaign.runs` independent GA runs for k_max generations each (stall
/// test disabled), seeding run i with derive_seed(base_seed, i), and records
/// the first generation meeting the optimality criterion.
inline PerfReport estimate_p_of_k(const TransactionDatabase& db, const GaConfig& ga_config,
                                  const MeasureCampaign& campaign) {
  using Clock = std::chrono::steady_clock;
  ga_config.validate();
  campaign.validate();
  const auto t0 = Clock::now();

  PerfReport report;
  report.campaign = campaign;
  report.ga_config = ga_config;
  report.ga_config.max_generations = campaign.k_max;
  report.ga_config.stall_generations = 0;
  report.ga_config.max_evaluations = 0;

  std::size_t oracle_size = 0;
  if (campaign.criterion == OptimalityCriterion::full_recall) {
    oracle_size = apriori_mine(db, MiningParams(ga_config.sigma, db)).family.size();
  }
  report.oracle_size = oracle_size;

  report.runs.resize(campaign.runs);
  auto run_one = [&](std::size_t i) {
    GaConfig cfg = report.ga_config;
    cfg.rng_seed = derive_seed(campaign.base_seed, i);
    RunRecord rec;
    rec.seed = cfg.rng_seed;
    GaHooks hooks;
    hooks.on_generation = [&](const GaState& s) {
      const double best = s.stats.back().best_fitness;
      rec.best_fitness.push_back(best);
      rec.archive_size.push_back(s.archive.size());
      if (rec.first_success) return;
      const bool ok = campaign.criterion == OptimalityCriterion::full_recall
                          ? s.archive.size() == oracle_size
                          : best >= campaign.target_fitness;
      if (ok) rec.first_success = s.generation;
    };
    ga_mine(db, cfg, hooks);
    report.runs[i] = std::move(rec);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(campaign.threads, static_cast<unsigned>(campaign.runs)));
  if (workers == 1) {
    for (std::size_t i = 0; i < campaign.runs; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < campaign.runs; i += workers) run_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  const std::size_t len = campaign.k_max + 1;
  const auto r = static_cast<double>(campaign.runs);
  report.p_hat.assign(len, 0.0);
  report.avg_fitness.assign(len, 0.0);
  std::vector<std::vector<double>> traces;
  traces.reserve(campaign.runs);
  for (const auto& rec : report.runs) {
    for (std::size_t k = 0; k < len; ++k) {
      if (rec.first_success && *rec.first_success <= k) report.p_hat[k] += 1.0;
      report.avg_fitness[k] += rec.best_fitness.at(k);
    }
    traces.push_back(rec.best_fitness);
  }
  for (std::size_t k = 0; k < len; ++k) {
    report.p_hat[k] /= r;
    report.avg_fitness[k] /= r;
  }
  report.leap_likelihood = leap_likelihood(traces, campaign.leap_delta);
  report.cutoff_table = build_cutoff_table(report.p_hat, campaign.cutoff_failure);
  report.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return report;
}

// ---------------------------------------------------------------------------
// Cut-off generation

enum class CutoffMode { fixed_budget, fixed_failure };

struct CutoffChoice {
  bool feasible = false;
  std::size_t k = 0;
  std::size_t runs = 0;
  std::size_t cost = 0;
  double failure = 1.0;

  friend bool operator==(const CutoffChoice&, const CutoffChoice&) = default;
};

/// Chooses (k, r) from p_hat (indexed by k, entry 0 ignored).
///
/// fixed_budget(C): minimise (1 - p_hat(k))^r over k * r <= C, considering
/// only k with p_hat(k) > 0.
/// fixed_failure(eps): minimise k * r subject to (1 - p_hat(k))^r <= eps.
/// Ties go to the smaller k, then the smaller r.
inline CutoffChoice best_cutoff(const std::vector<double>& p_hat, CutoffMode mode, double parameter) {
  CutoffChoice best;
  const std::size_t k_max = p_hat.empty() ? 0 : p_hat.size() - 1;

  if (mode == CutoffMode::fixed_budget) {
    if (!(parameter >= 1.0)) return best;
    const auto budget = static_cast<std::size_t>(std::floor(parameter));
    for (std::size_t k = 1; k <= std::min(k_max, budget); ++k) {
      const double p = p_hat[k];
      if (!(p > 0.0)) continue;
      const std::size_t r_max = budget / k;
      const double f_min = failure_probability(p, r_max);
      // Smallest r reaching the minimum; failure is nonincreasing in r.
      std::size_t lo = 1, hi = r_max;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (failure_probability(p, mid) <= f_min) hi = mid; else lo = mid + 1;
      }
      if (!best.feasible || f_min < best.failure) best = {true, k, lo, k * lo, f_min};
    }
    return best;
  }

  for (std::size_t k = 1; k <= k_max; ++k) {
    const auto r = runs_needed(p_hat[k], parameter);
    if (!r) continue;
    const std::size_t cost = k * *r;
    if (!best.feasible || cost < best.cost) best = {true, k, *r, cost, failure_probability(p_hat[k], *r)};
  }
  return best;
}

inline CutoffChoice best_cutoff(const PerfReport& report, CutoffMode mode, double parameter) {
  return best_cutoff(report.p_hat, mode, parameter);
}

// ---------------------------------------------------------------------------
// Apriori scaling

struct ScalingRow {
  std::size_t n = 0;
  std::size_t d = 0;
  double median_seconds = 0.0;
  std::vector<double> samples;
  std::vector<std::size_t> candidates_per_level;  // m_k for k = 1, 2, ...
  std::size_t total_candidates = 0;
  std::size_t frequent_count = 0;
  std::optional<double> time_ratio;  // vs previous row
  std::optional<double> m2_ratio;    // vs previous row
};

struct ScalingBenchConfig {
  SyntheticModel model = BernoulliModel{0.5};
  double sigma = 0.02;
  std::size_t repetitions = 5;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Times apriori_mine on one synthetic database per (n, d) pair and reports
/// the median wall-clock plus the candidate trace. Ratios compare each row
/// with the one before it.
inline std::vector<ScalingRow> apriori_scaling_bench(const ScalingBenchConfig& cfg,
                                                     const std::vector<std::pair<std::size_t, std::size_t>>& sizes) {
  using Clock = std::chrono::steady_clock;
  if (cfg.repetitions == 0) throw UsageError("benchmark needs at least one repetition");
  std::vector<ScalingRow> rows;
  for (const auto& [n, d] : sizes) {
    const auto db = generate_synthetic(n, d, cfg.model, derive_seed(cfg.seed, n * 100003 + d));
    const MiningParams params(cfg.sigma, db);
    ScalingRow row;
    row.n = n;
    row.d = d;
    AprioriResult last;
    // One untimed warm-up run.
    last = apriori_mine(db, params, {cfg.threads});
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
      const auto t0 = Clock::now();
      last = apriori_mine(db, params, {cfg.threads});
      row.samples.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    }
    row.median_seconds = median(row.samples);
    for (const auto& l : last.trace.levels) row.candidates_per_level.push_back(l.candidate_count);
    row.total_candidates = last.trace.total_candidates;
    row.frequent_count = last.family.size();
    if (!rows.empty()) {
      const auto& prev = rows.back();
      if (prev.median_seconds > 0.0) row.time_ratio = row.median_seconds / prev.median_seconds;
      const std::size_t m2_prev = prev.candidates_per_level.size() > 1 ? prev.candidates_per_level[1] : 0;
      const std::size_t m2_cur = row.candidates_per_level.size() > 1 ? row.candidates_per_level[1] : 0;
      if (m2_prev > 0) row.m2_ratio = static_cast<double>(m2_cur) / static_cast<double>(m2_prev);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace gafim
