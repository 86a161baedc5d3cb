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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace gafim;
using gafim::fixtures::example_db;

namespace {

// Exhaustive scan of every (k, r) pair with k in [1, k_max] and r in
// [1, r_cap], keeping the first optimum in (k, r) order.
CutoffChoice grid_oracle(const std::vector<double>& p_hat, CutoffMode mode, double parameter, std::size_t r_cap) {
  CutoffChoice best;
  for (std::size_t k = 1; k < p_hat.size(); ++k) {
    for (std::size_t r = 1; r <= r_cap; ++r) {
      const double f = std::pow(1.0 - p_hat[k], static_cast<double>(r));
      const std::size_t cost = k * r;
      if (mode == CutoffMode::fixed_budget) {
        if (static_cast<double>(cost) > parameter || p_hat[k] <= 0.0) continue;
        if (!best.feasible || f < best.failure) best = {true, k, r, cost, f};
      } else {
        if (f > parameter) continue;
        if (!best.feasible || cost < best.cost) best = {true, k, r, cost, f};
      }
    }
  }
  return best;
}

std::vector<double> random_curve(Rng& rng, std::size_t k_max, std::size_t runs) {
  // Nondecreasing multiples of 1/runs, as a campaign would produce.
  std::vector<double> p(k_max + 1, 0.0);
  std::size_t hits = 0;
  for (std::size_t k = 0; k <= k_max; ++k) {
    if (rng.bernoulli(0.3)) hits = std::min(runs, hits + rng.below(4));
    p[k] = static_cast<double>(hits) / static_cast<double>(runs);
  }
  return p;
}

}  // namespace

TEST(Leap, WorkedExample) {
  const std::vector<std::vector<double>> traces = {{0.0, 0.2, 1.0, 1.1}, {0.0, 0.0, 0.0, 0.0}};
  EXPECT_EQ(leap_likelihood(traces, 0.5), (std::vector<double>{0.0, 0.0, 0.5, 0.5}));
  EXPECT_EQ(leap_likelihood(traces, 0.1), (std::vector<double>{0.0, 0.5, 0.5, 0.5}));
  EXPECT_EQ(leap_likelihood(traces, 2.0), (std::vector<double>{0.0, 0.0, 0.0, 0.0}));
  EXPECT_THROW(leap_likelihood({}, 0.5), UsageError);
  EXPECT_THROW(leap_likelihood(traces, 0.0), UsageError);
}

TEST(RunsNeeded, Examples) {
  EXPECT_EQ(runs_needed(0.5, 0.25), 2u);
  EXPECT_EQ(runs_needed(0.5, 0.24), 3u);
  EXPECT_EQ(runs_needed(1.0, 0.0), 1u);
  EXPECT_EQ(runs_needed(0.3, 1.0), 1u);
  EXPECT_FALSE(runs_needed(0.0, 0.1).has_value());
  EXPECT_FALSE(runs_needed(0.5, 0.0).has_value());
}

TEST(RunsNeededProperty, IsMinimal) {
  Rng rng(4);
  for (int trial = 0; trial < 2000; ++trial) {
    const double p = 0.001 + 0.998 * rng.uniform01();
    const double eps = 1e-6 + rng.uniform01() * 0.999;
    const auto r = runs_needed(p, eps);
    ASSERT_TRUE(r.has_value());
    EXPECT_LE(failure_probability(p, *r), eps);
    if (*r > 1) {
      EXPECT_GT(failure_probability(p, *r - 1), eps);
    }
  }
}

TEST(BestCutoff, WorkedExamples) {
  const std::vector<double> half = {0.0, 0.5};
  EXPECT_EQ(best_cutoff(half, CutoffMode::fixed_failure, 0.25), (CutoffChoice{true, 1, 2, 2, 0.25}));
  EXPECT_EQ(best_cutoff(half, CutoffMode::fixed_failure, 1.0), (CutoffChoice{true, 1, 1, 1, 0.5}));

  const std::vector<double> p = {0.0, 0.2, 0.6, 1.0, 1.0};
  const auto ff = best_cutoff(p, CutoffMode::fixed_failure, 0.01);
  EXPECT_EQ(ff.k, 3u);
  EXPECT_EQ(ff.runs, 1u);
  EXPECT_EQ(ff.failure, 0.0);
  const auto fb = best_cutoff(p, CutoffMode::fixed_budget, 10);
  EXPECT_EQ(fb.k, 3u);  // k = 4 also reaches zero failure; the smaller k wins
  EXPECT_EQ(fb.runs, 1u);
  const auto tight = best_cutoff(p, CutoffMode::fixed_budget, 2);
  EXPECT_EQ(tight.k, 2u);
  EXPECT_EQ(tight.runs, 1u);
  EXPECT_DOUBLE_EQ(tight.failure, 0.4);
}

TEST(BestCutoff, Infeasible) {
  const std::vector<double> zero(10, 0.0);
  EXPECT_FALSE(best_cutoff(zero, CutoffMode::fixed_budget, 100).feasible);
  EXPECT_FALSE(best_cutoff(zero, CutoffMode::fixed_failure, 0.5).feasible);
  const std::vector<double> late = {0.0, 0.0, 0.0, 0.9};
  EXPECT_FALSE(best_cutoff(late, CutoffMode::fixed_budget, 2).feasible);
  EXPECT_FALSE(best_cutoff(late, CutoffMode::fixed_budget, 0.5).feasible);
  EXPECT_FALSE(best_cutoff(std::vector<double>{0.0, 0.5}, CutoffMode::fixed_failure, 0.0).feasible);
  EXPECT_FALSE(best_cutoff(std::vector<double>{}, CutoffMode::fixed_failure, 0.5).feasible);
}

TEST(BestCutoffProperty, MatchesGridOracle) {
  Rng rng(2718);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t runs = 5 + rng.below(40);
    const auto p = random_curve(rng, 1 + rng.below(40), runs);
    const double budget = static_cast<double>(1 + rng.below(300));
    const double eps = 0.01 + 0.99 * rng.uniform01();
    // With p >= 1/45 and eps >= 0.01, no optimum needs more than ~205 runs.
    for (auto [mode, param, cap] : {std::tuple{CutoffMode::fixed_budget, budget, std::size_t{300}},
                                    std::tuple{CutoffMode::fixed_failure, eps, std::size_t{400}}}) {
      const auto got = best_cutoff(p, mode, param);
      const auto want = grid_oracle(p, mode, param, cap);
      ASSERT_EQ(got.feasible, want.feasible) << "trial " << trial;
      if (!got.feasible) continue;
      EXPECT_EQ(got.k, want.k) << "trial " << trial;
      EXPECT_EQ(got.runs, want.runs) << "trial " << trial;
      EXPECT_EQ(got.cost, got.k * got.runs);
      EXPECT_DOUBLE_EQ(got.failure, std::pow(1.0 - p[got.k], static_cast<double>(got.runs)));
    }
  }
}

TEST(CutoffTable, RowsAreMinimalRunCounts) {
  const std::vector<double> p = {0.0, 0.0, 0.3, 0.75, 1.0};
  const auto rows = build_cutoff_table(p, 0.05);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].k, 2u);
  EXPECT_EQ(rows[0].runs, 9u);  // 0.7^8 = 0.0576, 0.7^9 = 0.0404
  EXPECT_EQ(rows[1].runs, 3u);  // 0.25^2 = 0.0625
  EXPECT_EQ(rows[2].runs, 1u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.cost, r.k * r.runs);
    EXPECT_DOUBLE_EQ(r.failure, std::pow(1.0 - p[r.k], static_cast<double>(r.runs)));
  }
}

TEST(Campaign, ImpossibleTargetGivesZeroCurve) {
  const auto db = example_db();
  MeasureCampaign c;
  c.runs = 5;
  c.k_max = 20;
  c.criterion = OptimalityCriterion::target_fitness;
  c.target_fitness = 3.0;
  const auto rep = estimate_p_of_k(db, GaConfig{}, c);
  ASSERT_EQ(rep.p_hat.size(), 21u);
  for (double p : rep.p_hat) EXPECT_EQ(p, 0.0);
  EXPECT_TRUE(rep.cutoff_table.empty());
  EXPECT_FALSE(best_cutoff(rep, CutoffMode::fixed_failure, 0.5).feasible);
}

TEST(Campaign, TrivialTargetSucceedsImmediately) {
  const auto db = example_db();
  MeasureCampaign c;
  c.runs = 4;
  c.k_max = 3;
  c.criterion = OptimalityCriterion::target_fitness;
  c.target_fitness = 0.0;
  const auto rep = estimate_p_of_k(db, GaConfig{}, c);
  for (double p : rep.p_hat) EXPECT_EQ(p, 1.0);
  const auto choice = best_cutoff(rep, CutoffMode::fixed_failure, 1.0);
  EXPECT_EQ(choice.k, 1u);
  EXPECT_EQ(choice.runs, 1u);
}

TEST(Campaign, CurvesAndDeterminism) {
  const auto db = example_db();
  MeasureCampaign c;
  c.runs = 12;
  c.k_max = 60;
  c.base_seed = 7;
  const auto a = estimate_p_of_k(db, GaConfig{}, c);
  c.threads = 3;
  const auto b = estimate_p_of_k(db, GaConfig{}, c);
  EXPECT_EQ(a.runs, b.runs);
  EXPECT_EQ(a.p_hat, b.p_hat);
  EXPECT_EQ(a.oracle_size, 15u);
  ASSERT_EQ(a.runs.size(), 12u);
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].seed, derive_seed(7, i));
    EXPECT_EQ(a.runs[i].best_fitness.size(), 61u);
  }
  for (std::size_t k = 1; k < a.p_hat.size(); ++k) {
    EXPECT_GE(a.p_hat[k], a.p_hat[k - 1]);
    EXPECT_GE(a.avg_fitness[k], a.avg_fitness[k - 1]);  // default elitism keeps the best
    EXPECT_GE(a.leap_likelihood[k], a.leap_likelihood[k - 1]);
  }
  for (const auto& run : a.runs) {
    if (!run.first_success) continue;
    EXPECT_EQ(run.archive_size[*run.first_success], 15u);
    if (*run.first_success > 0) {
      EXPECT_LT(run.archive_size[*run.first_success - 1], 15u);
    }
  }
}

TEST(Campaign, Validation) {
  const auto db = example_db();
  MeasureCampaign c;
  c.runs = 0;
  EXPECT_THROW(estimate_p_of_k(db, GaConfig{}, c), UsageError);
  c = {};
  c.k_max = 0;
  EXPECT_THROW(estimate_p_of_k(db, GaConfig{}, c), UsageError);
}

TEST(Synthetic, DeterministicAndDegenerate) {
  EXPECT_EQ(generate_synthetic(50, 10, BernoulliModel{0.3}, 5), generate_synthetic(50, 10, BernoulliModel{0.3}, 5));
  EXPECT_NE(generate_synthetic(50, 10, BernoulliModel{0.3}, 5), generate_synthetic(50, 10, BernoulliModel{0.3}, 6));
  const auto none = generate_synthetic(20, 70, BernoulliModel{0.0}, 1);
  for (const auto& r : none.rows()) EXPECT_TRUE(r.empty());
  const auto all = generate_synthetic(20, 70, BernoulliModel{1.0}, 1);
  for (const auto& r : all.rows()) EXPECT_EQ(r.cardinality(), 70u);
  EXPECT_THROW(generate_synthetic(10, 5, BernoulliModel{1.5}, 1), UsageError);
  EXPECT_THROW(generate_synthetic(10, 5, PlantedModel{{{1, 2}}, -0.1, 0.0}, 1), UsageError);
  EXPECT_THROW(generate_synthetic(10, 5, PlantedModel{{{1, 9}}, 0.5, 0.0}, 1), UsageError);
  EXPECT_THROW(generate_synthetic(0, 5, BernoulliModel{}, 1), UsageError);
}

TEST(Synthetic, DesktopScaleRerunAndEmptyFamily) {
  EXPECT_EQ(generate_synthetic(10000, 8, BernoulliModel{0.3}, 42), generate_synthetic(10000, 8, BernoulliModel{0.3}, 42));
  const auto empty = generate_synthetic(30, 5, BernoulliModel{0.0}, 3);
  EXPECT_TRUE(apriori_mine(empty, MiningParams(0.1, empty)).family.itemsets.empty());
}

TEST(Synthetic, BernoulliDensity) {
  const auto db = generate_synthetic(2000, 20, BernoulliModel{0.3}, 11);
  std::size_t ones = 0;
  for (const auto& r : db.rows()) ones += r.cardinality();
  EXPECT_NEAR(static_cast<double>(ones) / (2000.0 * 20.0), 0.3, 0.01);
}

TEST(Synthetic, PlantedItemsetIsFrequent) {
  const PlantedModel model{{{1, 2, 3}}, 0.5, 0.02};
  int frequent = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto db = generate_synthetic(1000, 12, model, seed);
    frequent += is_frequent(db, Itemset::from_ids(12, {1, 2, 3}), MiningParams(0.3, db)) ? 1 : 0;
  }
  EXPECT_GE(frequent, 99);
}

TEST(Scaling, RowsAndStructuralRatios) {
  ScalingBenchConfig cfg;
  cfg.repetitions = 1;
  const auto rows = apriori_scaling_bench(cfg, {{200, 8}, {200, 16}});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].time_ratio.has_value());
  EXPECT_FALSE(rows[0].m2_ratio.has_value());
  // At p = 0.5 and sigma = 0.02 every single item is frequent, so m_2 = d(d-1)/2.
  EXPECT_EQ(rows[0].candidates_per_level.at(1), 28u);
  EXPECT_EQ(rows[1].candidates_per_level.at(1), 120u);
  ASSERT_TRUE(rows[1].m2_ratio.has_value());
  EXPECT_NEAR(*rows[1].m2_ratio, 120.0 / 28.0, 1e-12);
  EXPECT_EQ(rows[0].samples.size(), 1u);
  EXPECT_THROW(apriori_scaling_bench(ScalingBenchConfig{.repetitions = 0}, {{10, 4}}), UsageError);
}

TEST(Median, Examples) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_EQ(median({}), 0.0);
}
