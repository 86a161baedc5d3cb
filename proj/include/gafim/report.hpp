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

// Report serialization. Every report is a JSON object
//   { "manifest": {...}, "result": {...}, "timings": {...} }
// where "timings" holds every wall-clock figure and is omitted when timings
// are disabled, so two runs with equal manifests serialize byte-identically.

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gafim/apriori.hpp"
#include "gafim/ga_miner.hpp"
#include "gafim/perf_measures.hpp"
#include "gafim/rules.hpp"

namespace gafim {

inline constexpr std::string_view kToolName = "gafim";
inline constexpr std::string_view kToolVersion = "1.0.0";

enum class ReportFormat { table, structured, tsv };

/// 64-bit FNV-1a, used as the input-file digest in manifests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Subcommand, fully resolved configuration, input digests, tool version and
/// seeds. Embedded in every report.
struct RunManifest {
  std::string subcommand;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  std::vector<std::uint64_t> seeds;

  void add_input(const std::string& path, std::string_view content) {
    inputs.push_back({{"path", path}, {"fnv1a64", hex64(fnv1a64(content))}, {"bytes", content.size()}});
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["inputs"] = inputs;
    j["seeds"] = seeds;
    return j;
  }
};

using Json = nlohmann::ordered_json;

inline Json ids_json(const Itemset& s) { return s.ids(); }

inline std::string ids_text(const Itemset& s) {
  std::string out;
  for (auto id : s.ids()) {
    if (!out.empty()) out += ' ';
    out += std::to_string(id);
  }
  return out;
}

inline std::string fmt_double(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

inline Json ga_config_json(const GaConfig& c) {
  return Json{{"population_size", c.population_size},
              {"mutation_rate", c.mutation_rate},
              {"crossover_rate", c.crossover_rate},
              {"generation_gap", c.generation_gap},
              {"elitism_count", c.elitism_count},
              {"max_generations", c.max_generations},
              {"stall_generations", c.stall_generations},
              {"rng_seed", c.rng_seed},
              {"sigma", c.sigma},
              {"init_bit_probability", c.init_bit_probability},
              {"max_evaluations", c.max_evaluations},
              {"duplicate_retries", c.duplicate_retries},
              {"offspring_per_generation", c.offspring_per_generation()},
              {"rng", "mt19937_64"}};
}

inline Json counted_json(const CountedItemset& c, std::size_t n) {
  return Json{{"items", ids_json(c.items)},
              {"count", c.count},
              {"support", static_cast<double>(c.count) / static_cast<double>(n)}};
}

inline Json family_json(const FrequentFamily& f) {
  Json arr = Json::array();
  for (const auto& c : f.itemsets) arr.push_back(counted_json(c, f.transaction_count));
  return arr;
}

// ---------------------------------------------------------------------------
// Apriori

inline Json apriori_result_json(const AprioriResult& r, const MiningParams& p, std::size_t d) {
  Json j;
  j["n"] = p.transaction_count();
  j["d"] = d;
  j["sigma"] = p.sigma();
  j["min_count"] = p.min_count();
  Json levels = Json::array();
  for (const auto& l : r.levels) {
    Json lj;
    lj["k"] = l.k;
    lj["candidates"] = l.candidates.size();
    lj["frequent"] = l.frequents.size();
    Json items = Json::array();
    for (const auto& f : l.frequents) items.push_back(counted_json(f, p.transaction_count()));
    lj["itemsets"] = std::move(items);
    levels.push_back(std::move(lj));
  }
  j["levels"] = std::move(levels);
  j["total_candidates"] = r.trace.total_candidates;
  j["database_scans"] = r.trace.database_scans;
  j["frequent_total"] = r.family.size();
  return j;
}

inline Json apriori_timings_json(const AprioriResult& r) {
  Json per = Json::array();
  for (const auto& l : r.trace.levels) per.push_back({{"k", l.k}, {"seconds", l.seconds}});
  return Json{{"total_seconds", r.trace.seconds}, {"levels", per}};
}

inline std::string apriori_table(const AprioriResult& r, const MiningParams& p) {
  std::ostringstream os;
  os << "sigma=" << p.sigma() << " min_count=" << p.min_count() << " n=" << p.transaction_count() << "\n";
  for (const auto& l : r.levels) {
    os << "level " << l.k << ": m_k=" << l.candidates.size() << " |L_k|=" << l.frequents.size() << "\n";
    for (const auto& f : l.frequents) {
      os << "  [" << ids_text(f.items) << "]  count=" << f.count << "  support="
         << fmt_double(static_cast<double>(f.count) / static_cast<double>(p.transaction_count())) << "\n";
    }
  }
  os << "total candidates=" << r.trace.total_candidates << " scans=" << r.trace.database_scans
     << " frequent=" << r.family.size() << "\n";
  return os.str();
}

inline std::string family_tsv(const FrequentFamily& f) {
  std::string out = "k\titems\tcount\tsupport\n";
  for (const auto& c : f.itemsets) {
    out += std::to_string(c.items.cardinality()) + '\t' + ids_text(c.items) + '\t' + std::to_string(c.count) + '\t' +
           fmt_double(static_cast<double>(c.count) / static_cast<double>(f.transaction_count)) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// GA

inline Json ga_result_json(const GaRunResult& r) {
  Json j;
  j["seed"] = r.seed;
  j["termination"] = to_string(r.termination);
  j["generations_run"] = r.generations_run;
  j["evaluations"] = r.evaluations;
  j["archive_size"] = r.archive.size();
  j["archive"] = family_json(r.archive);
  Json stats = Json::array();
  for (const auto& s : r.stats) {
    stats.push_back({{"generation", s.generation},
                     {"best_fitness", s.best_fitness},
                     {"mean_fitness", s.mean_fitness},
                     {"archive_size", s.archive_size}});
  }
  j["stats"] = std::move(stats);
  return j;
}

inline std::string ga_table(const GaRunResult& r, const GaConfig& c) {
  std::ostringstream os;
  os << "seed=" << r.seed << " population=" << c.population_size << " mutation=" << c.mutation_rate
     << " crossover=" << c.crossover_rate << " gap=" << c.generation_gap << " elitism=" << c.elitism_count
     << " max_generations=" << c.max_generations << " stall=" << c.stall_generations << " sigma=" << c.sigma << "\n";
  os << "termination=" << to_string(r.termination) << " generations=" << r.generations_run
     << " evaluations=" << r.evaluations << "\n";
  os << "archive (" << r.archive.size() << " frequent itemsets):\n";
  for (const auto& a : r.archive.itemsets) {
    os << "  [" << ids_text(a.items) << "]  " << a.items.to_bitstring() << "  count=" << a.count << "\n";
  }
  if (!r.stats.empty()) {
    const auto& s = r.stats.back();
    os << "final generation: best=" << fmt_double(s.best_fitness) << " mean=" << fmt_double(s.mean_fitness) << "\n";
  }
  return os.str();
}

inline std::string ga_stats_tsv(const GaRunResult& r) {
  std::string out = "generation\tbest_fitness\tmean_fitness\tarchive_size\n";
  for (const auto& s : r.stats) {
    out += std::to_string(s.generation) + '\t' + fmt_double(s.best_fitness) + '\t' + fmt_double(s.mean_fitness) +
           '\t' + std::to_string(s.archive_size) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Compare

struct CompareResult {
  FrequentFamily oracle;
  GaRunResult ga;
  std::vector<CountedItemset> false_positives;  // archive \ oracle
  std::vector<CountedItemset> missed;           // oracle \ archive
  double recall = 0.0;
  double apriori_seconds = 0.0;
};

inline CompareResult compare_families(const FrequentFamily& oracle, GaRunResult ga, double apriori_seconds) {
  CompareResult c;
  const auto oracle_idx = oracle.count_index();
  const auto archive_idx = ga.archive.count_index();
  for (const auto& a : ga.archive.itemsets) {
    if (!oracle_idx.contains(a.items)) c.false_positives.push_back(a);
  }
  for (const auto& o : oracle.itemsets) {
    if (!archive_idx.contains(o.items)) c.missed.push_back(o);
  }
  c.recall = oracle.size() == 0
                 ? 1.0
                 : static_cast<double>(oracle.size() - c.missed.size()) / static_cast<double>(oracle.size());
  c.oracle = oracle;
  c.ga = std::move(ga);
  c.apriori_seconds = apriori_seconds;
  return c;
}

inline Json compare_json(const CompareResult& c) {
  Json fp = Json::array();
  for (const auto& x : c.false_positives) fp.push_back(counted_json(x, c.oracle.transaction_count));
  Json missed = Json::array();
  for (const auto& x : c.missed) missed.push_back(counted_json(x, c.oracle.transaction_count));
  return Json{{"oracle_size", c.oracle.size()},
              {"archive_size", c.ga.archive.size()},
              {"recall", c.recall},
              {"false_positives", fp},
              {"missed", missed},
              {"ga_termination", to_string(c.ga.termination)},
              {"ga_generations_run", c.ga.generations_run},
              {"seed", c.ga.seed}};
}

inline std::string compare_table(const CompareResult& c) {
  std::ostringstream os;
  os << "apriori frequent itemsets: " << c.oracle.size() << "\n";
  os << "ga archive: " << c.ga.archive.size() << " (seed " << c.ga.seed << ", " << c.ga.generations_run
     << " generations, " << to_string(c.ga.termination) << ")\n";
  os << "recall: " << fmt_double(c.recall, 4) << "\n";
  os << "false positives: " << c.false_positives.size() << "\n";
  for (const auto& x : c.false_positives) os << "  + [" << ids_text(x.items) << "]\n";
  os << "missed: " << c.missed.size() << "\n";
  for (const auto& x : c.missed) os << "  - [" << ids_text(x.items) << "]\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Rules

inline Json rules_json(const std::vector<AssociationRule>& rules) {
  Json arr = Json::array();
  for (const auto& r : rules) {
    arr.push_back({{"antecedent", ids_json(r.antecedent)},
                   {"consequent", ids_json(r.consequent)},
                   {"support_count", r.support_count},
                   {"support", r.support},
                   {"confidence", r.confidence}});
  }
  return arr;
}

inline std::string rules_table(const std::vector<AssociationRule>& rules) {
  std::ostringstream os;
  os << rules.size() << " rules\n";
  for (const auto& r : rules) {
    os << "  [" << ids_text(r.antecedent) << "] => [" << ids_text(r.consequent) << "]  count=" << r.support_count
       << "  support=" << fmt_double(r.support) << "  confidence=" << fmt_double(r.confidence) << "\n";
  }
  return os.str();
}

inline std::string rules_tsv(const std::vector<AssociationRule>& rules) {
  std::string out = "antecedent\tconsequent\tsupport_count\tsupport\tconfidence\n";
  for (const auto& r : rules) {
    out += ids_text(r.antecedent) + '\t' + ids_text(r.consequent) + '\t' + std::to_string(r.support_count) + '\t' +
           fmt_double(r.support) + '\t' + fmt_double(r.confidence) + '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Campaigns and benchmarks

inline Json campaign_json(const MeasureCampaign& c) {
  return Json{{"runs", c.runs},
              {"k_max", c.k_max},
              {"base_seed", c.base_seed},
              {"criterion", to_string(c.criterion)},
              {"target_fitness", c.target_fitness},
              {"leap_delta", c.leap_delta},
              {"cutoff_failure", c.cutoff_failure}};
}

inline Json cutoff_json(const CutoffChoice& c) {
  if (!c.feasible) return Json{{"feasible", false}};
  return Json{{"feasible", true}, {"k", c.k}, {"runs", c.runs}, {"cost", c.cost}, {"failure", c.failure}};
}

inline Json perf_result_json(const PerfReport& r) {
  Json j;
  j["oracle_size"] = r.oracle_size;
  Json runs = Json::array();
  for (const auto& rec : r.runs) {
    Json rj{{"seed", rec.seed}};
    rj["first_success"] = rec.first_success ? Json(*rec.first_success) : Json(nullptr);
    runs.push_back(std::move(rj));
  }
  j["runs"] = std::move(runs);
  j["p_hat"] = r.p_hat;
  j["avg_fitness"] = r.avg_fitness;
  j["leap_likelihood"] = r.leap_likelihood;
  Json table = Json::array();
  for (const auto& row : r.cutoff_table) {
    table.push_back({{"k", row.k}, {"runs", row.runs}, {"cost", row.cost}, {"failure", row.failure}});
  }
  j["cutoff_table"] = std::move(table);
  return j;
}

inline std::string perf_tsv(const PerfReport& r) {
  std::string out = "k\tp_hat\tavg_fitness\tleap_likelihood\n";
  for (std::size_t k = 0; k < r.p_hat.size(); ++k) {
    out += std::to_string(k) + '\t' + fmt_double(r.p_hat[k]) + '\t' + fmt_double(r.avg_fitness[k]) + '\t' +
           fmt_double(k < r.leap_likelihood.size() ? r.leap_likelihood[k] : 0.0) + '\n';
  }
  return out;
}

inline std::string perf_table(const PerfReport& r) {
  std::ostringstream os;
  os << "runs=" << r.campaign.runs << " k_max=" << r.campaign.k_max << " base_seed=" << r.campaign.base_seed
     << " criterion=" << to_string(r.campaign.criterion) << "\n";
  std::size_t successes = 0;
  for (const auto& rec : r.runs) successes += rec.first_success ? 1 : 0;
  os << "runs reaching the criterion: " << successes << "/" << r.runs.size() << "\n";
  os << "     k     p_hat  avg_fitness  leap_likelihood\n";
  const std::size_t last = r.p_hat.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    // Print the first ten generations, then every tenth, then the last.
    if (k > 10 && k % 10 != 0 && k != last) continue;
    char line[128];
    std::snprintf(line, sizeof line, "%6zu  %8.4f  %11.6f  %15.4f\n", k, r.p_hat[k], r.avg_fitness[k],
                  r.leap_likelihood[k]);
    os << line;
  }
  os << "cutoff rows (failure <= " << r.campaign.cutoff_failure << "): " << r.cutoff_table.size() << "\n";
  return os.str();
}

inline Json scaling_json(const std::vector<ScalingRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j{{"n", r.n},
           {"d", r.d},
           {"candidates_per_level", r.candidates_per_level},
           {"total_candidates", r.total_candidates},
           {"frequent", r.frequent_count}};
    j["m2_ratio"] = r.m2_ratio ? Json(*r.m2_ratio) : Json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

inline Json scaling_timings_json(const std::vector<ScalingRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json j{{"n", r.n}, {"d", r.d}, {"median_seconds", r.median_seconds}, {"samples", r.samples}};
    j["time_ratio"] = r.time_ratio ? Json(*r.time_ratio) : Json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

inline std::string scaling_tsv(const std::vector<ScalingRow>& rows) {
  std::string out = "n\td\tmedian_seconds\ttotal_candidates\tm2\ttime_ratio\tm2_ratio\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + '\t' + std::to_string(r.d) + '\t' + fmt_double(r.median_seconds, 9) + '\t' +
           std::to_string(r.total_candidates) + '\t' +
           std::to_string(r.candidates_per_level.size() > 1 ? r.candidates_per_level[1] : 0) + '\t' +
           (r.time_ratio ? fmt_double(*r.time_ratio, 4) : std::string("-")) + '\t' +
           (r.m2_ratio ? fmt_double(*r.m2_ratio, 4) : std::string("-")) + '\n';
  }
  return out;
}

/// Assembles the top-level report object.
inline Json make_report(const RunManifest& manifest, Json result, const Json* timings) {
  Json j;
  j["manifest"] = manifest.to_json();
  j["result"] = std::move(result);
  if (timings != nullptr) j["timings"] = *timings;
  return j;
}

}  // namespace gafim
