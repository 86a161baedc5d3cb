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

// Command-line front end. run() is the whole program minus process setup so
// tests can drive it in-process.
//
// Exit codes: 0 success, 2 usage error, 3 parse error, 4 infeasible
// campaign, 1 anything else.

#include <atomic>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "gafim/gafim.hpp"

namespace gafim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitParse = 3;
inline constexpr int kExitInfeasible = 4;

// Set from a SIGINT handler; a running GA stops with termination "manual".
inline std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

struct InputOptions {
  std::string path;
  std::string format = "dense";
  std::optional<std::size_t> items;
};

struct OutputOptions {
  std::string path;
  std::string report_format = "table";
  bool no_timings = false;
};

struct GeneratorOptions {
  std::size_t n = 1000;
  std::size_t d = 8;
  std::string model = "bernoulli";
  double p = 0.3;
  std::string planted;
  double q = 0.5;
  double noise = 0.05;
  std::uint64_t seed = 1;
};

namespace detail {

inline void add_input(CLI::App* sub, InputOptions& in, bool required) {
  auto* opt = sub->add_option("--input,-i", in.path, "Transaction database file");
  if (required) opt->required();
  sub->add_option("--format", in.format, "Input format")->check(CLI::IsMember({"dense", "sparse"}));
  sub->add_option("--items", in.items, "Item count override for sparse input");
}

inline void add_output(CLI::App* sub, OutputOptions& out) {
  sub->add_option("--output,-o", out.path, "Write the report here instead of stdout");
  sub->add_option("--report-format", out.report_format, "Report format")
      ->check(CLI::IsMember({"table", "structured", "tsv"}));
  sub->add_flag("--no-timings", out.no_timings, "Omit wall-clock fields from structured reports");
}

inline void add_ga(CLI::App* sub, GaConfig& c, bool with_seed = true) {
  if (with_seed) sub->add_option("--seed", c.rng_seed, "GA random seed");
  sub->add_option("--population", c.population_size, "Population size");
  sub->add_option("--mutation-rate", c.mutation_rate, "Per-gene flip probability");
  sub->add_option("--crossover-rate", c.crossover_rate, "Per-pair crossover probability");
  sub->add_option("--generation-gap", c.generation_gap, "Fraction of non-elite population replaced per generation");
  sub->add_option("--elitism", c.elitism_count, "Best individuals kept unchanged");
  sub->add_option("--max-generations", c.max_generations, "Generation limit");
  sub->add_option("--stall", c.stall_generations, "Stop after this many generations without archive growth (0 = off)");
  sub->add_option("--init-bit-probability", c.init_bit_probability, "Gene probability in the initial population");
  sub->add_option("--max-evaluations", c.max_evaluations, "Fitness-evaluation budget (0 = unlimited)");
  sub->add_option("--duplicate-retries", c.duplicate_retries, "Re-breeding attempts per offspring before duplicates are admitted");
}

inline void add_generator(CLI::App* sub, GeneratorOptions& g, const std::string& seed_flag) {
  sub->add_option("--n", g.n, "Synthetic transaction count");
  sub->add_option("--d", g.d, "Synthetic item count");
  sub->add_option("--model", g.model, "Synthetic model")->check(CLI::IsMember({"bernoulli", "planted"}));
  sub->add_option("--p", g.p, "Bernoulli item probability");
  sub->add_option("--planted", g.planted, "Planted itemsets, e.g. \"1 2 3;4 5\"");
  sub->add_option("--q", g.q, "Planted itemset occurrence probability");
  sub->add_option("--noise", g.noise, "Planted model background item probability");
  sub->add_option(seed_flag, g.seed, "Synthetic data seed");
}

inline SyntheticModel make_model(const GeneratorOptions& g) {
  if (g.model == "bernoulli") return BernoulliModel{g.p};
  PlantedModel pm;
  pm.q = g.q;
  pm.noise = g.noise;
  std::stringstream groups(g.planted);
  std::string group;
  while (std::getline(groups, group, ';')) {
    std::vector<std::size_t> ids;
    std::stringstream items(group);
    std::string tok;
    while (items >> tok) {
      for (char& ch : tok) {
        if (ch == ',') ch = ' ';
      }
      std::stringstream inner(tok);
      long long v = 0;
      while (inner >> v) {
        if (v <= 0) throw UsageError("planted item ids must be positive");
        ids.push_back(static_cast<std::size_t>(v));
      }
    }
    if (!ids.empty()) pm.itemsets.push_back(std::move(ids));
  }
  if (pm.itemsets.empty()) throw UsageError("planted model needs --planted itemsets");
  return pm;
}

inline Json generator_json(const GeneratorOptions& g) {
  Json j{{"n", g.n}, {"d", g.d}, {"model", g.model}, {"seed", g.seed}};
  if (g.model == "bernoulli") {
    j["p"] = g.p;
  } else {
    j["planted"] = g.planted;
    j["q"] = g.q;
    j["noise"] = g.noise;
  }
  return j;
}

struct LoadedInput {
  TransactionDatabase db;
  std::string text;
};

inline LoadedInput load_input(const InputOptions& in) {
  std::string text = read_text_file(in.path);
  if (in.format == "dense") {
    if (in.items) throw UsageError("--items applies to sparse input only");
    return {load_binary_matrix(text, in.path), std::move(text)};
  }
  return {load_transaction_list(text, in.items, in.path), std::move(text)};
}

inline Json input_config_json(const InputOptions& in) {
  Json j{{"input", in.path}, {"format", in.format}};
  if (in.items) j["items"] = *in.items;
  return j;
}

inline void check_sigma(double sigma) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw UsageError("--sigma must lie in (0, 1]");
}

inline void emit(const OutputOptions& out, const std::string& body, std::ostream& stdout_stream) {
  if (out.path.empty()) {
    stdout_stream << body;
    return;
  }
  std::ofstream f(out.path, std::ios::binary);
  if (!f) throw UsageError("cannot write output file '" + out.path + "'");
  f << body;
}

inline std::string structured(const RunManifest& m, Json result, const Json& timings, const OutputOptions& out) {
  return make_report(m, std::move(result), out.no_timings ? nullptr : &timings).dump(2) + "\n";
}

// Reads key=value lines (blank lines and '#' comments ignored) and turns
// them into "--key=value" arguments; an empty value gives a bare "--key".
inline std::vector<std::string> config_file_args(const std::string& path) {
  const std::string text = read_text_file(path);
  std::vector<std::string> args;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string_view trimmed = gafim::detail::trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "config line is not key=value");
    const std::string key(gafim::detail::trim(trimmed.substr(0, eq)));
    const std::string value(gafim::detail::trim(trimmed.substr(eq + 1)));
    if (key.empty()) throw ParseError(lineno, "config line has an empty key");
    args.push_back(value.empty() ? "--" + key : "--" + key + "=" + value);
  }
  return args;
}

// Splices a --config file's arguments in right after the subcommand name so
// flags given explicitly on the command line (which come later) win.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config_path || rest.size() < 2) return rest;
  auto extra = config_file_args(*config_path);
  rest.insert(rest.begin() + 2, extra.begin(), extra.end());
  return rest;
}

}  // namespace detail

inline unsigned default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

/// args[0] is the program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Frequent itemset mining with Apriori and a genetic algorithm", "gafim"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(kToolVersion));
  app.add_option("--config", "key=value file of flag defaults (applied before command-line flags)");

  InputOptions in;
  OutputOptions outopt;
  GaConfig ga;
  GeneratorOptions gen;
  double sigma = 0.0;
  std::optional<double> tau;
  unsigned threads = 0;

  auto* mine_apriori = app.add_subcommand("mine-apriori", "Exact level-wise mining");
  add_input(mine_apriori, in, true);
  mine_apriori->add_option("--sigma", sigma, "Minimum support fraction in (0, 1]")->required();
  mine_apriori->add_option("--threads", threads, "Support-scan workers (default 1)");
  add_output(mine_apriori, outopt);

  auto* mine_ga = app.add_subcommand("mine-ga", "Genetic-algorithm mining");
  add_input(mine_ga, in, true);
  mine_ga->add_option("--sigma", ga.sigma, "Minimum support fraction in (0, 1]")->required();
  add_ga(mine_ga, ga);
  add_output(mine_ga, outopt);

  auto* compare = app.add_subcommand("compare", "Run both miners and diff the results");
  add_input(compare, in, true);
  compare->add_option("--sigma", ga.sigma, "Minimum support fraction in (0, 1]")->required();
  add_ga(compare, ga);
  add_output(compare, outopt);

  auto* rules = app.add_subcommand("rules", "Association rules from the Apriori family");
  add_input(rules, in, true);
  rules->add_option("--sigma", sigma, "Minimum support fraction in (0, 1]")->required();
  rules->add_option("--tau", tau, "Minimum confidence in (0, 1]; required")->required();
  add_output(rules, outopt);

  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic dataset in dense format");
  add_generator(gen_cmd, gen, "--seed");
  gen_cmd->add_option("--output,-o", outopt.path, "Destination file (stdout if omitted)");

  MeasureCampaign campaign;
  std::optional<double> budget;
  std::optional<double> failure;
  std::string criterion = "recall";
  std::uint64_t campaign_seed = 1;
  auto* measure = app.add_subcommand("measure", "GA performance campaign: p(k), average fitness, leaps, cut-off");
  add_input(measure, in, false);
  add_generator(measure, gen, "--data-seed");
  measure->add_option("--sigma", ga.sigma, "Minimum support fraction in (0, 1]")->required();
  add_ga(measure, ga, false);
  measure->add_option("--seed", campaign_seed, "Campaign base seed; run i uses a seed derived from it");
  measure->add_option("--runs", campaign.runs, "Independent GA runs r");
  measure->add_option("--kmax", campaign.k_max, "Generations per run");
  measure->add_option("--criterion", criterion, "Optimality criterion")
      ->check(CLI::IsMember({"recall", "fitness"}));
  measure->add_option("--target-fitness", campaign.target_fitness, "Threshold for --criterion fitness");
  measure->add_option("--leap-delta", campaign.leap_delta, "Minimum best-fitness jump counted as a leap");
  measure->add_option("--budget", budget, "Fixed budget C = k * r: report the (k, r) with least failure");
  measure->add_option("--failure", failure, "Fixed failure epsilon: report the (k, r) with least cost");
  measure->add_option("--threads", threads, "Concurrent runs (default: hardware threads)");
  add_output(measure, outopt);

  ScalingBenchConfig bench_cfg;
  std::vector<std::string> sizes_text{"2500x8", "5000x8", "10000x8"};
  double bench_p = 0.5;
  auto* bench = app.add_subcommand("bench", "Apriori scaling benchmark on synthetic Bernoulli data");
  bench->add_option("--sizes", sizes_text, "n x d pairs, e.g. 2500x8 5000x8");
  bench->add_option("--sigma", bench_cfg.sigma, "Minimum support fraction in (0, 1]");
  bench->add_option("--p", bench_p, "Bernoulli item probability");
  bench->add_option("--reps", bench_cfg.repetitions, "Timed repetitions per size (median reported)");
  bench->add_option("--seed", bench_cfg.seed, "Synthetic data seed");
  bench->add_option("--threads", threads, "Support-scan workers (default 1)");
  add_output(bench, outopt);

  try {
    args = expand_config(std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  }

  const bool structured_out = outopt.report_format == "structured";
  const bool tsv_out = outopt.report_format == "tsv";
  RunManifest manifest;

  try {
    if (mine_apriori->parsed()) {
      check_sigma(sigma);
      const auto loaded = load_input(in);
      const MiningParams params(sigma, loaded.db);
      const auto result = apriori_mine(loaded.db, params, {threads == 0 ? 1u : threads});
      manifest.subcommand = "mine-apriori";
      manifest.config = input_config_json(in);
      manifest.config["sigma"] = sigma;
      manifest.config["min_count"] = params.min_count();
      manifest.add_input(in.path, loaded.text);
      if (structured_out) {
        emit(outopt, structured(manifest, apriori_result_json(result, params, loaded.db.d()), apriori_timings_json(result), outopt), out);
      } else if (tsv_out) {
        emit(outopt, family_tsv(result.family), out);
      } else {
        emit(outopt, apriori_table(result, params), out);
      }
      return kExitOk;
    }

    if (mine_ga->parsed() || compare->parsed()) {
      check_sigma(ga.sigma);
      ga.validate();
      const auto loaded = load_input(in);
      GaHooks hooks;
      hooks.stop_requested = [](const GaState&) { return interrupt_flag().load(); };
      manifest.config = input_config_json(in);
      manifest.config["ga"] = ga_config_json(ga);
      manifest.add_input(in.path, loaded.text);
      manifest.seeds = {ga.rng_seed};

      if (mine_ga->parsed()) {
        const auto result = ga_mine(loaded.db, ga, hooks);
        manifest.subcommand = "mine-ga";
        if (structured_out) {
          emit(outopt, structured(manifest, ga_result_json(result), Json{{"seconds", result.seconds}}, outopt), out);
        } else if (tsv_out) {
          emit(outopt, ga_stats_tsv(result), out);
        } else {
          emit(outopt, ga_table(result, ga), out);
        }
        return kExitOk;
      }

      manifest.subcommand = "compare";
      const MiningParams params(ga.sigma, loaded.db);
      const auto oracle = apriori_mine(loaded.db, params);
      const auto cmp = compare_families(oracle.family, ga_mine(loaded.db, ga, hooks), oracle.trace.seconds);
      if (structured_out) {
        emit(outopt,
             structured(manifest, compare_json(cmp),
                        Json{{"apriori_seconds", cmp.apriori_seconds}, {"ga_seconds", cmp.ga.seconds}}, outopt),
             out);
      } else if (tsv_out) {
        std::string body = "status\titems\tcount\n";
        for (const auto& x : cmp.false_positives) body += "false_positive\t" + ids_text(x.items) + '\t' + std::to_string(x.count) + '\n';
        for (const auto& x : cmp.missed) body += "missed\t" + ids_text(x.items) + '\t' + std::to_string(x.count) + '\n';
        emit(outopt, body, out);
      } else {
        std::string body = compare_table(cmp);
        if (!outopt.no_timings) {
          body += "apriori seconds: " + fmt_double(cmp.apriori_seconds, 6) + "\nga seconds: " + fmt_double(cmp.ga.seconds, 6) + "\n";
        }
        emit(outopt, body, out);
      }
      return kExitOk;
    }

    if (rules->parsed()) {
      check_sigma(sigma);
      const RuleParams rp(*tau, sigma);
      const auto loaded = load_input(in);
      const MiningParams params(sigma, loaded.db);
      const auto mined = apriori_mine(loaded.db, params);
      const auto found = generate_rules(mined.family, rp);
      manifest.subcommand = "rules";
      manifest.config = input_config_json(in);
      manifest.config["sigma"] = sigma;
      manifest.config["tau"] = *tau;
      manifest.add_input(in.path, loaded.text);
      if (structured_out) {
        emit(outopt, structured(manifest, Json{{"rule_count", found.size()}, {"rules", rules_json(found)}}, Json{{"apriori_seconds", mined.trace.seconds}}, outopt), out);
      } else if (tsv_out) {
        emit(outopt, rules_tsv(found), out);
      } else {
        emit(outopt, rules_table(found), out);
      }
      return kExitOk;
    }

    if (gen_cmd->parsed()) {
      const auto db = generate_synthetic(gen.n, gen.d, make_model(gen), gen.seed);
      emit(outopt, serialize_dense(db), out);
      return kExitOk;
    }

    if (measure->parsed()) {
      check_sigma(ga.sigma);
      if (budget && failure) throw UsageError("--budget and --failure are mutually exclusive");
      campaign.base_seed = campaign_seed;
      campaign.criterion = criterion == "recall" ? OptimalityCriterion::full_recall : OptimalityCriterion::target_fitness;
      campaign.threads = threads == 0 ? default_threads() : threads;
      if (failure) campaign.cutoff_failure = *failure;
      campaign.validate();
      ga.validate();

      std::optional<TransactionDatabase> db;
      manifest.subcommand = "measure";
      if (!in.path.empty()) {
        auto loaded = load_input(in);
        manifest.config = input_config_json(in);
        manifest.add_input(in.path, loaded.text);
        db.emplace(std::move(loaded.db));
      } else {
        db.emplace(generate_synthetic(gen.n, gen.d, make_model(gen), gen.seed));
        manifest.config["generator"] = generator_json(gen);
      }
      const auto report = estimate_p_of_k(*db, ga, campaign);
      manifest.config["ga"] = ga_config_json(report.ga_config);
      manifest.config["campaign"] = campaign_json(campaign);
      for (const auto& rec : report.runs) manifest.seeds.push_back(rec.seed);

      std::optional<CutoffChoice> choice;
      Json result = perf_result_json(report);
      if (budget) {
        choice = best_cutoff(report, CutoffMode::fixed_budget, *budget);
        result["best_cutoff"] = cutoff_json(*choice);
        result["best_cutoff"]["mode"] = "fixed_budget";
        result["best_cutoff"]["parameter"] = *budget;
      } else if (failure) {
        choice = best_cutoff(report, CutoffMode::fixed_failure, *failure);
        result["best_cutoff"] = cutoff_json(*choice);
        result["best_cutoff"]["mode"] = "fixed_failure";
        result["best_cutoff"]["parameter"] = *failure;
      }

      if (structured_out) {
        emit(outopt, structured(manifest, std::move(result), Json{{"seconds", report.seconds}}, outopt), out);
      } else if (tsv_out) {
        emit(outopt, perf_tsv(report), out);
      } else {
        std::string body = perf_table(report);
        if (choice) {
          body += choice->feasible ? "best cut-off: k=" + std::to_string(choice->k) + " r=" + std::to_string(choice->runs) +
                                         " C=" + std::to_string(choice->cost) + " failure=" + fmt_double(choice->failure) + "\n"
                                   : std::string("best cut-off: infeasible\n");
        }
        emit(outopt, body, out);
      }
      if (choice && !choice->feasible) {
        err << "infeasible: no (k, r) satisfies the requested cut-off constraint\n";
        return kExitInfeasible;
      }
      return kExitOk;
    }

    if (bench->parsed()) {
      std::vector<std::pair<std::size_t, std::size_t>> sizes;
      for (const auto& s : sizes_text) {
        const auto x = s.find('x');
        if (x == std::string::npos) throw UsageError("size '" + s + "' is not of the form NxD");
        try {
          sizes.emplace_back(std::stoull(s.substr(0, x)), std::stoull(s.substr(x + 1)));
        } catch (const std::exception&) {
          throw UsageError("size '" + s + "' is not of the form NxD");
        }
      }
      check_sigma(bench_cfg.sigma);
      bench_cfg.model = BernoulliModel{bench_p};
      bench_cfg.threads = threads == 0 ? 1u : threads;
      const auto rows = apriori_scaling_bench(bench_cfg, sizes);
      manifest.subcommand = "bench";
      manifest.config = Json{{"sizes", sizes_text}, {"sigma", bench_cfg.sigma}, {"p", bench_p},
                             {"reps", bench_cfg.repetitions}, {"seed", bench_cfg.seed}, {"threads", bench_cfg.threads}};
      manifest.seeds = {bench_cfg.seed};
      if (structured_out) {
        emit(outopt, structured(manifest, scaling_json(rows), scaling_timings_json(rows), outopt), out);
      } else {
        emit(outopt, scaling_tsv(rows), out);
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace gafim::cli
