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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "test_support.hpp"

using namespace gafim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gafim");
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gafim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& body) {
    const auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << body;
    return p.string();
  }

  fs::path dir_;
};

std::set<std::vector<std::size_t>> family_from_levels(const gafim::Json& result) {
  std::set<std::vector<std::size_t>> out;
  for (const auto& level : result.at("levels")) {
    for (const auto& it : level.at("itemsets")) out.insert(it.at("items").get<std::vector<std::size_t>>());
  }
  return out;
}

}  // namespace

TEST_F(CliTest, MineAprioriStructuredReproducesExampleFamily) {
  const auto r = run_cli({"mine-apriori", "--input", fixtures::example_path(), "--sigma", "0.2", "--report-format",
                          "structured"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = gafim::Json::parse(r.out);
  EXPECT_EQ(family_from_levels(j.at("result")), fixtures::example_family());
  EXPECT_EQ(j["result"]["min_count"], 3);
  EXPECT_EQ(j["result"]["total_candidates"], 32);
  EXPECT_EQ(j["manifest"]["subcommand"], "mine-apriori");
  EXPECT_EQ(j["manifest"]["version"], "1.0.0");
  EXPECT_EQ(j["manifest"]["inputs"][0]["fnv1a64"].get<std::string>().size(), 16u);
  EXPECT_TRUE(j.contains("timings"));
}

TEST_F(CliTest, TableAndTsvFormats) {
  const auto table = run_cli({"mine-apriori", "-i", fixtures::example_path(), "--sigma", "0.2"});
  ASSERT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("[3 5 7]  count=3"), std::string::npos);
  const auto tsv = run_cli({"mine-apriori", "-i", fixtures::example_path(), "--sigma", "0.2", "--report-format", "tsv"});
  ASSERT_EQ(tsv.code, 0);
  EXPECT_EQ(tsv.out.substr(0, tsv.out.find('\n')), "k\titems\tcount\tsupport");
  EXPECT_NE(tsv.out.find("3\t3 5 7\t3\t0.200000\n"), std::string::npos);
  EXPECT_EQ(std::count(tsv.out.begin(), tsv.out.end(), '\n'), 16);
}

TEST_F(CliTest, SparseInput) {
  std::string body;
  for (const char* row : fixtures::kExampleRows) {
    std::string line;
    for (std::size_t i = 0; i < 9; ++i) {
      if (row[i] == '1') line += (line.empty() ? "" : " ") + std::to_string(i + 1);
    }
    body += line + "\n";
  }
  const auto path = write("t1.txt", body);
  const auto r = run_cli({"mine-apriori", "-i", path, "--format", "sparse", "--items", "9", "--sigma", "0.2",
                          "--report-format", "structured", "--no-timings"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(family_from_levels(gafim::Json::parse(r.out)["result"]), fixtures::example_family());
}

TEST_F(CliTest, ExitCodes) {
  const auto t1 = fixtures::example_path();
  EXPECT_EQ(run_cli({"mine-apriori", "-i", t1, "--sigma", "1.5"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"mine-apriori", "-i", t1, "--sigma", "0"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"mine-apriori", "-i", write("empty.csv", ""), "--sigma", "0.2"}).code, cli::kExitParse);
  EXPECT_EQ(run_cli({"mine-apriori", "-i", write("bad.csv", "1,0\n1,2\n"), "--sigma", "0.2"}).code,
            cli::kExitParse);
  EXPECT_EQ(run_cli({"mine-apriori", "-i", (dir_ / "missing.csv").string(), "--sigma", "0.2"}).code,
            cli::kExitUsage);
  EXPECT_EQ(run_cli({"rules", "-i", t1, "--sigma", "0.2"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"mine-ga", "-i", t1, "--sigma", "0.2", "--population", "1"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"measure", "-i", t1, "--sigma", "0.2", "--runs", "0"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({"measure", "-i", t1, "--sigma", "0.2", "--budget", "5", "--failure", "0.1"}).code,
            cli::kExitUsage);
  EXPECT_EQ(run_cli({"no-such-command"}).code, cli::kExitUsage);
  EXPECT_EQ(run_cli({}).code, cli::kExitUsage);
  const auto parse = run_cli({"mine-apriori", "-i", write("bad2.csv", "1,0\n1,0,1\n"), "--sigma", "0.2"});
  EXPECT_NE(parse.err.find("line 2"), std::string::npos);
}

TEST_F(CliTest, VersionAndHelp) {
  const auto v = run_cli({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, "1.0.0\n");
  const auto h = run_cli({"--help"});
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("mine-apriori"), std::string::npos);
}

TEST_F(CliTest, RulesSubcommand) {
  const auto r = run_cli({"rules", "-i", fixtures::example_path(), "--sigma", "0.2", "--tau", "1.0",
                          "--report-format", "structured", "--no-timings"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = gafim::Json::parse(r.out);
  bool found = false;
  for (const auto& rule : j["result"]["rules"]) {
    EXPECT_EQ(rule["confidence"], 1.0);
    found = found || (rule["antecedent"] == std::vector<std::size_t>{3, 5} && rule["consequent"] == std::vector<std::size_t>{7});
  }
  EXPECT_TRUE(found);
}

TEST_F(CliTest, MineGaIsDeterministicAndSound) {
  const std::vector<std::string> args = {"mine-ga", "-i", fixtures::example_path(), "--sigma", "0.2", "--seed", "5",
                                         "--report-format", "structured", "--no-timings"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = gafim::Json::parse(a.out);
  EXPECT_FALSE(j.contains("timings"));
  EXPECT_EQ(j["manifest"]["seeds"][0], 5);
  for (const auto& it : j["result"]["archive"]) {
    EXPECT_TRUE(fixtures::example_family().contains(it["items"].get<std::vector<std::size_t>>()));
  }
}

TEST_F(CliTest, CompareReportsRecall) {
  const auto r = run_cli({"compare", "-i", fixtures::example_path(), "--sigma", "0.2", "--seed", "3",
                          "--report-format", "structured", "--no-timings"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = gafim::Json::parse(r.out);
  EXPECT_EQ(j["result"]["oracle_size"], 15);
  EXPECT_TRUE(j["result"]["false_positives"].empty());
  const double recall = j["result"]["recall"];
  EXPECT_GE(recall, 0.0);
  EXPECT_LE(recall, 1.0);
}

TEST_F(CliTest, ConfigFileAndOverride) {
  const auto cfg = write("run.cfg", "# defaults\nsigma = 0.2\nreport-format=structured\nno-timings=true\n");
  const auto r = run_cli({"mine-apriori", "--config", cfg, "-i", fixtures::example_path()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = gafim::Json::parse(r.out);
  EXPECT_EQ(j["manifest"]["config"]["sigma"], 0.2);
  EXPECT_FALSE(j.contains("timings"));

  const auto over = run_cli({"mine-apriori", "--config", cfg, "-i", fixtures::example_path(), "--sigma", "0.5"});
  ASSERT_EQ(over.code, 0) << over.err;
  EXPECT_EQ(gafim::Json::parse(over.out)["manifest"]["config"]["sigma"], 0.5);

  EXPECT_EQ(run_cli({"mine-apriori", "--config", write("bad.cfg", "sigma\n"), "-i", fixtures::example_path()}).code,
            cli::kExitParse);
}

TEST_F(CliTest, GenThenLoad) {
  const auto path = (dir_ / "gen.csv").string();
  const auto g = run_cli({"gen", "--n", "40", "--d", "6", "--p", "0.4", "--seed", "9", "-o", path});
  ASSERT_EQ(g.code, 0) << g.err;
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  const auto db = load_binary_matrix(ss.str());
  EXPECT_EQ(db, generate_synthetic(40, 6, BernoulliModel{0.4}, 9));

  const auto planted = run_cli({"gen", "--n", "10", "--d", "5", "--model", "planted", "--planted", "1 2;4,5"});
  ASSERT_EQ(planted.code, 0) << planted.err;
  EXPECT_EQ(run_cli({"gen", "--model", "planted"}).code, cli::kExitUsage);
}

TEST_F(CliTest, MeasureWithTrivialFailureTarget) {
  const auto r = run_cli({"measure", "-i", fixtures::example_path(), "--sigma", "0.2", "--runs", "4", "--kmax", "10",
                          "--criterion", "fitness", "--target-fitness", "0", "--failure", "1.0", "--threads", "1",
                          "--report-format", "structured", "--no-timings"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = gafim::Json::parse(r.out);
  EXPECT_EQ(j["result"]["best_cutoff"]["k"], 1);
  EXPECT_EQ(j["result"]["best_cutoff"]["runs"], 1);
  EXPECT_EQ(j["manifest"]["seeds"].size(), 4u);
}

TEST_F(CliTest, MeasureInfeasibleExitsFour) {
  const auto r = run_cli({"measure", "-i", fixtures::example_path(), "--sigma", "0.2", "--runs", "3", "--kmax", "5",
                          "--criterion", "fitness", "--target-fitness", "5", "--budget", "20", "--threads", "1"});
  EXPECT_EQ(r.code, cli::kExitInfeasible);
  EXPECT_NE(r.out.find("infeasible"), std::string::npos);
}

TEST_F(CliTest, MeasureOnGeneratedDataIsDeterministic) {
  const std::vector<std::string> args = {"measure", "--n", "60", "--d", "6", "--p", "0.5", "--data-seed", "4",
                                         "--sigma", "0.3", "--runs", "5", "--kmax", "15", "--seed", "11",
                                         "--threads", "2", "--report-format", "structured", "--no-timings"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = gafim::Json::parse(a.out);
  EXPECT_EQ(j["manifest"]["seeds"][0], derive_seed(11, 0));
  EXPECT_EQ(j["result"]["p_hat"].size(), 16u);
}

TEST_F(CliTest, OutputFile) {
  const auto path = (dir_ / "report.json").string();
  const auto r = run_cli({"mine-apriori", "-i", fixtures::example_path(), "--sigma", "0.2", "--report-format",
                          "structured", "-o", path});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_TRUE(fs::exists(path));
}

TEST_F(CliTest, BenchSubcommand) {
  const auto r = run_cli({"bench", "--sizes", "100x4", "200x4", "--reps", "1", "--report-format", "structured",
                          "--no-timings"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = gafim::Json::parse(r.out);
  EXPECT_EQ(j["result"].size(), 2u);
  EXPECT_EQ(run_cli({"bench", "--sizes", "100by4"}).code, cli::kExitUsage);
}

TEST_F(CliTest, CompareAfterOneGenerationHasNoFalsePositives) {
  for (const char* seed : {"1", "2", "3", "4"}) {
    const auto r = run_cli({"compare", "-i", fixtures::example_path(), "--sigma", "0.2", "--seed", seed,
                            "--max-generations", "1", "--report-format", "structured", "--no-timings"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(gafim::Json::parse(r.out)["result"]["false_positives"].empty());
  }
}
