// Copyright 2026 The btrank Authors.
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

#include "cli/cli.h"

#include <gtest/gtest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <unistd.h>

#include "btrank/comparisons_io.h"
#include "btrank/pipeline.h"
#include "cli/manifest.h"
#include "json.hpp"

namespace btrank::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string Data(const std::string& name) {
  return (fs::path(BTRANK_SOURCE_DIR) / "data" / name).string();
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

json ReadJson(const fs::path& path) { return json::parse(Slurp(path)); }

std::vector<std::vector<std::string>> ReadCsv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(SplitCsvLine(line, 0));
  return rows;
}

double ToDouble(const std::string& s) {
  double v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           ("btrank_cli_" + std::to_string(::getpid()) + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Run(std::vector<std::string> args) { return cli::Run(args); }
  std::string Out(const std::string& sub) const { return (dir_ / sub).string(); }

  fs::path dir_;
};

TEST(Manifest, Sha256KnownAnswer) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Sha256Hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(Run({"--help"}), kExitOk);
  EXPECT_EQ(Run({}), kExitInputError);
  EXPECT_EQ(Run({"frobnicate"}), kExitInputError);
  EXPECT_EQ(Run({"--format", "xml", "ingest", Data("citations_2x2.csv")}),
            kExitInputError);
}

TEST_F(CliTest, IngestTwoByTwo) {
  ASSERT_EQ(Run({"--out-dir", Out("a"), "ingest", Data("citations_2x2.csv"),
                 "--input-type", "citations"}),
            kExitOk);
  const json dataset = ReadJson(dir_ / "a/dataset.json");
  EXPECT_EQ(dataset["pairs"].size(), 1u);
  const json summary = ReadJson(dir_ / "a/summary.json");
  EXPECT_EQ(summary["num_pairs"], 1);
  EXPECT_EQ(summary["total_matches"], 10);
  EXPECT_TRUE(summary["connected"].get<bool>());
  const json manifest = ReadJson(dir_ / "a/manifest.json");
  EXPECT_EQ(manifest["command"], "ingest");
  EXPECT_EQ(manifest["inputs"][0]["sha256"],
            FileSha256(Data("citations_2x2.csv")));
  EXPECT_EQ(manifest["outputs"], json({"dataset.json", "summary.json"}));
  int manifests = 0;
  for (const auto& entry : fs::directory_iterator(dir_ / "a")) {
    manifests += entry.path().filename() == "manifest.json";
  }
  EXPECT_EQ(manifests, 1);
}

TEST_F(CliTest, IngestJournalFixtureReportsConnectivity) {
  ASSERT_EQ(Run({"--out-dir", Out("j"), "ingest",
                 Data("citations_synthetic86.csv"), "--input-type", "citations"}),
            kExitOk);
  const json summary = ReadJson(dir_ / "j/summary.json");
  EXPECT_EQ(summary["num_players"], 86);
  EXPECT_TRUE(summary["connected"].get<bool>());
  EXPECT_EQ(summary["num_components"], 1);
}

TEST_F(CliTest, IngestDisconnectedWarnsButSucceeds) {
  std::ofstream(dir_ / "c.csv") << "x,A,B,C\nA,1,2,0\nB,3,1,0\nC,0,0,5\n";
  ASSERT_EQ(Run({"--out-dir", Out("d"), "ingest", (dir_ / "c.csv").string(),
                 "--input-type", "citations"}),
            kExitOk);
  const json summary = ReadJson(dir_ / "d/summary.json");
  EXPECT_FALSE(summary["connected"].get<bool>());
  EXPECT_EQ(summary["components"], json({{0, 1}, {2}}));
  EXPECT_EQ(summary["warnings"].size(), 1u);
}

TEST_F(CliTest, IngestMatchesWithRoster) {
  std::ofstream(dir_ / "roster.txt") << "x\ny\nz\nw\n";
  ASSERT_EQ(Run({"--out-dir", Out("m"), "ingest", Data("matches_three.csv"),
                 "--input-type", "matches", "--roster",
                 (dir_ / "roster.txt").string()}),
            kExitOk);
  const json summary = ReadJson(dir_ / "m/summary.json");
  EXPECT_EQ(summary["num_players"], 4);
  EXPECT_FALSE(summary["connected"].get<bool>());
  std::ofstream(dir_ / "short.txt") << "x\ny\n";
  EXPECT_EQ(Run({"--out-dir", Out("m2"), "ingest", Data("matches_three.csv"),
                 "--input-type", "matches", "--roster",
                 (dir_ / "short.txt").string()}),
            kExitInputError);
}

TEST_F(CliTest, InputErrorsExitWithTwo) {
  EXPECT_EQ(Run({"--out-dir", Out("e"), "ingest", Out("missing.csv"),
                 "--input-type", "citations"}),
            kExitInputError);
  EXPECT_EQ(Run({"--out-dir", Out("e"), "ingest", Data("citations_2x2.csv")}),
            kExitInputError);
  EXPECT_EQ(Run({"--out-dir", Out("e"), "ingest", Data("matches_three.csv"),
                 "--input-type", "citations"}),
            kExitInputError);
  EXPECT_EQ(Run({"--out-dir", Out("e"), "rank", Data("matches_three.csv"),
                 "--input-type", "matches", "--methods", "MLE,XYZ"}),
            kExitInputError);
  std::ofstream(dir_ / "bad.json") << "{\"num_players\": 2, \"pairs\": [[0, 1]]}";
  EXPECT_EQ(Run({"--out-dir", Out("e"), "rank", (dir_ / "bad.json").string()}),
            kExitInputError);
}

TEST_F(CliTest, RankThreePlayersMatchesPipeline) {
  ASSERT_EQ(Run({"--out-dir", Out("r"), "rank", Data("matches_three.csv"),
                 "--input-type", "matches"}),
            kExitOk);
  for (const char* name : {"rankings.csv", "fit.json", "mixing.csv",
                           "posterior.csv", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "r" / name)) << name;
  }
  std::ifstream in(Data("matches_three.csv"));
  const MatchLog log = ReadMatchLog(in);
  const ComparisonDataset d = Aggregate(log.records, log.num_players, log.labels);
  const EstimatorReport report = RunEstimators(d, kAllMethods);
  const auto rows = ReadCsv(dir_ / "r/rankings.csv");
  ASSERT_EQ(rows.size(), 1u + 7 * 3);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"method", "label", "score", "rank"}));
  for (size_t r = 1; r < rows.size(); ++r) {
    const Method m = *ParseMethod(rows[r][0]);
    const int player = static_cast<int>((r - 1) % 3);
    EXPECT_EQ(rows[r][1], d.Label(player));
    EXPECT_EQ(ToDouble(rows[r][2]), report.Find(m)->scores[player]);
  }
  const json manifest = ReadJson(dir_ / "r/manifest.json");
  EXPECT_TRUE(manifest["details"]["failures"].empty());
  EXPECT_EQ(manifest["details"]["selected_lambda"], *report.selected_lambda);
}

TEST_F(CliTest, RankBalancedMleAndBordaAgree) {
  ASSERT_EQ(Run({"--out-dir", Out("b"), "rank", Data("matches_balanced.csv"),
                 "--input-type", "matches", "--methods", "MLE,B"}),
            kExitOk);
  std::map<std::string, std::map<std::string, std::string>> rank;
  const auto rows = ReadCsv(dir_ / "b/rankings.csv");
  for (size_t r = 1; r < rows.size(); ++r) rank[rows[r][0]][rows[r][1]] = rows[r][3];
  EXPECT_EQ(rank["MLE"], rank["B"]);
  EXPECT_EQ(rank["MLE"].size(), 5u);
  EXPECT_FALSE(fs::exists(dir_ / "b/mixing.csv"));
}

TEST_F(CliTest, RankJsonFormatAndOptions) {
  ASSERT_EQ(Run({"--format", "json", "--out-dir", Out("j"), "rank",
                 Data("matches_three.csv"), "--input-type", "matches",
                 "--methods", "KWPR,KWPMs", "--ties", "half", "--bandwidth",
                 "0.2", "--grid-points", "101"}),
            kExitOk);
  const json rankings = ReadJson(dir_ / "j/rankings.json");
  ASSERT_EQ(rankings["methods"].size(), 2u);
  double sum = 0;
  for (const auto& p : rankings["methods"][0]["players"]) sum += p["score"].get<double>();
  EXPECT_NEAR(sum, 3.0, 1e-9);
  const json manifest = ReadJson(dir_ / "j/manifest.json");
  EXPECT_EQ(manifest["config"]["ties"], "half");
  EXPECT_EQ(manifest["config"]["grid_points"], 101);
  EXPECT_EQ(manifest["details"]["bandwidth"], 0.2);
}

TEST_F(CliTest, RankNumericalFailureExitsWithThree) {
  std::ofstream(dir_ / "sweep.csv") << "winner,loser\na,b\na,c\nb,c\nc,b\na,b\n";
  EXPECT_EQ(Run({"--out-dir", Out("f"), "rank", (dir_ / "sweep.csv").string(),
                 "--input-type", "matches"}),
            kExitNumericalFailure);
  const auto rows = ReadCsv(dir_ / "f/rankings.csv");
  ASSERT_EQ(rows.size(), 1u + 2 * 3);
  EXPECT_EQ(rows[1][0], "B");
  EXPECT_EQ(rows[4][0], "WB");
  const json manifest = ReadJson(dir_ / "f/manifest.json");
  EXPECT_EQ(manifest["details"]["failures"].size(), 5u);
  EXPECT_EQ(manifest["details"]["failures"][0]["error_code"], "Divergent");
}

TEST_F(CliTest, RankViaIngestedDataset) {
  ASSERT_EQ(Run({"--out-dir", Out("i"), "ingest", Data("citations_dominant.csv"),
                 "--input-type", "citations"}),
            kExitOk);
  ASSERT_EQ(Run({"--out-dir", Out("r1"), "rank", Out("i/dataset.json"),
                 "--methods", "MLE,WB"}),
            kExitOk);
  ASSERT_EQ(Run({"--out-dir", Out("r2"), "rank", Data("citations_dominant.csv"),
                 "--input-type", "citations", "--methods", "MLE,WB"}),
            kExitOk);
  EXPECT_EQ(Slurp(dir_ / "r1/rankings.csv"), Slurp(dir_ / "r2/rankings.csv"));
}

TEST_F(CliTest, PathOnDominantFixture) {
  ASSERT_EQ(Run({"--out-dir", Out("p"), "path", Data("citations_dominant.csv"),
                 "--input-type", "citations"}),
            kExitOk);
  const auto summary = ReadCsv(dir_ / "p/path_summary.csv");
  ASSERT_EQ(summary.size(), 52u);
  EXPECT_EQ(summary[0], (std::vector<std::string>{"lambda", "k", "loglik", "bic",
                                                  "selected"}));
  EXPECT_EQ(summary[1][0], "0");
  EXPECT_EQ(summary[1][1], "12");
  EXPECT_EQ(summary.back()[1], "1");
  int selected = 0;
  for (size_t r = 1; r < summary.size(); ++r) selected += summary[r][4] == "1";
  EXPECT_EQ(selected, 1);
  const auto traj = ReadCsv(dir_ / "p/path.csv");
  EXPECT_EQ(traj.size(), 1u + 51 * 12);
  // The dominant journal keeps group 0 along the whole path.
  for (size_t r = 1; r < traj.size(); ++r) {
    if (traj[r][1] == "J01") EXPECT_EQ(traj[r][3], "0");
  }
}

TEST_F(CliTest, PathWithExplicitLambdasAsJson) {
  ASSERT_EQ(Run({"--format", "json", "--out-dir", Out("p"), "path",
                 Data("matches_three.csv"), "--input-type", "matches",
                 "--lambdas", "0,0.5,1,100"}),
            kExitOk);
  const json path = ReadJson(dir_ / "p/path.json");
  ASSERT_EQ(path["path"].size(), 4u);
  EXPECT_EQ(path["path"][3]["k"], 1);
  EXPECT_EQ(Run({"--out-dir", Out("q"), "path", Data("matches_three.csv"),
                 "--input-type", "matches", "--lambdas", "1,0.5"}),
            kExitInputError);
}

TEST_F(CliTest, SimulateIsReproducible) {
  ASSERT_EQ(Run({"--out-dir", Out("s1"), "simulate", "--preset", "smoke"}),
            kExitOk);
  ASSERT_EQ(Run({"--threads", "2", "--out-dir", Out("s2"), "simulate",
                 "--preset", "smoke"}),
            kExitOk);
  for (const char* name : {"results.csv", "summary.csv", "failures.log",
                           "config.json"}) {
    EXPECT_EQ(Slurp(dir_ / "s1" / name), Slurp(dir_ / "s2" / name)) << name;
  }
  const json m1 = ReadJson(dir_ / "s1/manifest.json");
  const json m2 = ReadJson(dir_ / "s2/manifest.json");
  EXPECT_EQ(m1["config_hash"], m2["config_hash"]);
  EXPECT_EQ(m1["seed"], 1);

  // Replaying the recorded config reproduces the results.
  ASSERT_EQ(Run({"--out-dir", Out("s3"), "simulate", "--config",
                 Out("s1/config.json")}),
            kExitOk);
  EXPECT_EQ(Slurp(dir_ / "s1/results.csv"), Slurp(dir_ / "s3/results.csv"));

  ASSERT_EQ(Run({"--seed", "2", "--out-dir", Out("s4"), "simulate", "--preset",
                 "smoke"}),
            kExitOk);
  EXPECT_NE(Slurp(dir_ / "s1/results.csv"), Slurp(dir_ / "s4/results.csv"));
  EXPECT_EQ(ReadJson(dir_ / "s4/manifest.json")["seed"], 2);
}

TEST_F(CliTest, SimulateJsonFormat) {
  ASSERT_EQ(Run({"--format", "json", "--out-dir", Out("s"), "simulate",
                 "--preset", "smoke"}),
            kExitOk);
  const json summary = ReadJson(dir_ / "s/summary.json");
  EXPECT_EQ(summary["summary"].size(), 14u);
  EXPECT_EQ(ReadJson(dir_ / "s/results.json")["results"].size(), 28u);
}

TEST_F(CliTest, SimulateWhollyFailedCellExitsWithThree) {
  std::ofstream(dir_ / "cfg.json")
      << R"({"num_players": 30, "sample_sizes": [10], "replications": 2,
             "laws": ["lognormal"], "designs": ["RS"], "methods": ["MLE"]})";
  EXPECT_EQ(Run({"--out-dir", Out("f"), "simulate", "--config",
                 (dir_ / "cfg.json").string()}),
            kExitNumericalFailure);
  EXPECT_FALSE(Slurp(dir_ / "f/failures.log").empty());
  EXPECT_TRUE(fs::exists(dir_ / "f/manifest.json"));
}

TEST_F(CliTest, SimulateConfigErrors) {
  std::ofstream(dir_ / "bad.json") << R"({"replications": 0})";
  EXPECT_EQ(Run({"--out-dir", Out("x"), "simulate", "--config",
                 (dir_ / "bad.json").string()}),
            kExitInputError);
  std::ofstream(dir_ / "broken.json") << "{";
  EXPECT_EQ(Run({"--out-dir", Out("x"), "simulate", "--config",
                 (dir_ / "broken.json").string()}),
            kExitInputError);
  EXPECT_EQ(Run({"--out-dir", Out("x"), "simulate", "--preset", "smoke",
                 "--config", (dir_ / "bad.json").string()}),
            kExitInputError);
  EXPECT_EQ(Run({"--out-dir", Out("x"), "simulate", "--preset", "nope"}),
            kExitInputError);
  EXPECT_EQ(Run({"simulate", "--list-presets"}), kExitOk);
}

}  // namespace
}  // namespace btrank::cli
