// Copyright 2026 The PrivRec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privrec/experiment.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_split.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "privrec/instance_io.h"

namespace privrec {
namespace {

using ::testing::HasSubstr;
using ::testing::SizeIs;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult Execute(const ExperimentConfig& config) {
  std::ostringstream out, err;
  const int code = RunExperiment(config, out, err);
  return {code, out.str(), err.str()};
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

PeerFamilySpec SmallFamily() {
  PeerFamilySpec spec;
  spec.num_rounds = 6;
  spec.voters = 16;
  spec.peers = 12;
  spec.style = NonPeerStyle::kBlock;
  spec.client_seed = 5;
  spec.assignment_seed = 5;
  return spec;
}

std::vector<std::vector<std::string>> CsvRows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  for (absl::string_view line : absl::StrSplit(csv, '\n', absl::SkipEmpty())) {
    if (line[0] == '#') continue;
    rows.push_back(absl::StrSplit(line, ','));
  }
  return rows;
}

TEST(ExitCodeTest, UnknownModeIsUsage) {
  ExperimentConfig config;
  config.mode = "bogus";
  RunResult r = Execute(config);
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_THAT(r.err, HasSubstr("unknown --mode 'bogus'"));
}

TEST(ExitCodeTest, MissingInstanceIsUsage) {
  ExperimentConfig config;
  config.mode = "loss";
  EXPECT_EQ(Execute(config).code, kExitUsage);
}

TEST(ExitCodeTest, EnumerationCapIsReported) {
  ExperimentConfig config;
  config.mode = "loss";
  config.generator = SmallFamily();
  config.cap = 10;
  RunResult r = Execute(config);
  EXPECT_EQ(r.code, kExitCap);
  EXPECT_THAT(r.err, HasSubstr("cap"));
}

TEST(ExitCodeTest, StrictTurnsWarningsIntoInvariantFailures) {
  ExperimentConfig config;
  config.mode = "leakage";
  config.generator = SmallFamily();
  config.generator->peers = 4;  // P < 6m: the epsilon bound only warns
  EXPECT_EQ(Execute(config).code, kExitOk);
  config.strict = true;
  EXPECT_EQ(Execute(config).code, kExitInvariant);
}

TEST(ExitCodeTest, MalformedInstanceNamesTheField) {
  const std::string path = TempPath("privrec_bad_instance.json");
  {
    std::ofstream f(path);
    f << R"({"T": 2, "m": 2, "likes": [[0], [1]], "R": 0, "D": 0, "P": 1,
            "n": 1, "voters": [{"id": "v0", "votes": [0, "x"]}]})";
  }
  ExperimentConfig config;
  config.mode = "loss";
  config.instance_path = path;
  RunResult r = Execute(config);
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_THAT(r.err, HasSubstr("voters[0].votes"));
  std::remove(path.c_str());
}

TEST(ExitCodeTest, InvalidInstanceIsRejected) {
  Instance instance = *BuildPeerFamilyInstance(SmallFamily());
  instance.peers = 20;
  const std::string path = TempPath("privrec_invalid_instance.json");
  ASSERT_TRUE(WriteJsonFile(path, InstanceToJson(instance)).ok());
  ExperimentConfig config;
  config.mode = "leakage";
  config.instance_path = path;
  RunResult r = Execute(config);
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_THAT(r.err, HasSubstr("peer count"));
  std::remove(path.c_str());
}

ExperimentConfig SweepConfig() {
  ExperimentConfig config;
  config.mode = "sweep";
  config.timestamp = false;
  config.algorithm = "p-rec-sim";
  config.seed = 3;
  config.grid.rounds = {6};
  config.grid.peers = {12, 14, 16};
  config.grid.voters = {20};
  return config;
}

TEST(SweepTest, ByteIdenticalWithoutTimestamp) {
  RunResult a = Execute(SweepConfig());
  RunResult b = Execute(SweepConfig());
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.substr(0, SweepCsvHeader().size()), SweepCsvHeader());
}

TEST(SweepTest, TimestampLineComesFirst) {
  ExperimentConfig config = SweepConfig();
  config.timestamp = true;
  RunResult r = Execute(config);
  EXPECT_EQ(r.out.rfind("# generated ", 0), 0u);
}

TEST(SweepTest, RowsParseBackAndBoundShrinksWithPeers) {
  RunResult r = Execute(SweepConfig());
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::vector<std::vector<std::string>> rows = CsvRows(r.out);
  ASSERT_THAT(rows, SizeIs(4));
  const size_t columns = rows[0].size();
  EXPECT_EQ(columns, 13u);
  double previous_bound = 1e300;
  for (size_t i = 1; i < rows.size(); ++i) {
    ASSERT_THAT(rows[i], SizeIs(columns));
    EXPECT_EQ(rows[i][0], "1");
    EXPECT_EQ(rows[i][7], "p-rec-sim");
    EXPECT_EQ(rows[i][8], "exact");
    const double max_abs = std::stod(rows[i][11]);
    const double bound = std::stod(rows[i][12]);
    EXPECT_LE(max_abs, bound);
    EXPECT_LE(bound, previous_bound);
    previous_bound = bound;
  }
}

TEST(SweepTest, SingleCellMatchesSingleRuns) {
  ExperimentConfig sweep = SweepConfig();
  sweep.grid.peers = {12};
  RunResult s = Execute(sweep);
  ASSERT_EQ(s.code, kExitOk) << s.err;
  std::vector<std::vector<std::string>> rows = CsvRows(s.out);
  ASSERT_THAT(rows, SizeIs(2));

  PeerFamilySpec spec;
  spec.num_rounds = 6;
  spec.peers = 12;
  spec.voters = 20;
  spec.style = NonPeerStyle::kBlock;
  spec.client_seed = 3;
  spec.assignment_seed = 3;
  ExperimentConfig single;
  single.algorithm = "p-rec-sim";
  single.generator = spec;
  single.num_seeds = 10;
  single.mode = "leakage";
  RunResult leakage = Execute(single);
  ASSERT_EQ(leakage.code, kExitOk) << leakage.err;
  single.mode = "loss";
  RunResult loss = Execute(single);
  ASSERT_EQ(loss.code, kExitOk) << loss.err;

  const nlohmann::json lj = nlohmann::json::parse(leakage.out);
  const nlohmann::json sj = nlohmann::json::parse(loss.out);
  EXPECT_DOUBLE_EQ(std::stod(rows[1][11]), lj["max_abs_E"].get<double>());
  EXPECT_DOUBLE_EQ(std::stod(rows[1][9]),
                   sj["exact"]["expected_loss"].get<double>());
}

TEST(ConfigTest, ReadsKnownKeysAndRejectsUnknown) {
  nlohmann::json doc = {{"mode", "sweep"},
                        {"seed", 9},
                        {"no_timestamp", true},
                        {"grid", {{"T", {4, 6}}, {"style", "random"}}}};
  ExperimentConfig c = *ConfigFromJson(doc);
  EXPECT_EQ(c.mode, "sweep");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_FALSE(c.timestamp);
  EXPECT_EQ(c.grid.rounds, (std::vector<int>{4, 6}));
  EXPECT_EQ(c.grid.style, NonPeerStyle::kRandom);
  absl::StatusOr<ExperimentConfig> bad =
      ConfigFromJson({{"mode", "sweep"}, {"epsilon", 1}});
  ASSERT_FALSE(bad.ok());
  EXPECT_THAT(bad.status().message(), HasSubstr("epsilon"));
}

TEST(LemmaSuiteTest, SmallSweepIsClean) {
  LemmaSweepReport r = SweepPhiLemmas({4 * std::log(8.0), 0.25}, 2000, 1);
  EXPECT_EQ(r.trials, 2000);
  EXPECT_EQ(r.total_violations(), 0);
  ExperimentConfig config;
  config.mode = "lemma-suite";
  config.lemma_trials = 500;
  RunResult run = Execute(config);
  EXPECT_EQ(run.code, kExitOk) << run.err;
}

TEST(AdversaryDemoTest, RunsAndReportsCases) {
  ExperimentConfig config;
  config.mode = "adversary-demo";
  config.algorithm = "follow-majority";
  config.adversary.num_rounds = 8;
  config.adversary.diversity = 2;
  config.adversary.radius = 1;
  config.adversary.paths = 50;
  RunResult r = Execute(config);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_THAT(r.out, HasSubstr("2.b"));
}

}  // namespace
}  // namespace privrec
