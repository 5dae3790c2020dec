/*
 * Copyright 2026 The mapmix Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli_util.hpp"
#include "gtest/gtest.h"
#include "json.hpp"
#include "mapmix/cli/experiment.hpp"
#include "mapmix/error.hpp"
#include "test_util.hpp"

namespace mapmix::cli {
namespace {

namespace fs = std::filesystem;
using testing::ReadFile;
using testing::RunCli;
using testing::WriteFile;

const char* kSmallConfig = R"({
  "synth": {"dim": 8, "train_per_dialect": 10, "eval_per_dialect": 3,
            "frames_min": 10, "frames_max": 40},
  "epochs": 3, "learning_rate": 0.01, "hours_per_dialect": 1000, "n_subsets": 1
})";

std::vector<std::vector<std::string>> ReadCsv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(ReadFile(path));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// One synthetic corpus shared by the whole suite.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("cli");
    WriteFile(*dir_ / "cfg.json", kSmallConfig);
    ASSERT_EQ(Run("synth --config " + Path("cfg.json") + " --seed 3 --out " + Path("corpus")), 0);
  }
  static void TearDownTestSuite() { delete dir_; }

  static std::string Path(const std::string& name) { return (*dir_ / name).string(); }
  static int Run(const std::string& args) { return RunCli(args, *dir_ / "log.txt"); }
  static std::string Log() { return ReadFile(*dir_ / "log.txt"); }
  static std::string Common() { return "--config " + Path("cfg.json") + " --corpus " + Path("corpus"); }

  static testing::TempDir* dir_;
};
testing::TempDir* CliTest::dir_ = nullptr;

TEST_F(CliTest, SynthWritesCorpusDirectory) {
  for (const char* f : {"manifest.jsonl", "frames.bin", "taxonomy.json", "corpus.json", "noised_ids.txt"}) {
    EXPECT_TRUE(fs::exists(*dir_ / "corpus" / f)) << f;
  }
  const auto tax = nlohmann::ordered_json::parse(ReadFile(*dir_ / "corpus" / "taxonomy.json"));
  EXPECT_EQ(tax.size(), 14u);
  std::istringstream noised(ReadFile(*dir_ / "corpus" / "noised_ids.txt"));
  std::size_t lines = 0;
  for (std::string line; std::getline(noised, line);) ++lines;
  EXPECT_EQ(lines, 28u);  // round(0.2 * 140)
}

TEST_F(CliTest, SynthRepeatIsByteIdentical) {
  ASSERT_EQ(Run("synth --config " + Path("cfg.json") + " --seed 3 --out " + Path("corpus2")), 0);
  for (const char* f : {"manifest.jsonl", "frames.bin", "taxonomy.json", "noised_ids.txt"}) {
    EXPECT_EQ(ReadFile(*dir_ / "corpus" / f), ReadFile(*dir_ / "corpus2" / f)) << f;
  }
}

TEST_F(CliTest, InvalidConfigExitsTwo) {
  WriteFile(*dir_ / "bad.json", R"({"synth": {"dialect_sep": 9}})");
  EXPECT_EQ(Run("synth --config " + Path("bad.json") + " --out " + Path("bad")), 2);
  EXPECT_NE(Log().find("config"), std::string::npos);
  WriteFile(*dir_ / "unknown.json", R"({"epoch": 3})");
  EXPECT_EQ(Run("synth --config " + Path("unknown.json") + " --out " + Path("bad")), 2);
  EXPECT_EQ(Run("train " + Common() + " --strategy mixmix --out " + Path("bad")), 2);
  EXPECT_EQ(Run("frobnicate"), 2);
  EXPECT_EQ(Run(""), 2);
}

TEST_F(CliTest, MapWritesOneRowPerTrainUtterance) {
  ASSERT_EQ(Run("map " + Common() + " --out " + Path("map")), 0) << Log();
  const auto rows = ReadCsv(*dir_ / "map" / "datamap.csv");
  ASSERT_EQ(rows.size(), 141u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"id", "confidence", "variability", "region"}));
  std::size_t easy = 0, amb = 0, hard = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    easy += rows[r][3] == "easy";
    amb += rows[r][3] == "ambiguous";
    hard += rows[r][3] == "hard";
  }
  EXPECT_EQ(easy + amb + hard, 140u);
}

TEST_F(CliTest, SingleEpochMapHasZeroVariability) {
  ASSERT_EQ(Run("map " + Common() + " --epochs 1 --out " + Path("map1")), 0) << Log();
  const auto rows = ReadCsv(*dir_ / "map1" / "datamap.csv");
  for (std::size_t r = 1; r < rows.size(); ++r) EXPECT_EQ(std::stod(rows[r][2]), 0.0);
}

TEST_F(CliTest, RegionStrategyNeedsDatamap) {
  EXPECT_EQ(Run("train " + Common() + " --strategy map_mix --out " + Path("t_mm")), 2);
  EXPECT_NE(Log().find("datamap"), std::string::npos);
  EXPECT_EQ(Run("train " + Common() + " --strategy static --out " + Path("t_static")), 0) << Log();
  EXPECT_TRUE(fs::exists(*dir_ / "t_static" / "checkpoint.json"));
}

TEST_F(CliTest, TrainRerunIsByteIdentical) {
  ASSERT_EQ(Run("map " + Common() + " --out " + Path("map_det")), 0);
  const std::string args = "train " + Common() + " --strategy map_mix --datamap " +
                           Path("map_det/datamap.csv") + " --out ";
  ASSERT_EQ(Run(args + Path("det_a")), 0) << Log();
  ASSERT_EQ(Run(args + Path("det_b")), 0) << Log();
  for (const char* f : {"checkpoint.json", "dynamics.csv", "loss_curve.csv"}) {
    EXPECT_EQ(ReadFile(*dir_ / "det_a" / f), ReadFile(*dir_ / "det_b" / f)) << f;
  }
}

TEST_F(CliTest, EvalReport) {
  ASSERT_EQ(Run("train " + Common() + " --strategy random --out " + Path("t_rand")), 0) << Log();
  ASSERT_EQ(Run("eval " + Common() + " --checkpoint " + Path("t_rand/checkpoint.json") +
                " --out " + Path("ev")),
            0)
      << Log();
  const auto report = nlohmann::json::parse(ReadFile(*dir_ / "ev" / "report.json"));
  for (const char* key : {"acc", "wf1", "cluster_acc", "ece", "n"}) EXPECT_TRUE(report.contains(key));
  EXPECT_GE(report["cluster_acc"].get<double>(), report["acc"].get<double>());
  EXPECT_EQ(report["n"].get<int>(), 42);
  const auto rows = ReadCsv(*dir_ / "ev" / "confusion.csv");
  ASSERT_EQ(rows.size(), 15u);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    int sum = 0;
    for (std::size_t c = 1; c < rows[r].size(); ++c) sum += std::stoi(rows[r][c]);
    EXPECT_EQ(sum, 3) << rows[r][0];
  }
}

TEST_F(CliTest, EvalDimensionMismatchIsSchemaError) {
  ASSERT_EQ(Run("train " + Common() + " --out " + Path("t_none")), 0) << Log();
  WriteFile(*dir_ / "wide.json", R"({"synth": {"dim": 9, "train_per_dialect": 2,
      "eval_per_dialect": 1, "frames_min": 4, "frames_max": 8}})");
  ASSERT_EQ(Run("synth --config " + Path("wide.json") + " --out " + Path("wide")), 0);
  EXPECT_EQ(Run("eval --corpus " + Path("wide") + " --checkpoint " +
                Path("t_none/checkpoint.json") + " --out " + Path("ev_bad")),
            3);
  EXPECT_NE(Log().find("schema"), std::string::npos);
}

TEST_F(CliTest, CorruptFramesExitThree) {
  fs::copy(*dir_ / "corpus", *dir_ / "broken", fs::copy_options::recursive);
  fs::resize_file(*dir_ / "broken" / "frames.bin", 100);
  EXPECT_EQ(Run("map --config " + Path("cfg.json") + " --corpus " + Path("broken") + " --out " +
                Path("map_broken")),
            3);
}

TEST_F(CliTest, DivergenceExitsFour) {
  WriteFile(*dir_ / "huge.json", R"({"learning_rate": 1e300, "epochs": 2})");
  EXPECT_EQ(Run("train --config " + Path("huge.json") + " --corpus " + Path("corpus") +
                " --out " + Path("t_huge")),
            4);
}

TEST_F(CliTest, CompareTable) {
  ASSERT_EQ(Run("compare " + Common() + " --out " + Path("cmp")), 0) << Log();
  const auto rows = ReadCsv(*dir_ / "cmp" / "compare.csv");
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"strategy", "Acc", "WF1", "C.Acc", "ECE"}));
  const std::vector<std::string> order = {"none", "static", "random", "within_cluster",
                                          "across_cluster", "easy", "hard", "amb_easy", "map_mix"};
  const auto runs = ReadCsv(*dir_ / "cmp" / "runs.csv");
  ASSERT_EQ(runs.size(), 10u);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    EXPECT_EQ(rows[r][0], order[r - 1]);
    // One subset: the mean is the single run.
    EXPECT_EQ(runs[r][0], rows[r][0]);
    for (std::size_t c = 1; c < 5; ++c) EXPECT_EQ(runs[r][c + 1], rows[r][c]);
  }
  EXPECT_TRUE(fs::exists(*dir_ / "cmp" / "compare.txt"));
}

TEST_F(CliTest, CompareRerunIsByteIdentical) {
  WriteFile(*dir_ / "cmp3.json", R"({
    "synth": {"dim": 8}, "epochs": 2, "learning_rate": 0.01, "hours_per_dialect": 0.02,
    "seeds": [4, 9], "strategies": ["none", "static", "map_mix"]})");
  const std::string args = "compare --config " + Path("cmp3.json") + " --corpus " + Path("corpus") + " --out ";
  ASSERT_EQ(Run(args + Path("cmp_a")), 0) << Log();
  ASSERT_EQ(Run(args + Path("cmp_b")), 0) << Log();
  for (const char* f : {"compare.csv", "compare.txt", "runs.csv", "datamap_seed4.csv", "datamap_seed9.csv"}) {
    EXPECT_EQ(ReadFile(*dir_ / "cmp_a" / f), ReadFile(*dir_ / "cmp_b" / f)) << f;
  }
  EXPECT_EQ(ReadCsv(*dir_ / "cmp_a" / "runs.csv").size(), 7u);
}

TEST(ExperimentConfig, FlatAndNestedKeys) {
  ExperimentConfig c = DefaultConfig();
  ApplyJson(R"({"epochs": 7, "strategy": "hard", "seeds": [1, 2],
               "synth": {"label_noise_frac": 0.1, "dim": 10}})", c);
  EXPECT_EQ(c.train.epochs, 7u);
  EXPECT_EQ(c.train.strategy, augment::Strategy::kHard);
  EXPECT_EQ(c.synth.label_noise_frac, 0.1);
  EXPECT_EQ(c.synth.dim, 10u);
  EXPECT_EQ(ResolveSeeds(c), (std::vector<std::uint64_t>{1, 2}));
  c.n_subsets = 3;
  EXPECT_THROW(ResolveSeeds(c), Error);
  EXPECT_THROW(ApplyJson("[1]", c), Error);
  EXPECT_THROW(ApplyJson(R"({"epochs": "many"})", c), Error);
}

TEST(ExperimentConfig, DefaultSeedsFollowBaseSeed) {
  ExperimentConfig c = DefaultConfig();
  c.train.seed = 10;
  EXPECT_EQ(ResolveSeeds(c), (std::vector<std::uint64_t>{10, 11, 12}));
}

}  // namespace
}  // namespace mapmix::cli
