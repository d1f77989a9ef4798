// Copyright 2026 The maskloc Authors
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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "maskloc/dump.hpp"
#include "maskloc/eval.hpp"

namespace maskloc {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("maskloc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  fs::path write_config(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

constexpr const char* kSmallBatch =
    "[array]\nnum_mics = 4\nradius = 0.2\n"
    "[scene]\nazimuths = 0, 90\nsnr_db = 10\nduration_s = 1.5\nlead_silence_s = 0.25\ntrail_silence_s = 0.25\n"
    "wireless_delay_samples = 300\n";
constexpr const char* kSmallPipeline = "[array]\nnum_mics = 4\nradius = 0.2\n";

TEST_F(Cli, SimulateSweepWritesScenesAndTruth) {
  const auto cfg = write_config("batch.ini", "[scene]\nazimuths = sweep\nsnr_db = 5\nduration_s = 1\n"
                                             "lead_silence_s = 0.1\ntrail_silence_s = 0.1\n");
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "out").string()}), cli::kExitOk) << err_.str();
  const auto truth = read_truth_csv(dir_ / "out" / kTruthFile);
  ASSERT_EQ(truth.size(), 16u);
  int wavs = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "out")) wavs += e.path().extension() == ".wav";
  EXPECT_EQ(wavs, 32);
  EXPECT_EQ(truth[3].truth_azimuth_deg, 67.5);
}

TEST_F(Cli, SimulateIsDeterministicAndSeedSensitive) {
  const auto cfg = write_config("batch.ini", kSmallBatch);
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "a").string(), "--seed", "7"}), 0);
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "b").string(), "--seed", "7"}), 0);
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "c").string(), "--seed", "8"}), 0);
  for (const auto* f : {"scene_0000_array.wav", "scene_0001_close.wav", "truth.csv"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  EXPECT_NE(slurp(dir_ / "a" / "scene_0000_array.wav"), slurp(dir_ / "c" / "scene_0000_array.wav"));
}

TEST_F(Cli, EmptyBatchIsAnError) {
  const auto cfg = write_config("batch.ini", "[scene]\nseeds = 0\n");
  EXPECT_NE(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "out").string()}), 0);
  EXPECT_FALSE(err_.str().empty());
}

TEST_F(Cli, LocalizeMaskDumpAndEvaluate) {
  const auto batch = write_config("batch.ini", kSmallBatch);
  const auto pipe = write_config("pipe.ini", kSmallPipeline);
  ASSERT_EQ(run({"simulate", "--config", batch.string(), "--out", (dir_ / "s").string()}), 0);
  const std::string array = (dir_ / "s" / "scene_0001_array.wav").string();
  const std::string close = (dir_ / "s" / "scene_0001_close.wav").string();

  ASSERT_EQ(run({"localize", array, close, "--config", pipe.string(), "--mask", "irm-star", "--dump-mask",
                 (dir_ / "m.bin").string(), "--dump-powermap", (dir_ / "p.csv").string()}),
            0)
      << err_.str();
  EXPECT_NE(out_.str().find("azimuth_deg"), std::string::npos);
  EXPECT_NE(out_.str().find("frame_delay"), std::string::npos);
  EXPECT_GT(read_matrix_dump(dir_ / "m.bin").size(), 0);
  EXPECT_TRUE(fs::exists(dir_ / "p.csv"));

  ASSERT_EQ(run({"mask-dump", array, close, "--config", pipe.string(), "--out", (dir_ / "d.bin").string()}), 0);
  EXPECT_EQ(read_matrix_dump(dir_ / "d.bin"), read_matrix_dump(dir_ / "m.bin"));

  ASSERT_EQ(run({"evaluate", (dir_ / "s").string(), "--config", pipe.string(), "--out", (dir_ / "r1.csv").string()}),
            0)
      << err_.str();
  ASSERT_EQ(run({"evaluate", (dir_ / "s").string(), "--config", pipe.string(), "--jobs", "2", "--out",
                 (dir_ / "r2.csv").string()}),
            0);
  const std::string report = slurp(dir_ / "r1.csv");
  EXPECT_EQ(report, slurp(dir_ / "r2.csv"));
  EXPECT_EQ(report.substr(0, report.find('\n')), "condition,mask,avg_error_deg,acc5_pct,n");
  EXPECT_NE(report.find("10,irm-star,"), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({}), cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}), cli::kExitUsage);
  EXPECT_EQ(run({"localize", "only-one.wav"}), cli::kExitUsage);
  EXPECT_EQ(run({"localize", (dir_ / "a.wav").string(), (dir_ / "b.wav").string()}), cli::kExitData);
  EXPECT_NE(err_.str().find("a.wav"), std::string::npos);
  EXPECT_EQ(run({"evaluate", dir_.string()}), cli::kExitData);
  const auto bad = write_config("bad.ini", "[pipeline]\nnonsense = 1\n");
  EXPECT_EQ(run({"evaluate", dir_.string(), "--config", bad.string()}), cli::kExitData);
  EXPECT_EQ(run({"--help"}), cli::kExitOk);
}

TEST_F(Cli, ChannelMismatchNamesExpectedCount) {
  const auto batch = write_config("batch.ini", kSmallBatch);
  ASSERT_EQ(run({"simulate", "--config", batch.string(), "--out", (dir_ / "s").string()}), 0);
  EXPECT_EQ(run({"localize", (dir_ / "s" / "scene_0000_array.wav").string(),
                 (dir_ / "s" / "scene_0000_close.wav").string()}),
            cli::kExitData);
  EXPECT_NE(err_.str().find("16"), std::string::npos);
}

}  // namespace
}  // namespace maskloc
