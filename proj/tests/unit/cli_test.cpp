// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "zp3/cloud_io.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using zp3test::file_bytes;

zp3test::CommandResult zp3(const std::vector<std::string>& args) {
  return zp3test::run_command(ZP3_CLI, args);
}

constexpr const char* kSmallConfig = R"({
  "seed": 1,
  "schedule": {"steps": 5},
  "sampler": {"width": 24, "height": 24},
  "plan": {"iterations": 1, "batch_size": 2, "elevations": [0]},
  "init": {"points": 120, "steps": 40},
  "refine": {"steps_per_iteration": 10, "densify_from": 2, "densify_until": 6,
             "densify_interval": 2}
})";

// One synthetic dataset and coarse checkpoint shared by every test.
class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new std::string(zp3test::scratch_dir("cli"));
    write(config(), kSmallConfig);
    const auto s = zp3({"synth", "--out", path("scene"), "--width", "24", "--height", "24",
                        "--gaussians", "150"});
    ASSERT_EQ(s.exit_code, 0) << s.output;
    const auto i = zp3({"init", "--config", config(), "--data", path("scene/train"), "--out",
                        path("coarse.zp3g")});
    ASSERT_EQ(i.exit_code, 0) << i.output;
  }
  static void TearDownTestSuite() { delete root_; }

  static std::string path(const std::string& rel) { return *root_ + "/" + rel; }
  static std::string config() { return path("small.json"); }
  static std::string data() { return path("scene/train"); }
  static void write(const std::string& file, const std::string& text) {
    std::ofstream(file) << text;
  }

  static std::string* root_;
};

std::string* Cli::root_ = nullptr;

TEST_F(Cli, SynthWritesTheDatasetLayout) {
  for (const char* rel : {"scene/gt.zp3g", "scene/train/poses.json", "scene/train/meta.json",
                          "scene/test/poses.json", "scene/train/images/train_a000_e+00.png",
                          "scene/train/masks/train_a000_e+00.png"}) {
    EXPECT_TRUE(fs::exists(path(rel))) << rel;
  }
  EXPECT_FALSE(fs::exists(path("scene/.zp3.lock")));
  const auto again = zp3({"synth", "--out", path("scene2"), "--width", "24", "--height", "24",
                          "--gaussians", "150"});
  ASSERT_EQ(again.exit_code, 0);
  EXPECT_EQ(file_bytes(path("scene/gt.zp3g")), file_bytes(path("scene2/gt.zp3g")));
  EXPECT_EQ(file_bytes(path("scene/train/images/train_a000_e+30.png")),
            file_bytes(path("scene2/train/images/train_a000_e+30.png")));
}

TEST_F(Cli, InitIsDeterministicAndLogsLosses) {
  const auto r = zp3({"init", "--config", config(), "--data", data(), "--out",
                      path("coarse_again.zp3g")});
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(file_bytes(path("coarse.zp3g")), file_bytes(path("coarse_again.zp3g")));
  const auto log = nlohmann::json::parse(file_bytes(path("coarse.zp3g.log.json")));
  EXPECT_EQ(log["losses"].size(), 40u);
  EXPECT_EQ(log["seed"], 1);
  const auto other = zp3({"init", "--config", config(), "--seed", "2", "--data", data(),
                          "--out", path("coarse_seed2.zp3g")});
  ASSERT_EQ(other.exit_code, 0);
  EXPECT_NE(file_bytes(path("coarse.zp3g")), file_bytes(path("coarse_seed2.zp3g")));
}

TEST_F(Cli, SampleWritesImageAndWeightSchedule) {
  for (const char* name : {"s1.png", "s2.png"}) {
    const auto r = zp3({"sample", "--config", config(), "--checkpoint", path("coarse.zp3g"),
                        "--data", data(), "--view", "180,0", "--out", path(name)});
    ASSERT_EQ(r.exit_code, 0) << r.output;
  }
  EXPECT_EQ(file_bytes(path("s1.png")), file_bytes(path("s2.png")));
  const auto side = nlohmann::json::parse(file_bytes(path("s1.png.json")));
  EXPECT_EQ(side["weights"].size(), 5u);
  EXPECT_EQ(side["steps"].size(), 4u);
  EXPECT_EQ(side["view"]["azimuth"], 180.0);
}

TEST_F(Cli, RefineEvalAndRender) {
  const auto r = zp3({"refine", "--config", config(), "--checkpoint", path("coarse.zp3g"),
                      "--data", data(), "--out", path("refined"), "--eval",
                      path("scene/test")});
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(path("refined/batch_000.zp3g")));
  EXPECT_TRUE(fs::exists(path("refined/supervision/batch_000_view_01.png")));
  const auto history = nlohmann::json::parse(file_bytes(path("refined/history.json")));
  ASSERT_EQ(history.size(), 1u);
  EXPECT_TRUE(history[0].contains("invisible_psnr"));
  EXPECT_EQ(file_bytes(path("refined/final.zp3g")), file_bytes(path("refined/batch_000.zp3g")));

  // Resuming a finished run changes nothing.
  const auto again = zp3({"refine", "--config", config(), "--checkpoint", path("coarse.zp3g"),
                          "--data", data(), "--out", path("refined"), "--resume"});
  ASSERT_EQ(again.exit_code, 0) << again.output;
  EXPECT_NE(again.output.find("resuming at batch 1 of 1"), std::string::npos);

  const auto ev = zp3({"eval", "--checkpoint", path("refined/final.zp3g"), "--data",
                       path("scene/test"), "--out", path("report.csv")});
  ASSERT_EQ(ev.exit_code, 0) << ev.output;
  EXPECT_NE(ev.output.find("invisible"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("report.txt")));
  const std::string csv = file_bytes(path("report.csv"));
  const auto test_views = std::distance(fs::directory_iterator(path("scene/test/images")),
                                        fs::directory_iterator{});
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + test_views + 3);

  const auto rn = zp3({"render", "--checkpoint", path("refined/final.zp3g"), "--out",
                       path("frames"), "--frames", "4", "--data", data()});
  ASSERT_EQ(rn.exit_code, 0) << rn.output;
  for (int i = 0; i < 4; ++i) {
    EXPECT_TRUE(fs::exists(path("frames/00" + std::to_string(i) + ".png")));
  }
  EXPECT_FALSE(fs::exists(path("frames/004.png")));
}

TEST_F(Cli, ZeroIterationsLeaveTheCheckpointUnchanged) {
  write(path("zero.json"), R"({"plan": {"iterations": 0}, "refine": {"steps_per_iteration": 10,
      "densify_from": 2, "densify_until": 6}})");
  const auto r = zp3({"refine", "--config", path("zero.json"), "--checkpoint",
                      path("coarse.zp3g"), "--data", data(), "--out", path("zero")});
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_EQ(file_bytes(path("zero/final.zp3g")), file_bytes(path("coarse.zp3g")));
}

TEST_F(Cli, UsageAndDataErrorsExitWithTwo) {
  EXPECT_EQ(zp3({}).exit_code, 2);
  EXPECT_EQ(zp3({"frobnicate"}).exit_code, 2);
  EXPECT_EQ(zp3({"init", "--data", data()}).exit_code, 2);
  EXPECT_EQ(zp3({"init", "--data", path("nowhere"), "--out", path("x.zp3g")}).exit_code, 2);
  EXPECT_EQ(zp3({"sample", "--checkpoint", path("coarse.zp3g"), "--data", data(), "--view",
                 "north", "--out", path("x.png")})
                .exit_code,
            2);
  EXPECT_EQ(zp3({"eval", "--checkpoint", path("missing.zp3g"), "--data", data()}).exit_code, 2);
  write(path("typo.json"), R"({"seeds": 3})");
  const auto typo = zp3({"config", "--check", path("typo.json")});
  EXPECT_EQ(typo.exit_code, 2);
  EXPECT_NE(typo.output.find("seeds"), std::string::npos);
  EXPECT_EQ(zp3({"config", "--dump-defaults"}).exit_code, 0);
  EXPECT_EQ(zp3({"--help"}).exit_code, 0);
}

TEST_F(Cli, OptimizationFailureExitsWithThree) {
  // Every Gaussian falls below this opacity at the first prune.
  write(path("prune_all.json"), R"({"schedule": {"steps": 5},
    "sampler": {"width": 24, "height": 24},
    "plan": {"iterations": 1, "batch_size": 2, "elevations": [0]},
    "refine": {"steps_per_iteration": 10, "densify_from": 2, "densify_until": 6,
               "densify_interval": 2, "prune_opacity": 0.999}})");
  const auto r = zp3({"refine", "--config", path("prune_all.json"), "--checkpoint",
                      path("coarse.zp3g"), "--data", data(), "--out", path("prune_run")});
  EXPECT_EQ(r.exit_code, 3) << r.output;
  EXPECT_NE(r.output.find("pruning removed every Gaussian"), std::string::npos);

  // A corrupt checkpoint is a data error, not a divergence.
  auto cloud = zp3::read_cloud(path("coarse.zp3g"));
  for (auto& g : cloud.gaussians) g.sh[0] = zp3::Vec3::Constant(NAN);
  zp3::write_cloud(path("nan.zp3g"), cloud);
  const auto nan = zp3({"refine", "--config", config(), "--checkpoint", path("nan.zp3g"),
                        "--data", data(), "--out", path("nan_run")});
  EXPECT_EQ(nan.exit_code, 2) << nan.output;
}

TEST_F(Cli, BridgeFailuresExitWithFour) {
  for (const char* mode : {"status", "bad-dims", "hang"}) {
    write(path("bridge.json"), std::string(R"({"schedule": {"steps": 5},
      "sampler": {"width": 24, "height": 24},
      "priors": {"mvd": "bridge"},
      "bridge": {"enabled": true, "timeout": 0.5, "executable": ")") +
                                   ZP3_ECHO_BACKEND + R"(", "args": [")" + mode + R"("]}})");
    const auto r = zp3({"sample", "--config", path("bridge.json"), "--checkpoint",
                        path("coarse.zp3g"), "--data", data(), "--view", "90,0", "--out",
                        path("b.png")});
    EXPECT_EQ(r.exit_code, 4) << mode << "\n" << r.output;
  }
}

TEST_F(Cli, LockedOutputDirectoryIsRefused) {
  fs::create_directories(path("locked"));
  write(path("locked/.zp3.lock"), "12345\n");
  const auto r = zp3({"render", "--checkpoint", path("coarse.zp3g"), "--out", path("locked"),
                      "--frames", "1"});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.output.find("locked"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("locked/000.png")));
}

}  // namespace
