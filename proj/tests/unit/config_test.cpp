// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3app/config.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "zp3/error.hpp"
#include "test_support.hpp"

namespace {

using zp3app::config_from_json;

TEST(Config, DefaultsRoundTrip) {
  const zp3app::RunConfig def;
  zp3app::validate(def);
  const std::string text = zp3app::to_json(def);
  const auto back = config_from_json(text);
  EXPECT_EQ(zp3app::to_json(back), text);
  EXPECT_EQ(zp3app::to_json(config_from_json("{}")), text);
}

TEST(Config, NonDefaultValuesSurviveSerialization) {
  const auto c = config_from_json(R"({
    "seed": 17,
    "schedule": {"kind": "cosine", "steps": 20},
    "plan": {"elevations": [0], "strategy": "monotone", "iterations": 3},
    "refine": {"steps_per_iteration": 50, "densify_until": 40, "lambda": 0.5,
               "background": [0, 0, 0], "lr": {"opacity": 0.01}},
    "priors": {"hf": "sharpen", "conditioning_views": 2}
  })");
  EXPECT_EQ(c.seed, 17u);
  EXPECT_EQ(c.schedule_kind, zp3::ScheduleKind::kCosine);
  EXPECT_EQ(c.schedule_steps, 20);
  EXPECT_EQ(c.plan.strategy, zp3::PlanStrategy::kMonotone);
  EXPECT_EQ(c.plan.elevations, std::vector<double>{0.0});
  EXPECT_EQ(c.steps_per_iteration, 50);
  EXPECT_EQ(c.train.densify_until, 40);
  EXPECT_EQ(c.lambda, 0.5);
  EXPECT_EQ(c.train.background, zp3::Vec3::Zero());
  EXPECT_EQ(c.priors.pose.background, zp3::Vec3::Zero());
  EXPECT_EQ(c.train.lr.opacity, 0.01);
  EXPECT_EQ(c.priors.hf, "sharpen");
  EXPECT_EQ(c.priors.conditioning_views, 2);
  const auto again = config_from_json(zp3app::to_json(c));
  EXPECT_EQ(zp3app::to_json(again), zp3app::to_json(c));
  EXPECT_EQ(zp3app::make_schedule(c).steps, 20);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  const char* bad[] = {
      R"({"sed": 1})",
      R"({"plan": {"iteration": 2}})",
      R"({"seed": "one"})",
      R"({"schedule": {"steps": 1}})",
      R"({"schedule": {"kind": "quadratic"}})",
      R"({"plan": {"elevations": []}})",
      R"({"plan": {"elevations": [100]}})",
      R"({"plan": {"strategy": "random"}})",
      R"({"refine": {"steps_per_iteration": 10, "densify_until": 20}})",
      R"({"refine": {"lambda": -1}})",
      R"({"refine": {"background": [1, 1]}})",
      R"({"priors": {"mvd": "magic"}})",
      R"({"priors": {"conditioning_views": 4}})",
      R"({"priors": {"mvd": "bridge"}})",
      R"({"sampler": {"far_field_factor": 0.5}})",
      R"({"bridge": {"enabled": true}})",
      R"([1, 2])",
      R"({"seed": )",
  };
  for (const char* text : bad) {
    EXPECT_THROW(config_from_json(text), zp3::InvalidArgument) << text;
  }
}

TEST(Config, BridgeSection) {
  const auto c = config_from_json(R"({
    "priors": {"mvd": "bridge"},
    "bridge": {"enabled": true, "executable": "/bin/true", "args": ["a"], "timeout": 2.5}
  })");
  EXPECT_TRUE(c.bridge_enabled);
  EXPECT_EQ(c.bridge.args, std::vector<std::string>{"a"});
  EXPECT_EQ(c.bridge.timeout_seconds, 2.5);
}

TEST(Config, LoadFromFile) {
  const std::string dir = zp3test::scratch_dir("config");
  std::ofstream(dir + "/c.json") << R"({"seed": 5})";
  EXPECT_EQ(zp3app::load_config(dir + "/c.json").seed, 5u);
  EXPECT_THROW(zp3app::load_config(dir + "/missing.json"), zp3::IoError);
}

}  // namespace
