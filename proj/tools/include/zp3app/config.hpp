// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zp3/bridge.hpp"
#include "zp3/oracle.hpp"
#include "zp3/reconstruct.hpp"
#include "zp3/refine.hpp"
#include "zp3/sampler.hpp"
#include "zp3/views.hpp"

namespace zp3app {

struct PlanConfig {
  double theta0 = 0.0;
  double delta_theta = 45.0;
  double delta_e = 6.0;
  int iterations = 8;
  int batch_size = 8;
  std::vector<double> elevations = {-30.0, 0.0, 30.0};
  zp3::PlanStrategy strategy = zp3::PlanStrategy::kAlternating;
};

struct PriorsConfig {
  /// "oracle" (pose-hypothesis mixture over a ground-truth cloud) or
  /// "bridge".
  std::string mvd = "oracle";
  /// "null", "sharpen" or "bridge".
  std::string hf = "null";
  /// Ground-truth cloud for the oracle; empty means <dataset>/gt.zp3g.
  std::string oracle_cloud;
  int conditioning_views = 3;
  zp3::PoseHypothesisOptions pose;
  double sharpen_amount = 0.5;
  double sharpen_std = 0.05;
};

struct RunConfig {
  std::uint64_t seed = 0;

  zp3::ScheduleKind schedule_kind = zp3::ScheduleKind::kLinearBeta;
  int schedule_steps = 50;

  zp3::FusionWeights fusion;
  zp3::SampleOptions sampler;
  double far_field_factor = 100.0;
  zp3::ViewClassThresholds view_classes;

  PlanConfig plan;

  int init_points = 2000;
  int init_steps = 2000;
  zp3::InitOptions init;

  int steps_per_iteration = 3000;
  zp3::TrainOptions train;
  double lambda = 1.0;
  zp3::PerceptualKind perceptual = zp3::PerceptualKind::kMultiscaleL1;
  double supervision_weight = 1.0;
  bool retain_supervision = false;

  PriorsConfig priors;

  bool bridge_enabled = false;
  zp3::BridgeConfig bridge;

  bool eval_full_frame = false;
};

/// Throws zp3::InvalidArgument on any invalid field.
void validate(const RunConfig& cfg);

std::string to_json(const RunConfig& cfg);
/// Parses a JSON document on top of the defaults. Unknown keys are errors.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& path);

zp3::NoiseSchedule make_schedule(const RunConfig& cfg);

}  // namespace zp3app
