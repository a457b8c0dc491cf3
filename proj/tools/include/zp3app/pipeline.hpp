// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "zp3/bridge.hpp"
#include "zp3/refine.hpp"
#include "zp3app/config.hpp"
#include "zp3app/dataset.hpp"

namespace zp3app {

/// Geometry shared by every generated view of a scene.
struct SceneFrame {
  zp3::Intrinsics intrinsics;
  int width = 64;
  int height = 64;
  double radius = 2.5;
  zp3::Vec3 target = zp3::Vec3::Zero();
  double observed_start = 0.0;
  double observed_end = 90.0;
};

/// Frame derived from observations: intrinsics and resolution of the first
/// view, radius = mean camera distance to the target.
SceneFrame scene_frame(const std::vector<zp3::Observation>& views,
                       const DatasetMeta& meta);

zp3::RotationPlan make_plan(const RunConfig& cfg, const SceneFrame& frame);

zp3::RefineConfig make_refine_config(const RunConfig& cfg,
                                     const SceneFrame& frame);

zp3::TrainOptions coarse_train_options(const RunConfig& cfg);

/// Inputs the prior factories draw on.
struct PriorContext {
  std::shared_ptr<const zp3::GaussianCloud> oracle_cloud;
  /// Observations that serve as conditioning images.
  std::vector<zp3::Observation> observations;
  std::shared_ptr<zp3::BridgeClient> bridge;
};

/// Conditioning views: `count` views 45 degrees apart centered in the
/// observed range, each paired with the nearest observation's image.
struct Conditioning {
  zp3::ViewSpec spec;
  zp3::Image image;  // sampling domain
};
std::vector<Conditioning> conditioning_set(const RunConfig& cfg,
                                           const SceneFrame& frame,
                                           const std::vector<zp3::Observation>& obs);

zp3::RefinePriors make_refine_priors(const RunConfig& cfg,
                                     const SceneFrame& frame,
                                     const PriorContext& ctx);

/// Camera for a requested (azimuth, elevation) at the frame radius, far-field
/// adapted as configured.
zp3::Camera target_camera(const RunConfig& cfg, const SceneFrame& frame,
                          double azimuth, double elevation);

}  // namespace zp3app
