// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zp3/density.hpp"
#include "zp3/loss.hpp"
#include "zp3/optimizer.hpp"
#include "zp3/render.hpp"

namespace zp3 {

/// A captured view: pixel-domain RGB, binary foreground mask (H x W x 1)
/// and its camera.
struct Observation {
  Image image;
  Image mask;
  Camera camera;
  ViewSpec view_spec;
  std::string id;
};

void validate(const Observation& obs);

struct InitOptions {
  double opacity = 0.1;
  /// Relative depth jitter around the mid-depth of the viewing region.
  double depth_jitter = 0.15;
  int neighbors = 3;
};

/// Seeds `n_points` Gaussians by back-projecting random foreground pixels
/// to the mid-depth of the region the cameras look at.
GaussianCloud init_cloud(const std::vector<Observation>& observations,
                         int n_points, std::uint64_t seed,
                         const InitOptions& opts = {});

struct TrainOptions {
  LearningRates lr;
  int densify_from = 100;
  int densify_until = 1300;
  int densify_interval = 100;
  DensifyOptions densify;
  double prune_opacity = 0.005;
  std::size_t max_gaussians = 20000;
  /// Weight of the accumulated-alpha vs mask term.
  double alpha_weight = 0.1;
  Vec3 background = Vec3::Ones();
  RenderOptions render;
  /// Scene extent for learning-rate scaling and densification; values <= 0
  /// are estimated from the cameras.
  double scene_extent = 0.0;
};

void validate(const TrainOptions& opts, int steps);

enum class PhotometricLoss { kMaskedL2, kComposite };

struct LossSpec {
  PhotometricLoss kind = PhotometricLoss::kMaskedL2;
  double lambda = 1.0;
  PerceptualKind perceptual = PerceptualKind::kMultiscaleL1;
  BridgeClient* bridge = nullptr;
};

/// One supervised view inside an optimization run.
struct TrainingView {
  Image target;  // pixel domain, composited over the background
  Image mask;    // H x W x 1
  Camera camera;
  double weight = 1.0;
  /// Adds the alpha-vs-mask term for this view.
  bool alpha_supervision = true;
};

struct FitResult {
  GaussianCloud cloud;
  std::vector<double> losses;  // one per step
};

/// Scene extent estimated from camera centers and focus distances.
double estimate_scene_extent(const std::vector<Camera>& cameras);

/// Shared optimization loop: Adam on rendered-vs-target loss with
/// densification and pruning on the configured schedule.
FitResult optimize_views(GaussianCloud cloud,
                         const std::vector<TrainingView>& views, int steps,
                         const TrainOptions& opts, const LossSpec& loss,
                         std::uint64_t seed);

/// Observations as training views: targets composited over `background`
/// using their masks.
std::vector<TrainingView> training_views(const std::vector<Observation>& obs,
                                         const Vec3& background);

/// Masked photometric fit of the observations plus the alpha term.
FitResult coarse_fit(const GaussianCloud& cloud,
                     const std::vector<Observation>& observations, int steps,
                     const TrainOptions& opts, std::uint64_t seed);

}  // namespace zp3
