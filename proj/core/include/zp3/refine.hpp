// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>

#include "zp3/reconstruct.hpp"
#include "zp3/sampler.hpp"

namespace zp3 {

struct RefineConfig {
  int steps_per_iteration = 3000;
  TrainOptions train;  // train.densify_until defaults to 1300
  double lambda = 1.0;
  PerceptualKind perceptual = PerceptualKind::kMultiscaleL1;
  FusionWeights fusion;
  NoiseSchedule schedule;
  SampleOptions sampler;
  RotationPlan plan;
  /// Intrinsics of the supervision cameras at sampler resolution.
  Intrinsics intrinsics;
  /// Applied to supervision cameras; 1 keeps them perspective.
  double far_field_factor = 100.0;
  /// Loss weight of generated views relative to the observations.
  double supervision_weight = 1.0;
  /// Keep supervision images of earlier batches in the training set.
  bool retain_supervision = false;
  /// First batch to run; earlier batches are assumed done (resume).
  int start_batch = 0;
};

void validate(const RefineConfig& cfg);

/// Prior factories queried per supervision view.
struct RefinePriors {
  std::function<std::vector<MvdSource>(const ViewSpec& target,
                                       const Camera& camera)>
      mvd;
  /// Optional; may return null for no HF prior.
  std::function<std::shared_ptr<const NoisePredictor>(const ViewSpec& target,
                                                      const Camera& camera)>
      hf;
  BridgeClient* perceptual_bridge = nullptr;
};

struct BatchRecord {
  int batch = 0;
  std::vector<ViewSpec> views;
  std::vector<Camera> cameras;
  std::vector<Image> supervision;  // pixel domain
  std::vector<std::vector<StepRecord>> weights;
  std::vector<double> losses;
};

struct RefineResult {
  GaussianCloud cloud;
  std::vector<BatchRecord> batches;
};

/// Called after each batch with the batch record and the updated cloud.
using BatchCallback =
    std::function<void(const BatchRecord&, const GaussianCloud&)>;

/// Rotated-view refinement: for each plan batch, sample supervision images
/// for its views with the current cloud as LF prior, then optimize against
/// the observations plus the supervision set.
RefineResult refine(const GaussianCloud& cloud,
                    const std::vector<Observation>& observations,
                    const RefineConfig& config, const RefinePriors& priors,
                    std::uint64_t seed, const BatchCallback& on_batch = {});

/// Camera used for a supervision view.
Camera supervision_camera(const ViewSpec& spec, const RefineConfig& config);

/// Per-batch seed derived from the run seed.
std::uint64_t batch_seed(std::uint64_t seed, int batch);

}  // namespace zp3
