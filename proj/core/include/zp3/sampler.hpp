// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zp3/diffusion.hpp"
#include "zp3/predictor.hpp"
#include "zp3/render.hpp"

namespace zp3 {

/// One view-conditioned predictor and the images it is conditioned on.
struct MvdSource {
  std::shared_ptr<const NoisePredictor> predictor;
  std::vector<Image> condition;
  double weight = 1.0;
  std::string id;
};

/// Everything the sampler queries for one target view.
struct PriorBundle {
  std::vector<MvdSource> mvd;
  /// Low-frequency source: a ready sampling-domain image, or else a cloud
  /// rendered at the target camera. Neither means no LF prior.
  std::optional<Image> lf_image;
  const GaussianCloud* lf_cloud = nullptr;
  Vec3 background = Vec3::Ones();
  /// High-frequency predictor; null means the zero predictor.
  std::shared_ptr<const NoisePredictor> hf;
  std::vector<Image> hf_condition;
};

struct SampleOptions {
  int width = 64;
  int height = 64;
  /// Standard x0-form DDIM update instead of the additive one.
  bool canonical_ddim = true;
  /// DDIM eta; > 0 injects noise (canonical update only).
  double stochastic_eta = 0.0;
  bool variance_compensation = false;
  double compensation_delta = 1e-8;
  bool normalize_mvd = true;
  /// Evaluate the weight schedule at steps - 1 - t instead of t.
  bool invert_t = false;
  bool lf_enabled = true;
  bool hf_enabled = true;
  RenderOptions render;
};

struct StepRecord {
  int t = 0;
  double w_lf = 0.0;
  double w_hf = 0.0;
};

struct SampleResult {
  Image latent;  // final iterate, sampling domain, unclamped
  Image image;   // clamped and mapped to pixel domain
  std::vector<StepRecord> steps;
};

/// Runs one fused DDIM chain from seeded N(0, I) down to t = 0.
SampleResult sample(const Camera& target_view, const PriorBundle& providers,
                    const NoiseSchedule& sched, const FusionWeights& w,
                    std::uint64_t seed, const SampleOptions& options = {});

/// Effective fusion weights at step t under the given options.
WeightPair step_weights(int t, const NoiseSchedule& sched,
                        const FusionWeights& w, const SampleOptions& options);

}  // namespace zp3
