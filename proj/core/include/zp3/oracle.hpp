// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "zp3/diffusion.hpp"
#include "zp3/gaussian.hpp"
#include "zp3/predictor.hpp"
#include "zp3/views.hpp"

namespace zp3 {

struct MixtureComponent {
  Image mean;  // sampling domain
  double std = 1.0;
  double weight = 1.0;
};

/// Isotropic Gaussian mixture over images, with the schedule that defines
/// its noised marginals.
struct GaussianMixtureOracle {
  std::vector<MixtureComponent> components;
  NoiseSchedule schedule;
};

/// Throws InvalidArgument unless weights are positive and sum to one (1e-9),
/// stds are positive and all means share a shape.
void validate(const GaussianMixtureOracle& oracle);

/// Rescales component weights to sum to one.
void normalize_weights(GaussianMixtureOracle& oracle);

/// Exact MMSE noise prediction: with
/// p_t = sum_k pi_k N(sqrt(abar) mu_k, (abar s_k^2 + 1 - abar) I),
/// eps = -sqrt(1 - abar) grad log p_t(x_t).
Image oracle_predict(const Image& x_t, int t,
                     const GaussianMixtureOracle& oracle);

class OraclePredictor final : public NoisePredictor {
 public:
  explicit OraclePredictor(GaussianMixtureOracle oracle);

  Image predict(const Image& x_t, int t,
                std::span<const Image> condition) const override;

  const GaussianMixtureOracle& oracle() const { return oracle_; }

 private:
  GaussianMixtureOracle oracle_;
};

/// Unsharp-mask boost: target + amount * (target - box3x3(target)),
/// clamped back into [-1, 1]. Input and output in sampling domain.
Image high_pass_boost(const Image& target, double amount);

/// Oracle over high-pass boosted copies of `targets` (equal weights).
GaussianMixtureOracle make_sharpen_oracle(const std::vector<Image>& targets,
                                          double amount, double std,
                                          const NoiseSchedule& schedule);

/// Stand-in for a view-conditioned multi-view backbone. Its mixture
/// components are ground-truth renders of the target view at azimuth
/// offsets; the further the conditioning view is from the target, the more
/// weight the off-pose hypotheses get.
struct PoseHypothesisOptions {
  std::vector<double> offsets = {-30.0, -15.0, 0.0, 15.0, 30.0};
  double base_spread = 4.0;          // degrees
  double spread_per_degree = 0.1;    // extra spread per degree of distance
  double component_std = 0.05;
  Vec3 background = Vec3::Ones();
};

GaussianMixtureOracle make_pose_hypothesis_oracle(
    const GaussianCloud& ground_truth, const ViewSpec& target,
    const ViewSpec& condition, const Intrinsics& intrinsics, int width,
    int height, const NoiseSchedule& schedule,
    const PoseHypothesisOptions& opts = {}, double far_field_factor = 1.0);

}  // namespace zp3
