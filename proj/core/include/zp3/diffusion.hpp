// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "zp3/image.hpp"

namespace zp3 {

enum class ScheduleKind { kLinearBeta, kCosine };

const char* to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

/// Cumulative signal levels on the DDIM step grid. Index 0 is the cleanest
/// step, steps - 1 the noisiest; alpha_bar strictly decreases with t.
struct NoiseSchedule {
  int steps = 0;
  std::vector<double> alpha_bar;
  ScheduleKind kind = ScheduleKind::kLinearBeta;

  double at(int t) const;
};

/// linear-beta: betas linearly spaced in [1e-4, 2e-2] over 1000 virtual
/// steps; their cumulative product is subsampled uniformly onto `steps`
/// points (log-linear interpolation between virtual steps).
/// cosine: alpha_bar(t) = cos^2((t / steps + s) / (1 + s) * pi / 2), s = 0.008.
NoiseSchedule make_schedule(int steps, ScheduleKind kind);

/// Time-dependent fusion weight parameters.
struct FusionWeights {
  double tau = 22.0;
  double sigma = 7.0;
  double eta = 4.0;
};

void validate(const FusionWeights& w);

struct WeightPair {
  double lf = 0.0;
  double hf = 0.0;
};

/// w_lf = (tanh(-(t - tau) / sigma) + 1) / 2, w_hf = (1 - w_lf) / eta.
WeightPair schedule_weights(double t, const FusionWeights& w);

/// Noise implied by a rendered low-frequency estimate:
/// (x_t - sqrt(abar_t) x_lf) / sqrt(1 - abar_t).
Image lf_noise_from_render(const Image& x_t, const Image& x_lf, int t,
                           const NoiseSchedule& sched);

/// One view-conditioned noise prediction with its fusion weight.
struct ViewPrediction {
  Image noise;
  double weight = 1.0;
  std::string source_view_id;
};

/// Weighted sum of view-conditioned predictions. With normalize (the
/// default) the weights are rescaled to sum to one.
Image fuse_mvd(std::span<const ViewPrediction> predictions,
               bool normalize = true);

/// eps_t = eps_mvd + w_hf(t) eps_hf + w_lf(t) eps_lf.
Image fuse_noise(const Image& eps_mvd, const Image& eps_hf,
                 const Image& eps_lf, double t, const FusionWeights& w);
/// Same combination with explicit weights.
Image fuse_noise(const Image& eps_mvd, const Image& eps_hf,
                 const Image& eps_lf, const WeightPair& weights);

/// Additive update x_{t-1} = x_t + (sqrt(abar_{t-1}) - sqrt(abar_t))
/// eps_t / sqrt(1 - abar_t).
Image ddim_step(const Image& x_t, const Image& eps_t, int t,
                const NoiseSchedule& sched);

/// Deterministic part of the standard DDIM update,
/// sqrt(abar_{t-1}) x0_hat + sqrt(1 - abar_{t-1} - sigma^2) eps_t, where
/// sigma = stochasticity * sqrt((1 - abar_{t-1}) / (1 - abar_t))
///         * sqrt(1 - abar_t / abar_{t-1}).
/// Returns the mean and writes sigma to *noise_scale when non-null.
Image ddim_step_canonical(const Image& x_t, const Image& eps_t, int t,
                          const NoiseSchedule& sched,
                          double stochasticity = 0.0,
                          double* noise_scale = nullptr);

struct VarianceCompensation {
  std::vector<double> lambda;  // one per channel
  Image adjusted;
};

/// Rescales the stochastic term per channel so the fused sample keeps the
/// variance of the unfused one:
/// lambda_c = sqrt((Var x_orig - Var x_avg + Var n) / (Var n + delta)),
/// negative numerators clamped to zero. `x_avg` already contains
/// `noise_term`; the result replaces it with lambda_c * noise_term.
VarianceCompensation variance_compensate(const Image& x_orig,
                                         const Image& x_avg,
                                         const Image& noise_term,
                                         double delta = 1e-8);

/// Per-channel sample variance over pixels (population normalization).
std::vector<double> channel_variance(const Image& image);

}  // namespace zp3
