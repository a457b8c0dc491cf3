// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "zp3/error.hpp"
#include "zp3/render_prior.hpp"

namespace zp3 {

void validate(const GaussianMixtureOracle& oracle) {
  if (oracle.components.empty()) {
    throw InvalidArgument("oracle needs at least one component");
  }
  double total = 0.0;
  for (const auto& c : oracle.components) {
    if (!(c.weight > 0.0)) throw InvalidArgument("oracle weight must be > 0");
    if (!(c.std > 0.0)) throw InvalidArgument("oracle std must be > 0");
    require_same_shape(c.mean, oracle.components.front().mean, "oracle means");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("oracle weights must sum to one");
  }
}

void normalize_weights(GaussianMixtureOracle& oracle) {
  double total = 0.0;
  for (const auto& c : oracle.components) total += c.weight;
  if (!(total > 0.0)) throw InvalidArgument("oracle weights sum to zero");
  for (auto& c : oracle.components) c.weight /= total;
}

Image oracle_predict(const Image& x_t, int t,
                     const GaussianMixtureOracle& oracle) {
  if (oracle.components.empty()) {
    throw InvalidArgument("oracle needs at least one component");
  }
  const double abar = oracle.schedule.at(t);
  const double sqrt_abar = std::sqrt(abar);
  const std::size_t n = x_t.size();
  const std::size_t k_count = oracle.components.size();
  std::vector<double> log_w(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& c = oracle.components[k];
    require_same_shape(x_t, c.mean, "oracle_predict");
    const double var = abar * c.std * c.std + 1.0 - abar;
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x_t[i] - sqrt_abar * c.mean[i];
      sq += d * d;
    }
    log_w[k] = std::log(c.weight) - 0.5 * sq / var -
               0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi * var);
  }
  const double peak = *std::max_element(log_w.begin(), log_w.end());
  double z = 0.0;
  for (double& v : log_w) {
    v = std::exp(v - peak);
    z += v;
  }
  Image eps(x_t.width(), x_t.height(), x_t.channels(), Domain::kSampling);
  const double scale = std::sqrt(1.0 - abar);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double r = log_w[k] / z;
    if (r == 0.0) continue;
    const auto& c = oracle.components[k];
    const double coef = scale * r / (abar * c.std * c.std + 1.0 - abar);
    for (std::size_t i = 0; i < n; ++i) {
      eps[i] += coef * (x_t[i] - sqrt_abar * c.mean[i]);
    }
  }
  return eps;
}

OraclePredictor::OraclePredictor(GaussianMixtureOracle oracle)
    : oracle_(std::move(oracle)) {
  validate(oracle_);
}

Image OraclePredictor::predict(const Image& x_t, int t,
                               std::span<const Image>) const {
  return oracle_predict(x_t, t, oracle_);
}

Image high_pass_boost(const Image& target, double amount) {
  Image out = target;
  const int w = target.width(), h = target.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < target.channels(); ++c) {
        double sum = 0.0;
        int count = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = x + dx, yy = y + dy;
            if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
            sum += target.at(xx, yy, c);
            ++count;
          }
        }
        const double v = target.at(x, y, c);
        out.at(x, y, c) = std::clamp(v + amount * (v - sum / count), -1.0, 1.0);
      }
    }
  }
  return out;
}

GaussianMixtureOracle make_sharpen_oracle(const std::vector<Image>& targets,
                                          double amount, double std,
                                          const NoiseSchedule& schedule) {
  if (targets.empty()) throw InvalidArgument("sharpen oracle needs targets");
  GaussianMixtureOracle oracle;
  oracle.schedule = schedule;
  for (const auto& t : targets) {
    oracle.components.push_back(
        {high_pass_boost(t, amount), std,
         1.0 / static_cast<double>(targets.size())});
  }
  validate(oracle);
  return oracle;
}

GaussianMixtureOracle make_pose_hypothesis_oracle(
    const GaussianCloud& ground_truth, const ViewSpec& target,
    const ViewSpec& condition, const Intrinsics& intrinsics, int width,
    int height, const NoiseSchedule& schedule,
    const PoseHypothesisOptions& opts, double far_field_factor) {
  if (opts.offsets.empty()) throw InvalidArgument("no pose offsets");
  const double spread =
      opts.base_spread +
      opts.spread_per_degree * angular_distance(target.azimuth, condition.azimuth);
  GaussianMixtureOracle oracle;
  oracle.schedule = schedule;
  for (double offset : opts.offsets) {
    ViewSpec spec = target;
    spec.azimuth = normalize_degrees(target.azimuth + offset);
    Camera cam = camera_from_spec(spec, intrinsics);
    if (far_field_factor > 1.0) cam = far_field_adapt(cam, far_field_factor);
    const double w = std::exp(-offset * offset / (2.0 * spread * spread));
    oracle.components.push_back(
        {render_prior_source(ground_truth, cam, width, height, opts.background),
         opts.component_std, w});
  }
  normalize_weights(oracle);
  return oracle;
}

}  // namespace zp3
