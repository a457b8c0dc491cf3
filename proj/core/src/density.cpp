// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/density.hpp"

#include <cmath>
#include <random>

#include "zp3/error.hpp"

namespace zp3 {

DensityResult densify(const GaussianCloud& cloud,
                      const std::vector<double>& grad_stats,
                      const DensifyOptions& opts) {
  if (grad_stats.size() != cloud.size()) {
    throw InvalidArgument("densify: gradient statistics not aligned with cloud");
  }
  if (!(opts.split_factor > 0.0)) {
    throw InvalidArgument("densify: split factor must be positive");
  }
  const double extent =
      opts.scene_extent > 0.0 ? opts.scene_extent : cloud.extent();
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  DensityResult out;
  out.cloud.gaussians.reserve(cloud.size());
  out.origin.reserve(cloud.size());
  const double log_shrink = std::log(opts.split_factor);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Gaussian3D& g = cloud.gaussians[i];
    const int idx = static_cast<int>(i);
    if (!(grad_stats[i] > opts.grad_threshold)) {
      out.cloud.gaussians.push_back(g);
      out.origin.push_back(idx);
      continue;
    }
    const Vec3 scale = g.scale();
    if (scale.maxCoeff() < extent * opts.percent_dense) {
      out.cloud.gaussians.push_back(g);
      out.cloud.gaussians.push_back(g);
      out.origin.push_back(idx);
      out.origin.push_back(idx);
      continue;
    }
    const Mat3 r = quaternion_to_matrix(g.rotation);
    for (int child = 0; child < 2; ++child) {
      const Vec3 z(normal(rng), normal(rng), normal(rng));
      Gaussian3D c = g;
      c.position = g.position + r * scale.cwiseProduct(z);
      c.log_scale = g.log_scale.array() - log_shrink;
      out.cloud.gaussians.push_back(c);
      out.origin.push_back(idx);
    }
  }
  return out;
}

DensityResult prune(const GaussianCloud& cloud, double opacity_threshold) {
  if (!(opacity_threshold >= 0.0 && opacity_threshold < 1.0)) {
    throw InvalidArgument("prune: opacity threshold must be in [0, 1)");
  }
  DensityResult out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (cloud.gaussians[i].opacity() < opacity_threshold) continue;
    out.cloud.gaussians.push_back(cloud.gaussians[i]);
    out.origin.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace zp3
