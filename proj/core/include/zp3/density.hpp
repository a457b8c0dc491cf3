// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "zp3/gaussian.hpp"

namespace zp3 {

struct DensifyOptions {
  /// Mean screen-space position gradient norm above which a Gaussian is
  /// cloned or split.
  double grad_threshold = 2e-4;
  /// Gaussians whose largest scale is below extent * this are cloned,
  /// larger ones are split.
  double percent_dense = 0.01;
  double split_factor = 1.6;
  /// Scene extent; values <= 0 use the cloud's own extent.
  double scene_extent = 0.0;
  std::uint64_t seed = 0;
};

/// A rewritten cloud plus, for every output Gaussian, the index of the
/// input Gaussian it came from (so optimizer state can follow it).
struct DensityResult {
  GaussianCloud cloud;
  std::vector<int> origin;
};

/// Clones small and splits large Gaussians whose gradient statistic exceeds
/// the threshold. Children of a Gaussian are emitted in place of it, so
/// untouched Gaussians keep their relative order.
DensityResult densify(const GaussianCloud& cloud,
                      const std::vector<double>& grad_stats,
                      const DensifyOptions& opts = {});

/// Drops Gaussians with opacity below `opacity_threshold`.
DensityResult prune(const GaussianCloud& cloud,
                    double opacity_threshold = 0.005);

}  // namespace zp3
