// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "zp3/gaussian.hpp"

namespace zp3 {

/// Per-group learning rates. Position rates are multiplied by the scene
/// extent and decay exponentially from `position` to `position_final`.
struct LearningRates {
  double position = 1.6e-4;
  double position_final = 1.6e-6;
  double scale = 5e-3;
  double rotation = 1e-3;
  double opacity = 5e-2;
  double sh_dc = 2.5e-3;
  double sh_rest = 2.5e-3 / 20.0;
};

void validate(const LearningRates& lr);

/// Adam over the flat per-Gaussian parameter layout.
class AdamOptimizer {
 public:
  AdamOptimizer(LearningRates lr, double scene_extent, int decay_steps);

  /// Applies one update and renormalizes quaternions. Grows its state when
  /// the cloud is larger than the state (new entries start at zero).
  void step(GaussianCloud& cloud, const std::vector<ParamVector>& grads);

  /// Follows a densify/prune rewrite: output j takes the state of input
  /// origin[j]; repeated origins after the first start fresh.
  void remap(const std::vector<int>& origin);

  int iterations() const { return iterations_; }
  double position_lr() const;

 private:
  LearningRates lr_;
  double extent_;
  int decay_steps_;
  int iterations_ = 0;
  std::vector<ParamVector> m_;
  std::vector<ParamVector> v_;
};

}  // namespace zp3
