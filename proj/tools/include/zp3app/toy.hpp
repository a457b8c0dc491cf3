// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "zp3/reconstruct.hpp"
#include "zp3app/dataset.hpp"

namespace zp3app {

struct ToyOptions {
  int width = 64;
  int height = 64;
  /// Focal length in pixels at 64 px width; scaled with width.
  double focal = 80.0;
  double radius = 2.5;
  int gaussians = 600;
  std::uint64_t seed = 7;
  double observed_start = 0.0;
  double observed_end = 90.0;
  double train_azimuth_step = 22.5;
  std::vector<double> train_elevations = {-30.0, 0.0, 30.0};
  double test_azimuth_step = 30.0;
  std::vector<double> test_elevations = {0.0, 20.0};
};

struct ToyDataset {
  zp3::GaussianCloud ground_truth;
  zp3::Intrinsics intrinsics;
  std::vector<zp3::Observation> train;
  std::vector<zp3::Observation> test;
  DatasetMeta meta;
};

zp3::Intrinsics toy_intrinsics(const ToyOptions& opts);

/// A lumpy closed shell of flattened Gaussians whose color changes with
/// azimuth and height, so every side of it looks different.
zp3::GaussianCloud make_toy_object(int count, std::uint64_t seed);

/// Renders `cloud` at `spec` over white; mask = alpha > 0.5.
zp3::Observation render_observation(const zp3::GaussianCloud& cloud,
                                    const zp3::ViewSpec& spec,
                                    const zp3::Intrinsics& intrinsics,
                                    int width, int height);

ToyDataset make_toy_dataset(const ToyOptions& opts = {});

}  // namespace zp3app
