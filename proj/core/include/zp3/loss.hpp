// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "zp3/image.hpp"

namespace zp3 {

class BridgeClient;

enum class PerceptualKind { kMultiscaleL1, kBridgeLpips, kNone };

const char* to_string(PerceptualKind kind);
PerceptualKind perceptual_kind_from_string(const std::string& name);

struct LossResult {
  double value = 0.0;
  Image grad;  // d value / d render
};

/// Mean absolute error over the mask: sum m |r - t| / (C sum m).
LossResult masked_l1(const Image& render, const Image& target,
                     const Image& mask);

/// Average of masked L1 over a 3-level pyramid (full, 1/2, 1/4) built by
/// 2x2 average pooling of the masked residual and of the mask.
LossResult multiscale_l1(const Image& render, const Image& target,
                         const Image& mask, int levels = 3);

/// L1 + lambda * perceptual. `bridge` is required for kBridgeLpips.
LossResult composite_loss(const Image& render, const Image& target,
                          const Image& mask, double lambda,
                          PerceptualKind kind, BridgeClient* bridge = nullptr);

/// 2x2 average pooling; odd trailing rows and columns are dropped.
Image avg_pool2(const Image& image);

}  // namespace zp3
