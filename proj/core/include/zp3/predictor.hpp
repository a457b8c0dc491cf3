// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "zp3/image.hpp"

namespace zp3 {

/// Source of epsilon predictions. Implementations must be deterministic in
/// (x_t, t, condition) and safe to call from several threads.
class NoisePredictor {
 public:
  virtual ~NoisePredictor() = default;

  /// Predicted noise shaped like `x_t` (sampling domain).
  virtual Image predict(const Image& x_t, int t,
                        std::span<const Image> condition) const = 0;
};

/// Always predicts zero noise.
class NullPredictor final : public NoisePredictor {
 public:
  Image predict(const Image& x_t, int, std::span<const Image>) const override {
    return Image(x_t.width(), x_t.height(), x_t.channels(), Domain::kSampling);
  }
};

}  // namespace zp3
