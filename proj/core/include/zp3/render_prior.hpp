// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "zp3/render.hpp"

namespace zp3 {

/// Coarse render of the target view composited over `background` and mapped
/// into the sampling domain.
Image render_prior_source(const GaussianCloud& cloud, const Camera& cam,
                          int width, int height,
                          const Vec3& background = Vec3::Ones(),
                          const RenderOptions& opts = {});

}  // namespace zp3
