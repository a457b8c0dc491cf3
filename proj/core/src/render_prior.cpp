// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/render_prior.hpp"

namespace zp3 {

Image render_prior_source(const GaussianCloud& cloud, const Camera& cam,
                          int width, int height, const Vec3& background,
                          const RenderOptions& opts) {
  const RenderOutput out = render(cloud, cam, width, height, opts);
  return to_sampling(clamped(composite_over(out, background), 0.0, 1.0));
}

}  // namespace zp3
