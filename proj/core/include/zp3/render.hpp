// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <vector>

#include "zp3/gaussian.hpp"
#include "zp3/image.hpp"
#include "zp3/views.hpp"

namespace zp3 {

/// Contributions with alpha below this are skipped.
inline constexpr double kMinSplatAlpha = 1.0 / 255.0;
/// Compositing stops before a splat that would leave less transmittance
/// than this; that splat and everything behind it are skipped.
inline constexpr double kMinTransmittance = 1e-4;

struct RenderOptions {
  /// Added to the projected 2D covariance diagonal (pixels^2).
  double dilation = 0.3;
  double near = 0.01;
  int tile_size = 8;
};

struct ProjectedGaussian {
  bool culled = true;
  Vec2 mean2d = Vec2::Zero();
  Mat2 cov2d = Mat2::Zero();
  double depth = 0.0;
};

/// EWA projection: cov2d = J W Sigma W^T J^T + dilation * I. Gaussians at or
/// in front of the near plane come back culled.
ProjectedGaussian project(const Gaussian3D& g, const Camera& cam,
                          const RenderOptions& opts = {});

/// Per-Gaussian screen-space state shared by the forward and backward passes.
struct Splat {
  bool active = false;
  Vec2 mean = Vec2::Zero();
  double conic_a = 0.0, conic_b = 0.0, conic_c = 0.0;
  double opacity = 0.0;
  Vec3 color = Vec3::Zero();
  Vec3 color_unclamped = Vec3::Zero();
  double depth = 0.0;
  /// log(kMinSplatAlpha / opacity): exponents below this cannot reach the
  /// alpha floor.
  double min_power = 0.0;
  // Pixel bounding box, inclusive lower / exclusive upper, outside which
  // the contribution is guaranteed below kMinSplatAlpha.
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
};

/// Projects every Gaussian of `cloud` for a width x height target.
std::vector<Splat> prepare_splats(const GaussianCloud& cloud, const Camera& cam,
                                  int width, int height,
                                  const RenderOptions& opts = {});

/// Indices of active splats sorted front to back; ties keep index order.
std::vector<int> depth_order(const std::vector<Splat>& splats);

struct RenderOutput {
  Image color;  // H x W x 3, pixel domain, transparent black background
  Image alpha;  // H x W x 1 accumulated opacity
  Image depth;  // H x W x 1 expected depth where alpha > 0
};

struct CloudGradient {
  std::vector<ParamVector> params;
  /// dL / d mean2d in pixels, used for densification statistics.
  std::vector<Vec2> mean2d;
  /// 1 when the Gaussian touched at least one pixel of this view.
  std::vector<unsigned char> visible;
};

/// Tile-based forward pass with a reusable backward pass. Holds a reference
/// to the cloud, which must outlive the pass.
class RenderPass {
 public:
  RenderPass(const GaussianCloud& cloud, const Camera& cam, int width,
             int height, const RenderOptions& opts = {});

  const RenderOutput& output() const { return output_; }
  const std::vector<Splat>& splats() const { return splats_; }

  /// Gradients of sum(grad_color * color) + sum(grad_alpha * alpha) with
  /// respect to every Gaussian parameter.
  CloudGradient backward(const Image& grad_color,
                         const Image* grad_alpha = nullptr) const;

 private:
  const GaussianCloud& cloud_;
  Camera cam_;
  int width_;
  int height_;
  RenderOptions opts_;
  std::vector<Splat> splats_;
  std::vector<std::vector<int>> tiles_;
  int tiles_x_ = 0;
  int tiles_y_ = 0;
  RenderOutput output_;
};

RenderOutput render(const GaussianCloud& cloud, const Camera& cam, int width,
                    int height, const RenderOptions& opts = {});

CloudGradient render_backward(const GaussianCloud& cloud, const Camera& cam,
                              int width, int height, const Image& grad_color,
                              const Image* grad_alpha = nullptr,
                              const RenderOptions& opts = {});

/// color + (1 - alpha) * background, per channel.
Image composite_over(const RenderOutput& out, const Vec3& background);

}  // namespace zp3
