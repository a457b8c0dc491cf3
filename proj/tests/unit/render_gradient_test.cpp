// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zp3/render.hpp"
#include "test_support.hpp"

namespace {

constexpr int kSize = 16;

struct Probe {
  zp3::Image grad_color;
  zp3::Image grad_alpha;
};

double objective(const zp3::GaussianCloud& cloud, const zp3::Camera& cam,
                 const Probe& probe) {
  const auto out = zp3::render(cloud, cam, kSize, kSize);
  double s = 0.0;
  for (std::size_t i = 0; i < out.color.size(); ++i) s += probe.grad_color[i] * out.color[i];
  for (std::size_t i = 0; i < out.alpha.size(); ++i) s += probe.grad_alpha[i] * out.alpha[i];
  return s;
}

double central(zp3::GaussianCloud cloud, const zp3::Camera& cam, const Probe& probe,
               std::size_t g, int k, double h) {
  auto p = cloud.gaussians[g].params();
  const double x = p[k];
  p[k] = x + h;
  cloud.gaussians[g].set_params(p);
  const double up = objective(cloud, cam, probe);
  p[k] = x - h;
  cloud.gaussians[g].set_params(p);
  const double down = objective(cloud, cam, probe);
  return (up - down) / (2.0 * h);
}

bool is_appearance(int k) { return k >= zp3::param::kOpacity; }

// Central differences against the analytic backward pass over 60 random
// scenes. Parameters where the step size changes the estimate (a splat
// crossing the alpha floor) are not smooth there and are skipped but counted.
TEST(RenderGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> az(0.0, 360.0), el(-30.0, 30.0);
  const double h = 1e-6;
  int checked = 0, skipped = 0;
  double worst_geometry = 0.0, worst_appearance = 0.0;
  for (int scene = 0; scene < 60; ++scene) {
    zp3test::CloudParams p;
    p.count = 4;
    p.spread = 0.4;
    p.min_log_scale = -2.0;
    p.max_log_scale = -1.3;
    p.max_opacity = 0.8;
    p.sh_rest = 0.1;
    const auto cloud = zp3test::random_cloud(rng, p);
    const auto cam = zp3test::test_camera(kSize, kSize, 16.0, 3.0, az(rng), el(rng));
    Probe probe{zp3test::random_image(rng, kSize, kSize, 3, -1.0, 1.0),
                zp3test::random_image(rng, kSize, kSize, 1, -1.0, 1.0)};
    const auto grad =
        zp3::render_backward(cloud, cam, kSize, kSize, probe.grad_color, &probe.grad_alpha);
    ASSERT_EQ(grad.params.size(), cloud.size());
    for (std::size_t g = 0; g < cloud.size(); ++g) {
      for (int k = 0; k < zp3::kGaussianParams; ++k) {
        const double fd = central(cloud, cam, probe, g, k, h);
        const double fd_half = central(cloud, cam, probe, g, k, 0.5 * h);
        const double analytic = grad.params[g][k];
        const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-3});
        const double tol = is_appearance(k) ? 1e-3 : 1e-2;
        if (std::abs(fd - fd_half) > tol * scale) {
          ++skipped;
          continue;
        }
        ++checked;
        const double err = std::abs(fd - analytic) / scale;
        (is_appearance(k) ? worst_appearance : worst_geometry) =
            std::max(is_appearance(k) ? worst_appearance : worst_geometry, err);
        EXPECT_LE(err, tol) << "scene " << scene << " gaussian " << g << " param " << k
                            << " fd " << fd << " analytic " << analytic;
      }
    }
  }
  RecordProperty("checked", checked);
  RecordProperty("skipped", skipped);
  RecordProperty("worst_geometry", std::to_string(worst_geometry));
  RecordProperty("worst_appearance", std::to_string(worst_appearance));
  EXPECT_LT(skipped, checked / 50) << "too many non-smooth points";
}

TEST(RenderGradient, InvisibleGaussiansGetZeroGradient) {
  std::mt19937_64 rng(42);
  auto cloud = zp3test::random_cloud(rng, {.count = 3});
  cloud.gaussians[1].position = zp3::Vec3(5.0, 0.0, 0.0);  // behind the camera
  const auto cam = zp3test::test_camera(kSize, kSize, 16.0, 3.0);
  const auto gc = zp3test::random_image(rng, kSize, kSize, 3, -1.0, 1.0);
  const auto grad = zp3::render_backward(cloud, cam, kSize, kSize, gc);
  EXPECT_EQ(grad.visible[1], 0);
  for (double v : grad.params[1]) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(grad.mean2d[1], zp3::Vec2::Zero());
}

TEST(RenderGradient, ScreenMeanGradientMatchesTranslation) {
  // On the optical axis an isotropic Gaussian's footprint does not change to
  // first order under a sideways move, so only the mean shift (f/z per unit)
  // contributes to the in-plane position gradient.
  zp3::GaussianCloud cloud;
  cloud.gaussians.push_back(zp3::make_gaussian(zp3::Vec3::Zero(),
                                               zp3::Vec3::Constant(0.12),
                                               zp3::Vec4(1, 0, 0, 0), 0.7,
                                               zp3::Vec3(0.3, 0.5, 0.7)));
  std::mt19937_64 rng(43);
  const auto cam = zp3test::test_camera(kSize, kSize, 16.0, 3.0);
  const auto gc = zp3test::random_image(rng, kSize, kSize, 3, -1.0, 1.0);
  const auto grad = zp3::render_backward(cloud, cam, kSize, kSize, gc);
  const double f_over_z = 16.0 / 3.0;
  const zp3::Vec2 m = grad.mean2d[0];
  ASSERT_GT(m.norm(), 0.0);
  const zp3::Vec3 g(grad.params[0][zp3::param::kPosition],
                    grad.params[0][zp3::param::kPosition + 1],
                    grad.params[0][zp3::param::kPosition + 2]);
  for (int axis = 0; axis < 2; ++axis) {
    const zp3::Vec3 dir = cam.rotation.row(axis).transpose();
    EXPECT_NEAR(g.dot(dir), f_over_z * m[axis], 1e-9 * f_over_z * m.norm()) << axis;
  }
}

}  // namespace
