// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3app/toy.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "zp3/render.hpp"

namespace zp3app {
namespace {

using zp3::Vec3;

Vec3 hsv(double h, double s, double v) {
  h = h - std::floor(h);
  const double k[3] = {5.0, 3.0, 1.0};
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    const double kk = std::fmod(k[i] + h * 6.0, 6.0);
    out[i] = v - v * s * std::max(0.0, std::min({kk, 4.0 - kk, 1.0}));
  }
  return out;
}

// Rotation taking +z to `n`, as a (w, x, y, z) quaternion.
zp3::Vec4 align_z(const Vec3& n) {
  const Vec3 z(0, 0, 1);
  const double d = z.dot(n);
  if (d < -0.999999) return zp3::Vec4(0, 1, 0, 0);
  const Vec3 axis = z.cross(n);
  zp3::Vec4 q(1.0 + d, axis.x(), axis.y(), axis.z());
  return q.normalized();
}

}  // namespace

zp3::Intrinsics toy_intrinsics(const ToyOptions& opts) {
  const double f = opts.focal * opts.width / 64.0;
  return {f, f, (opts.width - 1) / 2.0, (opts.height - 1) / 2.0};
}

zp3::GaussianCloud make_toy_object(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  zp3::GaussianCloud cloud;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    // Fibonacci sphere direction with a little jitter.
    const double zc = 1.0 - 2.0 * (i + 0.5 + 0.3 * jitter(rng)) / count;
    const double rr = std::sqrt(std::max(0.0, 1.0 - zc * zc));
    const double phi = golden * i + 0.05 * jitter(rng);
    const Vec3 dir(rr * std::cos(phi), rr * std::sin(phi), zc);
    const double az = std::atan2(dir.y(), dir.x());
    const double el = std::asin(std::clamp(dir.z(), -1.0, 1.0));
    const double radius = 0.45 * (1.0 + 0.18 * std::sin(3.0 * az) * std::cos(el) +
                                  0.1 * std::cos(2.0 * el));
    const Vec3 pos(dir.x() * radius, dir.y() * radius, dir.z() * radius * 0.85);
    const double hue = (az + std::numbers::pi) / (2.0 * std::numbers::pi);
    const double band = 0.5 + 0.5 * std::sin(5.0 * el + 2.0 * az);
    const Vec3 rgb = hsv(hue, 0.75, 0.45 + 0.5 * band);
    const double s = 0.06;
    cloud.gaussians.push_back(zp3::make_gaussian(
        pos, Vec3(s, s, 0.25 * s), align_z(dir), 0.95, rgb));
  }
  return cloud;
}

zp3::Observation render_observation(const zp3::GaussianCloud& cloud,
                                    const zp3::ViewSpec& spec,
                                    const zp3::Intrinsics& intrinsics,
                                    int width, int height) {
  zp3::Observation obs;
  obs.view_spec = spec;
  obs.camera = zp3::camera_from_spec(spec, intrinsics);
  const zp3::RenderOutput out = zp3::render(cloud, obs.camera, width, height);
  obs.image = zp3::clamped(zp3::composite_over(out, Vec3::Ones()), 0.0, 1.0);
  obs.mask = zp3::Image(width, height, 1);
  for (std::size_t p = 0; p < obs.mask.size(); ++p) {
    obs.mask[p] = out.alpha[p] > 0.5 ? 1.0 : 0.0;
  }
  return obs;
}

ToyDataset make_toy_dataset(const ToyOptions& opts) {
  ToyDataset ds;
  ds.ground_truth = make_toy_object(opts.gaussians, opts.seed);
  ds.intrinsics = toy_intrinsics(opts);
  ds.meta.observed_start = opts.observed_start;
  ds.meta.observed_end = opts.observed_end;
  ds.meta.elevations = opts.train_elevations;
  ds.meta.scene_scale = 1.0;
  auto add = [&](std::vector<zp3::Observation>& into, double az, double el,
                 const char* prefix) {
    zp3::ViewSpec spec;
    spec.azimuth = zp3::normalize_degrees(az);
    spec.elevation = el;
    spec.radius = opts.radius;
    zp3::Observation obs = render_observation(ds.ground_truth, spec,
                                              ds.intrinsics, opts.width, opts.height);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_a%03d_e%+03d", prefix,
                  static_cast<int>(std::lround(spec.azimuth * 10)) / 10,
                  static_cast<int>(std::lround(el)));
    obs.id = buf;
    into.push_back(std::move(obs));
  };
  const double span = opts.observed_end - opts.observed_start;
  const int n_train = static_cast<int>(std::floor(span / opts.train_azimuth_step + 1e-9));
  for (double el : opts.train_elevations) {
    for (int i = 0; i <= n_train; ++i) {
      add(ds.train, opts.observed_start + i * opts.train_azimuth_step, el, "train");
    }
  }
  const int n_test = static_cast<int>(std::lround(360.0 / opts.test_azimuth_step));
  for (double el : opts.test_elevations) {
    for (int i = 0; i < n_test; ++i) {
      add(ds.test, i * opts.test_azimuth_step, el, "test");
    }
  }
  return ds;
}

}  // namespace zp3app
