// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "zp3/gaussian.hpp"
#include "zp3/image.hpp"
#include "zp3/render.hpp"
#include "zp3/views.hpp"

namespace zp3test {

using zp3::Camera;
using zp3::GaussianCloud;
using zp3::Image;
using zp3::Vec3;

inline double rel_err(double a, double b) {
  const double d = std::abs(a - b);
  const double m = std::max(std::abs(a), std::abs(b));
  return m == 0.0 ? 0.0 : d / m;
}

/// Camera on the +x axis looking at the origin.
inline Camera test_camera(int width, int height, double focal = 40.0,
                          double distance = 3.0, double azimuth = 0.0,
                          double elevation = 0.0) {
  zp3::Intrinsics k;
  k.fx = k.fy = focal;
  k.cx = 0.5 * (width - 1);
  k.cy = 0.5 * (height - 1);
  zp3::ViewSpec spec;
  spec.azimuth = azimuth;
  spec.elevation = elevation;
  spec.radius = distance;
  return zp3::camera_from_spec(spec, k);
}

struct CloudParams {
  int count = 20;
  double spread = 0.6;
  double min_log_scale = -2.5;
  double max_log_scale = -1.2;
  double min_opacity = 0.05;
  double max_opacity = 0.95;
  double sh_rest = 0.15;
};

/// Random cloud around the origin with colors kept inside (0, 1) by a DC
/// term near mid-gray and small higher-order coefficients.
inline GaussianCloud random_cloud(std::mt19937_64& rng, const CloudParams& p) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GaussianCloud cloud;
  for (int i = 0; i < p.count; ++i) {
    zp3::Gaussian3D g;
    g.position = Vec3(u(rng), u(rng), u(rng)) * p.spread;
    for (int a = 0; a < 3; ++a) {
      g.log_scale[a] =
          p.min_log_scale + (p.max_log_scale - p.min_log_scale) * unit(rng);
    }
    zp3::Vec4 q(u(rng), u(rng), u(rng), u(rng));
    if (q.norm() < 1e-3) q = zp3::Vec4(1, 0, 0, 0);
    g.rotation = q.normalized();
    const double o = p.min_opacity + (p.max_opacity - p.min_opacity) * unit(rng);
    g.opacity_logit = std::log(o / (1.0 - o));
    for (int c = 0; c < 3; ++c) g.sh[0][c] = 0.8 * u(rng);
    for (int k = 1; k < zp3::kShCoeffs; ++k) {
      for (int c = 0; c < 3; ++c) g.sh[k][c] = p.sh_rest * u(rng);
    }
    cloud.gaussians.push_back(g);
  }
  return cloud;
}

// Reference SH basis written out from the real spherical-harmonic table.
inline std::array<double, 9> reference_sh_basis(const Vec3& d) {
  const double x = d.x(), y = d.y(), z = d.z();
  const double c0 = 0.5 / std::sqrt(M_PI);
  const double c1 = std::sqrt(3.0 / (4.0 * M_PI));
  const double c2 = 0.5 * std::sqrt(15.0 / M_PI);
  const double c3 = 0.25 * std::sqrt(5.0 / M_PI);
  const double c4 = 0.25 * std::sqrt(15.0 / M_PI);
  return {c0,          -c1 * y,     c1 * z,
          -c1 * x,     c2 * x * y,  -c2 * y * z,
          c3 * (2 * z * z - x * x - y * y), -c2 * x * z, c4 * (x * x - y * y)};
}

/// Per-pixel reference renderer: projects every Gaussian from scratch, sorts
/// all of them by depth for each pixel and composites with the library's
/// alpha floor and transmittance cutoff. No tiles, no bounding boxes.
inline zp3::RenderOutput reference_render(const GaussianCloud& cloud,
                                          const Camera& cam, int width, int height,
                                          const zp3::RenderOptions& opts = {}) {
  struct Item {
    double depth;
    int index;
    double mx, my;
    double ca, cb, cc;
    double opacity;
    Vec3 color;
  };
  std::vector<Item> items;
  const Vec3 center = -cam.rotation.transpose() * cam.translation;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& g = cloud.gaussians[i];
    const Vec3 pc = cam.rotation * g.position + cam.translation;
    if (!(pc.z() > opts.near)) continue;
    const zp3::Vec4 q = g.rotation.normalized();
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    zp3::Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    zp3::Mat3 s = zp3::Mat3::Zero();
    for (int a = 0; a < 3; ++a) s(a, a) = std::exp(g.log_scale[a]);
    const zp3::Mat3 sigma = r * s * s * r.transpose();
    Eigen::Matrix<double, 2, 3> j;
    const double fx = cam.intrinsics.fx, fy = cam.intrinsics.fy;
    j << fx / pc.z(), 0, -fx * pc.x() / (pc.z() * pc.z()), 0, fy / pc.z(),
        -fy * pc.y() / (pc.z() * pc.z());
    const Eigen::Matrix<double, 2, 3> t = j * cam.rotation;
    zp3::Mat2 cov = t * sigma * t.transpose();
    cov(0, 0) += opts.dilation;
    cov(1, 1) += opts.dilation;
    const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(0, 1);
    if (!(det > 0.0)) continue;
    const double opacity = 1.0 / (1.0 + std::exp(-g.opacity_logit));
    if (opacity * 255.0 <= 1.0) continue;
    const Vec3 dir = (g.position - center).normalized();
    const auto basis = reference_sh_basis(dir);
    Vec3 color = Vec3::Constant(0.5);
    for (int k = 0; k < 9; ++k) color += basis[k] * g.sh[k];
    color = color.cwiseMax(0.0).cwiseMin(1.0);
    items.push_back({pc.z(), static_cast<int>(i),
                     fx * pc.x() / pc.z() + cam.intrinsics.cx,
                     fy * pc.y() / pc.z() + cam.intrinsics.cy, cov(1, 1) / det,
                     -cov(0, 1) / det, cov(0, 0) / det, opacity, color});
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.depth < b.depth; });

  zp3::RenderOutput out;
  out.color = Image(width, height, 3);
  out.alpha = Image(width, height, 1);
  out.depth = Image(width, height, 1);
  for (int py = 0; py < height; ++py) {
    for (int px = 0; px < width; ++px) {
      double t = 1.0, d = 0.0;
      Vec3 c = Vec3::Zero();
      for (const Item& it : items) {
        const double dx = px - it.mx, dy = py - it.my;
        const double power =
            -0.5 * (it.ca * dx * dx + it.cc * dy * dy) - it.cb * dx * dy;
        if (power > 0.0) continue;
        const double a = it.opacity * std::exp(power);
        if (a < 1.0 / 255.0) continue;
        const double next_t = t * (1.0 - a);
        if (next_t < 1e-4) break;
        c += a * t * it.color;
        d += a * t * it.depth;
        t = next_t;
      }
      for (int ch = 0; ch < 3; ++ch) out.color.at(px, py, ch) = c[ch];
      out.alpha.at(px, py, 0) = 1.0 - t;
      out.depth.at(px, py, 0) = t < 1.0 ? d / (1.0 - t) : 0.0;
    }
  }
  return out;
}

inline Image random_image(std::mt19937_64& rng, int w, int h, int c, double lo,
                          double hi, zp3::Domain domain = zp3::Domain::kPixel) {
  std::uniform_real_distribution<double> u(lo, hi);
  Image im(w, h, c, domain);
  for (double& v : im.values()) v = u(rng);
  return im;
}

inline double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Exact MMSE noise prediction for scalar data x0 ~ N(mu, s^2).
inline double gaussian_eps(double x, double abar, double mu, double s) {
  return std::sqrt(1.0 - abar) * (x - std::sqrt(abar) * mu) /
         (abar * s * s + 1.0 - abar);
}

/// Reference for the deterministic sampler: explicit Euler integration of
/// the probability-flow ODE in sigma = sqrt((1 - abar) / abar), where
/// d(x / sqrt(abar)) = eps d sigma. `substeps` are spread over the grid
/// intervals in proportion to their log-sigma length, geometric within each.
/// Returns the state at every grid point from steps - 1 down to 0.
inline std::vector<double> probability_flow_reference(
    double x_start, const std::vector<double>& alpha_bar, double mu, double s,
    int substeps = 1000) {
  const std::size_t n = alpha_bar.size();
  std::vector<double> sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    sigma[i] = std::sqrt((1.0 - alpha_bar[i]) / alpha_bar[i]);
  }
  const double total = std::log(sigma[n - 1] / sigma[0]);
  std::vector<double> traj = {x_start};
  double xb = x_start / std::sqrt(alpha_bar[n - 1]);
  for (std::size_t t = n - 1; t >= 1; --t) {
    const double span = std::log(sigma[t] / sigma[t - 1]);
    const int k = std::max(1, static_cast<int>(std::lround(substeps * span / total)));
    double prev = sigma[t];
    for (int i = 1; i <= k; ++i) {
      const double next = sigma[t] * std::pow(sigma[t - 1] / sigma[t],
                                              static_cast<double>(i) / k);
      const double a = 1.0 / (1.0 + prev * prev);
      xb += gaussian_eps(xb * std::sqrt(a), a, mu, s) * (next - prev);
      prev = next;
    }
    traj.push_back(xb * std::sqrt(alpha_bar[t - 1]));
  }
  return traj;
}

/// Nearest f32 value. Out of line on purpose: GCC 11 -O3 vectorizes an inline
/// `v = static_cast<float>(v)` loop over 38 doubles and skips the rounding in
/// the epilogue.
double round_to_f32(double v);

/// Fresh temporary directory under the build tree's test scratch area.
std::string scratch_dir(const std::string& name);

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

/// Runs `exe` with `args` through the shell and waits for it.
CommandResult run_command(const std::string& exe, const std::vector<std::string>& args);

std::string file_bytes(const std::string& path);

}  // namespace zp3test
