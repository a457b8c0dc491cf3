// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "zp3/error.hpp"
#include "zp3/parallel.hpp"
#include "zp3/sh.hpp"

namespace zp3 {
namespace {

using Mat23 = Eigen::Matrix<double, 2, 3>;

// Slack on the log-space alpha pre-check so that borderline contributions
// still go through the exact alpha comparison.
constexpr double kPowerMargin = 1e-6;

struct ProjectionParts {
  Vec3 cam_pos;
  Mat23 jacobian;
  Mat3 cov3d;
  Mat2 cov2d;
};

ProjectionParts projection_parts(const Gaussian3D& g, const Camera& cam,
                                 double dilation) {
  ProjectionParts p;
  p.cam_pos = cam.to_camera(g.position);
  const double x = p.cam_pos.x(), y = p.cam_pos.y(), z = p.cam_pos.z();
  const double fx = cam.intrinsics.fx, fy = cam.intrinsics.fy;
  p.jacobian << fx / z, 0.0, -fx * x / (z * z), 0.0, fy / z, -fy * y / (z * z);
  p.cov3d = covariance(g);
  const Mat23 t = p.jacobian * cam.rotation;
  p.cov2d = t * p.cov3d * t.transpose();
  p.cov2d(0, 0) += dilation;
  p.cov2d(1, 1) += dilation;
  return p;
}

// Accumulated per-splat screen-space gradients: mean (2), conic (3),
// opacity (1), color (3).
struct ScreenGrad {
  double mean_x = 0, mean_y = 0;
  double conic_a = 0, conic_b = 0, conic_c = 0;
  double opacity = 0;
  Vec3 color = Vec3::Zero();

  void add(const ScreenGrad& o) {
    mean_x += o.mean_x;
    mean_y += o.mean_y;
    conic_a += o.conic_a;
    conic_b += o.conic_b;
    conic_c += o.conic_c;
    opacity += o.opacity;
    color += o.color;
  }
};

// Quaternion (unit) partials dR/dq_i.
std::array<Mat3, 4> rotation_partials(const Vec4& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  std::array<Mat3, 4> d;
  d[0] << 0, -2 * z, 2 * y, 2 * z, 0, -2 * x, -2 * y, 2 * x, 0;
  d[1] << 0, 2 * y, 2 * z, 2 * y, -4 * x, -2 * w, 2 * z, 2 * w, -4 * x;
  d[2] << -4 * y, 2 * x, 2 * w, 2 * x, 0, 2 * z, -2 * w, 2 * z, -4 * y;
  d[3] << -4 * z, -2 * w, 2 * x, 2 * w, -4 * z, 2 * y, 2 * x, 2 * y, 0;
  return d;
}

}  // namespace

ProjectedGaussian project(const Gaussian3D& g, const Camera& cam,
                          const RenderOptions& opts) {
  ProjectedGaussian out;
  const Vec3 pc = cam.to_camera(g.position);
  out.depth = pc.z();
  if (pc.z() <= opts.near) return out;
  const auto parts = projection_parts(g, cam, opts.dilation);
  out.culled = false;
  out.mean2d = cam.project(pc);
  out.cov2d = parts.cov2d;
  return out;
}

std::vector<Splat> prepare_splats(const GaussianCloud& cloud, const Camera& cam,
                                  int width, int height,
                                  const RenderOptions& opts) {
  std::vector<Splat> splats(cloud.size());
  const Vec3 center = cam.center();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Gaussian3D& g = cloud.gaussians[i];
    Splat& s = splats[i];
    const Vec3 pc = cam.to_camera(g.position);
    if (!(pc.z() > opts.near)) continue;
    const auto parts = projection_parts(g, cam, opts.dilation);
    const Mat2& c = parts.cov2d;
    const double det = c(0, 0) * c(1, 1) - c(0, 1) * c(0, 1);
    if (!(det > 0.0)) continue;
    s.opacity = g.opacity();
    if (s.opacity * 255.0 <= 1.0) continue;
    s.conic_a = c(1, 1) / det;
    s.conic_b = -c(0, 1) / det;
    s.conic_c = c(0, 0) / det;
    s.mean = cam.project(pc);
    s.min_power = std::log(kMinSplatAlpha / s.opacity);
    s.depth = pc.z();
    const double mid = 0.5 * (c(0, 0) + c(1, 1));
    const double lambda_max =
        mid + std::sqrt(std::max(0.0, mid * mid - det));
    const double reach =
        std::sqrt(2.0 * std::log(255.0 * s.opacity) * lambda_max) + 1.0;
    s.x0 = std::max(0, static_cast<int>(std::floor(s.mean.x() - reach)));
    s.x1 = std::min(width, static_cast<int>(std::ceil(s.mean.x() + reach)) + 1);
    s.y0 = std::max(0, static_cast<int>(std::floor(s.mean.y() - reach)));
    s.y1 = std::min(height, static_cast<int>(std::ceil(s.mean.y() + reach)) + 1);
    if (s.x0 >= s.x1 || s.y0 >= s.y1) continue;
    const Vec3 dir = (g.position - center).normalized();
    const ShColor col = sh_eval(g.sh, dir);
    s.color = col.rgb;
    s.color_unclamped = col.unclamped;
    s.active = true;
  }
  return splats;
}

std::vector<int> depth_order(const std::vector<Splat>& splats) {
  std::vector<int> order;
  for (std::size_t i = 0; i < splats.size(); ++i) {
    if (splats[i].active) order.push_back(static_cast<int>(i));
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return splats[a].depth < splats[b].depth;
  });
  return order;
}

RenderPass::RenderPass(const GaussianCloud& cloud, const Camera& cam,
                       int width, int height, const RenderOptions& opts)
    : cloud_(cloud), cam_(cam), width_(width), height_(height), opts_(opts) {
  if (width < 1 || height < 1) {
    throw InvalidArgument("render target must be at least 1x1");
  }
  if (opts.tile_size < 1) throw InvalidArgument("tile size must be >= 1");
  splats_ = prepare_splats(cloud, cam, width, height, opts);
  const std::vector<int> order = depth_order(splats_);

  const int ts = opts.tile_size;
  tiles_x_ = (width + ts - 1) / ts;
  tiles_y_ = (height + ts - 1) / ts;
  tiles_.assign(static_cast<std::size_t>(tiles_x_) * tiles_y_, {});
  for (int idx : order) {
    const Splat& s = splats_[idx];
    for (int ty = s.y0 / ts; ty <= (s.y1 - 1) / ts; ++ty) {
      for (int tx = s.x0 / ts; tx <= (s.x1 - 1) / ts; ++tx) {
        tiles_[static_cast<std::size_t>(ty) * tiles_x_ + tx].push_back(idx);
      }
    }
  }

  output_.color = Image(width, height, 3, Domain::kPixel);
  output_.alpha = Image(width, height, 1, Domain::kPixel);
  output_.depth = Image(width, height, 1, Domain::kPixel);
  parallel_for(tiles_.size(), [&](std::size_t tile) {
    const int tx = static_cast<int>(tile) % tiles_x_;
    const int ty = static_cast<int>(tile) / tiles_x_;
    const auto& list = tiles_[tile];
    for (int py = ty * ts; py < std::min(height, (ty + 1) * ts); ++py) {
      for (int px = tx * ts; px < std::min(width, (tx + 1) * ts); ++px) {
        double t = 1.0;
        Vec3 c = Vec3::Zero();
        double d = 0.0;
        for (int idx : list) {
          const Splat& s = splats_[idx];
          if (px < s.x0 || px >= s.x1 || py < s.y0 || py >= s.y1) continue;
          const double dx = px - s.mean.x();
          const double dy = py - s.mean.y();
          const double power = -0.5 * (s.conic_a * dx * dx + s.conic_c * dy * dy) -
                               s.conic_b * dx * dy;
          if (power > 0.0 || power < s.min_power - kPowerMargin) continue;
          const double a = s.opacity * std::exp(power);
          if (a < kMinSplatAlpha) continue;
          const double next_t = t * (1.0 - a);
          if (next_t < kMinTransmittance) break;
          const double w = a * t;
          c += w * s.color;
          d += w * s.depth;
          t = next_t;
        }
        for (int ch = 0; ch < 3; ++ch) output_.color.at(px, py, ch) = c[ch];
        const double acc = 1.0 - t;
        output_.alpha.at(px, py, 0) = acc;
        output_.depth.at(px, py, 0) = acc > 0.0 ? d / acc : 0.0;
      }
    }
  });
}

CloudGradient RenderPass::backward(const Image& grad_color,
                                   const Image* grad_alpha) const {
  if (grad_color.width() != width_ || grad_color.height() != height_ ||
      grad_color.channels() != 3) {
    throw InvalidArgument("render_backward: upstream color gradient shape");
  }
  if (grad_alpha && (grad_alpha->width() != width_ ||
                     grad_alpha->height() != height_ ||
                     grad_alpha->channels() != 1)) {
    throw InvalidArgument("render_backward: upstream alpha gradient shape");
  }
  const int ts = opts_.tile_size;
  std::vector<std::vector<ScreenGrad>> tile_grads(tiles_.size());
  parallel_for(tiles_.size(), [&](std::size_t tile) {
    const int tx = static_cast<int>(tile) % tiles_x_;
    const int ty = static_cast<int>(tile) / tiles_x_;
    const auto& list = tiles_[tile];
    auto& acc = tile_grads[tile];
    acc.assign(list.size(), ScreenGrad{});
    struct Contribution {
      int slot;
      double alpha;
      double transmittance;
      double gauss;
      double dx, dy;
    };
    std::vector<Contribution> contribs;
    for (int py = ty * ts; py < std::min(height_, (ty + 1) * ts); ++py) {
      for (int px = tx * ts; px < std::min(width_, (tx + 1) * ts); ++px) {
        const Vec3 g_c(grad_color.at(px, py, 0), grad_color.at(px, py, 1),
                       grad_color.at(px, py, 2));
        const double g_a = grad_alpha ? grad_alpha->at(px, py, 0) : 0.0;
        if (g_c.isZero(0.0) && g_a == 0.0) continue;
        contribs.clear();
        double t = 1.0;
        for (std::size_t slot = 0; slot < list.size(); ++slot) {
          const Splat& s = splats_[list[slot]];
          if (px < s.x0 || px >= s.x1 || py < s.y0 || py >= s.y1) continue;
          const double dx = px - s.mean.x();
          const double dy = py - s.mean.y();
          const double power = -0.5 * (s.conic_a * dx * dx + s.conic_c * dy * dy) -
                               s.conic_b * dx * dy;
          if (power > 0.0 || power < s.min_power - kPowerMargin) continue;
          const double gauss = std::exp(power);
          const double a = s.opacity * gauss;
          if (a < kMinSplatAlpha) continue;
          const double next_t = t * (1.0 - a);
          if (next_t < kMinTransmittance) break;
          contribs.push_back({static_cast<int>(slot), a, t, gauss, dx, dy});
          t = next_t;
        }
        // Back to front: `behind` is the color composited behind the current
        // splat, `survive` the product of (1 - alpha) behind it.
        Vec3 behind = Vec3::Zero();
        double survive = 1.0;
        for (auto it = contribs.rbegin(); it != contribs.rend(); ++it) {
          const Splat& s = splats_[list[it->slot]];
          ScreenGrad& g = acc[it->slot];
          g.color += it->alpha * it->transmittance * g_c;
          const double d_alpha =
              it->transmittance * (s.color - behind).dot(g_c) +
              g_a * it->transmittance * survive;
          behind = it->alpha * s.color + (1.0 - it->alpha) * behind;
          survive *= 1.0 - it->alpha;

          g.opacity += it->gauss * d_alpha;
          const double d_power = it->alpha * d_alpha;
          const double dx = it->dx, dy = it->dy;
          g.conic_a += -0.5 * dx * dx * d_power;
          g.conic_b += -dx * dy * d_power;
          g.conic_c += -0.5 * dy * dy * d_power;
          g.mean_x += (s.conic_a * dx + s.conic_b * dy) * d_power;
          g.mean_y += (s.conic_b * dx + s.conic_c * dy) * d_power;
        }
      }
    }
  });

  // Fixed tile order keeps the reduction independent of the worker count.
  std::vector<ScreenGrad> screen(splats_.size());
  for (std::size_t tile = 0; tile < tiles_.size(); ++tile) {
    const auto& list = tiles_[tile];
    for (std::size_t slot = 0; slot < list.size(); ++slot) {
      screen[list[slot]].add(tile_grads[tile][slot]);
    }
  }

  CloudGradient out;
  out.params.assign(cloud_.size(), ParamVector{});
  out.mean2d.assign(cloud_.size(), Vec2::Zero());
  out.visible.assign(cloud_.size(), 0);
  for (const auto& list : tiles_) {
    for (int idx : list) out.visible[idx] = 1;
  }
  const Vec3 center = cam_.center();
  const double fx = cam_.intrinsics.fx, fy = cam_.intrinsics.fy;
  const Mat3& w_rot = cam_.rotation;
  parallel_for(cloud_.size(), [&](std::size_t i) {
    if (!splats_[i].active || !out.visible[i]) return;
    const Splat& s = splats_[i];
    const ScreenGrad& sg = screen[i];
    const Gaussian3D& g = cloud_.gaussians[i];
    ParamVector& grad = out.params[i];
    out.mean2d[i] = Vec2(sg.mean_x, sg.mean_y);

    // Opacity through the sigmoid.
    grad[param::kOpacity] = sg.opacity * s.opacity * (1.0 - s.opacity);

    // Color through the clamped SH evaluation.
    const Vec3 offset = g.position - center;
    const double dist = offset.norm();
    const Vec3 dir = offset / dist;
    Vec3 g_color = sg.color;
    for (int ch = 0; ch < 3; ++ch) {
      const double u = s.color_unclamped[ch];
      if (u < 0.0 || u > 1.0) g_color[ch] = 0.0;
    }
    const auto basis = sh_basis(dir);
    const auto basis_grad = sh_basis_gradient(dir);
    Vec3 g_dir = Vec3::Zero();
    for (int k = 0; k < kShCoeffs; ++k) {
      for (int ch = 0; ch < 3; ++ch) {
        grad[param::kSh + 3 * k + ch] = basis[k] * g_color[ch];
      }
      g_dir += basis_grad[k] * g.sh[k].dot(g_color);
    }
    Vec3 g_pos =
        (Mat3::Identity() - dir * dir.transpose()) * g_dir / dist;

    // Conic -> 2D covariance -> 3D covariance and Jacobian.
    const auto parts = projection_parts(g, cam_, opts_.dilation);
    Mat2 conic;
    conic << s.conic_a, s.conic_b, s.conic_b, s.conic_c;
    Mat2 g_conic;
    g_conic << sg.conic_a, 0.5 * sg.conic_b, 0.5 * sg.conic_b, sg.conic_c;
    const Mat2 g_cov2 = -conic * g_conic * conic;
    const Mat23 t_mat = parts.jacobian * w_rot;
    const Mat3 g_cov3 = t_mat.transpose() * g_cov2 * t_mat;
    const Mat23 g_t = 2.0 * g_cov2 * t_mat * parts.cov3d;
    const Mat23 g_j = g_t * w_rot.transpose();

    const double x = parts.cam_pos.x(), y = parts.cam_pos.y(),
                 z = parts.cam_pos.z();
    const double z2 = z * z, z3 = z2 * z;
    Vec3 g_cam = Vec3::Zero();
    g_cam.x() += g_j(0, 2) * (-fx / z2);
    g_cam.y() += g_j(1, 2) * (-fy / z2);
    g_cam.z() += g_j(0, 0) * (-fx / z2) + g_j(0, 2) * (2.0 * fx * x / z3) +
                 g_j(1, 1) * (-fy / z2) + g_j(1, 2) * (2.0 * fy * y / z3);
    // Projected mean.
    g_cam.x() += sg.mean_x * fx / z;
    g_cam.y() += sg.mean_y * fy / z;
    g_cam.z() += -sg.mean_x * fx * x / z2 - sg.mean_y * fy * y / z2;
    g_pos += w_rot.transpose() * g_cam;
    for (int k = 0; k < 3; ++k) grad[param::kPosition + k] = g_pos[k];

    // Sigma = M M^T with M = R diag(s).
    const double q_norm = g.rotation.norm();
    const Vec4 q_hat = g.rotation / q_norm;
    const Mat3 r = quaternion_to_matrix(q_hat);
    const Vec3 scale = g.scale();
    const Mat3 m = r * scale.asDiagonal();
    const Mat3 g_m = 2.0 * g_cov3 * m;
    Mat3 g_r;
    for (int col = 0; col < 3; ++col) {
      double g_s = 0.0;
      for (int row = 0; row < 3; ++row) {
        g_s += g_m(row, col) * r(row, col);
        g_r(row, col) = g_m(row, col) * scale[col];
      }
      grad[param::kLogScale + col] = g_s * scale[col];
    }
    const auto partials = rotation_partials(q_hat);
    Vec4 g_qhat;
    for (int k = 0; k < 4; ++k) g_qhat[k] = (g_r.array() * partials[k].array()).sum();
    const Vec4 g_q = (g_qhat - q_hat * q_hat.dot(g_qhat)) / q_norm;
    for (int k = 0; k < 4; ++k) grad[param::kRotation + k] = g_q[k];
  });
  return out;
}

RenderOutput render(const GaussianCloud& cloud, const Camera& cam, int width,
                    int height, const RenderOptions& opts) {
  return RenderPass(cloud, cam, width, height, opts).output();
}

CloudGradient render_backward(const GaussianCloud& cloud, const Camera& cam,
                              int width, int height, const Image& grad_color,
                              const Image* grad_alpha,
                              const RenderOptions& opts) {
  RenderPass pass(cloud, cam, width, height, opts);
  return pass.backward(grad_color, grad_alpha);
}

Image composite_over(const RenderOutput& out, const Vec3& background) {
  Image img = out.color;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double t = 1.0 - out.alpha.at(x, y, 0);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) += t * background[c];
    }
  }
  return img;
}

}  // namespace zp3
