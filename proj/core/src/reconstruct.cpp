// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/reconstruct.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include "zp3/error.hpp"
#include "zp3/sh.hpp"

namespace zp3 {
namespace {

// Point closest (least squares) to all optical axes, if well conditioned.
std::optional<Vec3> axes_focus(const std::vector<Observation>& obs) {
  if (obs.size() < 2) return std::nullopt;
  Mat3 a = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (const auto& o : obs) {
    const Vec3 d = o.camera.forward();
    const Mat3 p = Mat3::Identity() - d * d.transpose();
    a += p;
    b += p * o.camera.center();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(a);
  if (eig.eigenvalues().minCoeff() < 1e-3 * static_cast<double>(obs.size())) {
    return std::nullopt;
  }
  return Vec3(a.ldlt().solve(b));
}

struct LossEval {
  double value = 0.0;
  Image grad_color;
  Image grad_alpha;
};

LossEval evaluate_loss(const RenderOutput& out, const TrainingView& view,
                       const TrainOptions& opts, const LossSpec& spec) {
  const Image rendered = composite_over(out, opts.background);
  LossEval e;
  const int ch = 3;
  const std::size_t pixels = rendered.pixel_count();
  Image grad_r;
  if (spec.kind == PhotometricLoss::kMaskedL2) {
    double msum = 0.0;
    for (double m : view.mask.values()) msum += m;
    const double denom = std::max(msum, 1.0) * ch;
    grad_r = Image(rendered.width(), rendered.height(), ch);
    for (std::size_t p = 0; p < pixels; ++p) {
      const double m = view.mask[p];
      if (m == 0.0) continue;
      for (int c = 0; c < ch; ++c) {
        const std::size_t i = p * ch + c;
        const double d = rendered[i] - view.target[i];
        e.value += m * d * d / denom;
        grad_r[i] = 2.0 * m * d / denom;
      }
    }
  } else {
    LossResult r = composite_loss(rendered, view.target, view.mask, spec.lambda,
                                  spec.perceptual, spec.bridge);
    e.value = r.value;
    grad_r = std::move(r.grad);
  }
  e.grad_color = grad_r;
  e.grad_alpha = Image(rendered.width(), rendered.height(), 1);
  for (std::size_t p = 0; p < pixels; ++p) {
    double g = 0.0;
    for (int c = 0; c < ch; ++c) g -= grad_r[p * ch + c] * opts.background[c];
    e.grad_alpha[p] = g;
  }
  if (view.alpha_supervision && opts.alpha_weight > 0.0) {
    const double scale = opts.alpha_weight / static_cast<double>(pixels);
    for (std::size_t p = 0; p < pixels; ++p) {
      const double d = out.alpha[p] - view.mask[p];
      e.value += scale * d * d;
      e.grad_alpha[p] += 2.0 * scale * d;
    }
  }
  if (view.weight != 1.0) {
    e.value *= view.weight;
    for (double& v : e.grad_color.values()) v *= view.weight;
    for (double& v : e.grad_alpha.values()) v *= view.weight;
  }
  return e;
}

}  // namespace

void validate(const Observation& obs) {
  if (obs.image.channels() != 3) {
    throw InvalidArgument("observation image must have 3 channels");
  }
  if (obs.mask.width() != obs.image.width() ||
      obs.mask.height() != obs.image.height() || obs.mask.channels() != 1) {
    throw InvalidArgument("observation mask must be H x W x 1 matching the image");
  }
  for (double m : obs.mask.values()) {
    if (m != 0.0 && m != 1.0) throw InvalidArgument("observation mask must be binary");
  }
  validate(obs.camera);
}

GaussianCloud init_cloud(const std::vector<Observation>& observations,
                         int n_points, std::uint64_t seed,
                         const InitOptions& opts) {
  if (observations.empty()) throw InvalidArgument("init_cloud needs observations");
  if (n_points < 1) throw InvalidArgument("init_cloud needs n_points >= 1");
  std::vector<std::vector<int>> fg(observations.size());
  std::vector<int> usable;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    validate(observations[i]);
    const Image& m = observations[i].mask;
    for (std::size_t p = 0; p < m.size(); ++p) {
      if (m[p] > 0.5) fg[i].push_back(static_cast<int>(p));
    }
    if (!fg[i].empty()) usable.push_back(static_cast<int>(i));
  }
  if (usable.empty()) throw InvalidArgument("init_cloud: all masks are empty");

  const auto focus = axes_focus(observations);
  std::vector<double> mid_depth(observations.size());
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const Camera& cam = observations[i].camera;
    double d = cam.focus_distance;
    if (focus) {
      const double along = (*focus - cam.center()).dot(cam.forward());
      if (along > 0.0) d = along;
    }
    mid_depth[i] = d;
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GaussianCloud cloud;
  cloud.gaussians.reserve(static_cast<std::size_t>(n_points));
  for (int n = 0; n < n_points; ++n) {
    const int oi = usable[static_cast<std::size_t>(unit(rng) * usable.size()) %
                          usable.size()];
    const Observation& o = observations[oi];
    const auto& pix = fg[oi];
    const int p = pix[static_cast<std::size_t>(unit(rng) * pix.size()) % pix.size()];
    const int px = p % o.image.width(), py = p / o.image.width();
    const double u = px + unit(rng) - 0.5;
    const double v = py + unit(rng) - 0.5;
    const double z =
        mid_depth[oi] * (1.0 + opts.depth_jitter * (2.0 * unit(rng) - 1.0));
    const Intrinsics& k = o.camera.intrinsics;
    const Vec3 pc((u - k.cx) / k.fx * z, (v - k.cy) / k.fy * z, z);
    const Vec3 world = o.camera.rotation.transpose() * (pc - o.camera.translation);
    const Vec3 rgb(o.image.at(px, py, 0), o.image.at(px, py, 1),
                   o.image.at(px, py, 2));
    cloud.gaussians.push_back(make_gaussian(world, Vec3::Ones(),
                                            Vec4(1, 0, 0, 0), opts.opacity, rgb));
  }

  // Isotropic scale from the mean distance to the nearest neighbors.
  const std::size_t count = cloud.size();
  const int k_nn = std::max(1, std::min<int>(opts.neighbors, static_cast<int>(count) - 1));
  std::vector<double> scale(count, 0.01);
  if (count > 1) {
    std::vector<double> dist(count);
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) {
        dist[j] = (cloud.gaussians[i].position - cloud.gaussians[j].position)
                      .squaredNorm();
      }
      dist[i] = std::numeric_limits<double>::infinity();
      std::partial_sort(dist.begin(), dist.begin() + k_nn, dist.end());
      double s = 0.0;
      for (int k = 0; k < k_nn; ++k) s += std::sqrt(dist[k]);
      scale[i] = std::max(s / k_nn, 1e-4);
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    cloud.gaussians[i].log_scale = Vec3::Constant(std::log(scale[i]));
  }
  return cloud;
}

void validate(const TrainOptions& opts, int steps) {
  if (steps < 1) throw InvalidArgument("optimization needs steps >= 1");
  if (opts.densify_interval < 1) {
    throw InvalidArgument("densify interval must be >= 1");
  }
  if (opts.alpha_weight < 0.0) throw InvalidArgument("alpha weight must be >= 0");
  if (!(opts.prune_opacity >= 0.0 && opts.prune_opacity < 1.0)) {
    throw InvalidArgument("prune opacity must be in [0, 1)");
  }
  validate(opts.lr);
}

double estimate_scene_extent(const std::vector<Camera>& cameras) {
  if (cameras.empty()) throw InvalidArgument("no cameras for scene extent");
  Vec3 mean = Vec3::Zero();
  double focus = 0.0;
  for (const auto& c : cameras) {
    mean += c.center();
    focus += c.focus_distance;
  }
  mean /= static_cast<double>(cameras.size());
  focus /= static_cast<double>(cameras.size());
  double spread = 0.0;
  for (const auto& c : cameras) spread = std::max(spread, (c.center() - mean).norm());
  return std::max(1.1 * spread, 0.5 * focus);
}

std::vector<TrainingView> training_views(const std::vector<Observation>& obs,
                                         const Vec3& background) {
  std::vector<TrainingView> views;
  for (const auto& o : obs) {
    validate(o);
    TrainingView v;
    v.target = o.image;
    for (std::size_t p = 0; p < o.mask.size(); ++p) {
      const double m = o.mask[p];
      for (int c = 0; c < 3; ++c) {
        v.target[p * 3 + c] = m * o.image[p * 3 + c] + (1.0 - m) * background[c];
      }
    }
    v.mask = o.mask;
    v.camera = o.camera;
    views.push_back(std::move(v));
  }
  return views;
}

FitResult optimize_views(GaussianCloud cloud,
                         const std::vector<TrainingView>& views, int steps,
                         const TrainOptions& opts, const LossSpec& loss,
                         std::uint64_t seed) {
  validate(opts, steps);
  if (views.empty()) throw InvalidArgument("optimization needs training views");
  validate(cloud);
  std::vector<Camera> cams;
  for (const auto& v : views) cams.push_back(v.camera);
  double extent = opts.scene_extent;
  if (!(extent > 0.0)) extent = estimate_scene_extent(cams);

  AdamOptimizer adam(opts.lr, extent, steps);
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(views.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();

  std::vector<double> grad_accum(cloud.size(), 0.0);
  std::vector<int> grad_count(cloud.size(), 0);
  DensifyOptions densify_opts = opts.densify;
  if (!(densify_opts.scene_extent > 0.0)) densify_opts.scene_extent = extent;

  FitResult result;
  result.losses.reserve(static_cast<std::size_t>(steps));
  for (int step = 1; step <= steps; ++step) {
    if (cursor == order.size()) {
      std::shuffle(order.begin(), order.end(), rng);
      cursor = 0;
    }
    const TrainingView& view = views[order[cursor++]];
    const int w = view.target.width(), h = view.target.height();
    RenderPass pass(cloud, view.camera, w, h, opts.render);
    const LossEval e = evaluate_loss(pass.output(), view, opts, loss);
    if (!std::isfinite(e.value)) {
      throw OptimizationFailure("loss became non-finite at step " +
                                std::to_string(step));
    }
    result.losses.push_back(e.value);
    const CloudGradient g = pass.backward(e.grad_color, &e.grad_alpha);
    for (std::size_t j = 0; j < cloud.size(); ++j) {
      if (!g.visible[j]) continue;
      grad_accum[j] += Vec2(g.mean2d[j].x() * 0.5 * w, g.mean2d[j].y() * 0.5 * h).norm();
      grad_count[j] += 1;
    }
    adam.step(cloud, g.params);

    if (step % opts.densify_interval != 0 || step == steps) continue;
    DensityResult rewritten;
    bool changed = false;
    if (step >= opts.densify_from && step <= opts.densify_until &&
        cloud.size() < opts.max_gaussians) {
      std::vector<double> stats(cloud.size(), 0.0);
      for (std::size_t j = 0; j < cloud.size(); ++j) {
        if (grad_count[j] > 0) stats[j] = grad_accum[j] / grad_count[j];
      }
      densify_opts.seed = seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(step));
      rewritten = densify(cloud, stats, densify_opts);
      changed = true;
    } else {
      rewritten.cloud = cloud;
      rewritten.origin.resize(cloud.size());
      std::iota(rewritten.origin.begin(), rewritten.origin.end(), 0);
    }
    const DensityResult pruned = prune(rewritten.cloud, opts.prune_opacity);
    if (pruned.cloud.empty()) {
      throw OptimizationFailure("pruning removed every Gaussian at step " +
                                std::to_string(step));
    }
    if (!changed && pruned.cloud.size() == cloud.size()) continue;
    std::vector<int> origin(pruned.origin.size());
    for (std::size_t j = 0; j < origin.size(); ++j) {
      origin[j] = rewritten.origin[pruned.origin[j]];
    }
    adam.remap(origin);
    cloud = pruned.cloud;
    grad_accum.assign(cloud.size(), 0.0);
    grad_count.assign(cloud.size(), 0);
  }
  result.cloud = std::move(cloud);
  return result;
}

FitResult coarse_fit(const GaussianCloud& cloud,
                     const std::vector<Observation>& observations, int steps,
                     const TrainOptions& opts, std::uint64_t seed) {
  if (observations.empty()) throw InvalidArgument("coarse_fit needs observations");
  LossSpec spec;
  spec.kind = PhotometricLoss::kMaskedL2;
  return optimize_views(cloud, training_views(observations, opts.background),
                        steps, opts, spec, seed);
}

}  // namespace zp3
