// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "zp3/error.hpp"

namespace zp3 {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-15;

}  // namespace

void validate(const LearningRates& lr) {
  for (double v : {lr.position, lr.position_final, lr.scale, lr.rotation,
                   lr.opacity, lr.sh_dc, lr.sh_rest}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("learning rates must be finite and >= 0");
    }
  }
}

AdamOptimizer::AdamOptimizer(LearningRates lr, double scene_extent,
                             int decay_steps)
    : lr_(lr), extent_(scene_extent), decay_steps_(std::max(1, decay_steps)) {
  validate(lr_);
  if (!(scene_extent > 0.0)) {
    throw InvalidArgument("optimizer scene extent must be > 0");
  }
}

double AdamOptimizer::position_lr() const {
  const double t = std::min(1.0, static_cast<double>(iterations_) / decay_steps_);
  if (lr_.position <= 0.0 || lr_.position_final <= 0.0) {
    return lr_.position * extent_;
  }
  return extent_ * std::exp((1.0 - t) * std::log(lr_.position) +
                            t * std::log(lr_.position_final));
}

void AdamOptimizer::step(GaussianCloud& cloud,
                         const std::vector<ParamVector>& grads) {
  if (grads.size() != cloud.size()) {
    throw InvalidArgument("optimizer: gradient count does not match cloud");
  }
  if (m_.size() < cloud.size()) {
    m_.resize(cloud.size(), ParamVector{});
    v_.resize(cloud.size(), ParamVector{});
  }
  const double pos_lr = position_lr();
  ++iterations_;
  const double bc1 = 1.0 - std::pow(kBeta1, iterations_);
  const double bc2 = 1.0 - std::pow(kBeta2, iterations_);
  std::array<double, kGaussianParams> rate{};
  for (int i = 0; i < kGaussianParams; ++i) {
    if (i < param::kLogScale) {
      rate[i] = pos_lr;
    } else if (i < param::kRotation) {
      rate[i] = lr_.scale;
    } else if (i < param::kOpacity) {
      rate[i] = lr_.rotation;
    } else if (i == param::kOpacity) {
      rate[i] = lr_.opacity;
    } else if (i < param::kSh + 3) {
      rate[i] = lr_.sh_dc;
    } else {
      rate[i] = lr_.sh_rest;
    }
  }
  for (std::size_t j = 0; j < cloud.size(); ++j) {
    ParamVector p = cloud.gaussians[j].params();
    ParamVector& m = m_[j];
    ParamVector& v = v_[j];
    for (int i = 0; i < kGaussianParams; ++i) {
      const double g = grads[j][i];
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g;
      v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g * g;
      p[i] -= rate[i] * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kEps);
    }
    cloud.gaussians[j].set_params(p);
    Vec4& q = cloud.gaussians[j].rotation;
    const double n = q.norm();
    q = n > 0.0 ? Vec4(q / n) : Vec4(1.0, 0.0, 0.0, 0.0);
  }
}

void AdamOptimizer::remap(const std::vector<int>& origin) {
  std::vector<ParamVector> m(origin.size(), ParamVector{});
  std::vector<ParamVector> v(origin.size(), ParamVector{});
  std::vector<char> used(m_.size(), 0);
  for (std::size_t j = 0; j < origin.size(); ++j) {
    const int o = origin[j];
    if (o < 0) throw InvalidArgument("optimizer remap: negative origin");
    if (static_cast<std::size_t>(o) >= m_.size() || used[o]) continue;
    used[o] = 1;
    m[j] = m_[o];
    v[j] = v_[o];
  }
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace zp3
