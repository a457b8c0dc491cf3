// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/gaussian.hpp"

#include <cmath>
#include <limits>

#include "zp3/error.hpp"
#include "zp3/sh.hpp"

namespace zp3 {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("logit needs p in (0, 1)");
  return std::log(p / (1.0 - p));
}

double Gaussian3D::opacity() const { return sigmoid(opacity_logit); }

ParamVector Gaussian3D::params() const {
  ParamVector p{};
  for (int i = 0; i < 3; ++i) {
    p[param::kPosition + i] = position[i];
    p[param::kLogScale + i] = log_scale[i];
  }
  for (int i = 0; i < 4; ++i) p[param::kRotation + i] = rotation[i];
  p[param::kOpacity] = opacity_logit;
  for (int k = 0; k < kShCoeffs; ++k) {
    for (int c = 0; c < 3; ++c) p[param::kSh + 3 * k + c] = sh[k][c];
  }
  return p;
}

void Gaussian3D::set_params(const ParamVector& p) {
  for (int i = 0; i < 3; ++i) {
    position[i] = p[param::kPosition + i];
    log_scale[i] = p[param::kLogScale + i];
  }
  for (int i = 0; i < 4; ++i) rotation[i] = p[param::kRotation + i];
  opacity_logit = p[param::kOpacity];
  for (int k = 0; k < kShCoeffs; ++k) {
    for (int c = 0; c < 3; ++c) sh[k][c] = p[param::kSh + 3 * k + c];
  }
}

Gaussian3D make_gaussian(const Vec3& position, const Vec3& scale,
                         const Vec4& rotation, double opacity,
                         const Vec3& rgb) {
  if ((scale.array() <= 0.0).any()) {
    throw InvalidArgument("Gaussian scales must be > 0");
  }
  if (rotation.norm() == 0.0) throw InvalidArgument("zero quaternion");
  Gaussian3D g;
  g.position = position;
  g.log_scale = scale.array().log();
  g.rotation = rotation.normalized();
  g.opacity_logit = logit(opacity);
  g.sh[0] = (rgb.array() - 0.5) / kShC0;
  return g;
}

Mat3 quaternion_to_matrix(const Vec4& q_raw) {
  const Vec4 q = q_raw.normalized();
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Mat3 covariance(const Gaussian3D& g) {
  const Mat3 r = quaternion_to_matrix(g.rotation);
  const Vec3 s = g.scale();
  const Mat3 m = r * s.asDiagonal();
  return m * m.transpose();
}

void validate(const Gaussian3D& g) {
  if (std::abs(g.rotation.norm() - 1.0) > 1e-6) {
    throw InvalidArgument("Gaussian quaternion is not unit length");
  }
  const ParamVector p = g.params();
  for (double v : p) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite Gaussian parameter");
  }
}

Aabb GaussianCloud::bounds() const {
  Aabb box;
  if (gaussians.empty()) return box;
  box.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  box.hi = -box.lo;
  for (const auto& g : gaussians) {
    box.lo = box.lo.cwiseMin(g.position);
    box.hi = box.hi.cwiseMax(g.position);
  }
  return box;
}

double GaussianCloud::extent() const {
  if (gaussians.empty()) return 0.0;
  Vec3 mean = Vec3::Zero();
  for (const auto& g : gaussians) mean += g.position;
  mean /= static_cast<double>(gaussians.size());
  double r = 0.0;
  for (const auto& g : gaussians) r = std::max(r, (g.position - mean).norm());
  return r;
}

void validate(const GaussianCloud& cloud) {
  for (const auto& g : cloud.gaussians) validate(g);
}

void normalize_rotations(GaussianCloud& cloud) {
  for (auto& g : cloud.gaussians) {
    const double n = g.rotation.norm();
    if (n > 0.0) {
      g.rotation /= n;
    } else {
      g.rotation = Vec4(1.0, 0.0, 0.0, 0.0);
    }
  }
}

}  // namespace zp3
