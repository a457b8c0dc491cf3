// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <array>
#include <span>
#include <vector>

#include "zp3/views.hpp"

namespace zp3 {

using Vec4 = Eigen::Vector4d;

inline constexpr int kShCoeffs = 9;  // degrees 0..2
inline constexpr int kGaussianParams = 3 + 3 + 4 + 1 + kShCoeffs * 3;

/// Offsets of each parameter group inside the flat 38-value layout used by
/// the optimizer and by gradients.
namespace param {
inline constexpr int kPosition = 0;
inline constexpr int kLogScale = 3;
inline constexpr int kRotation = 6;
inline constexpr int kOpacity = 10;
inline constexpr int kSh = 11;
}  // namespace param

using ParamVector = std::array<double, kGaussianParams>;
using ShCoeffs = std::array<Vec3, kShCoeffs>;

// Eigen vectors are not zeroed by default construction.
inline ShCoeffs zero_sh() {
  ShCoeffs sh;
  sh.fill(Vec3::Zero());
  return sh;
}

/// One anisotropic Gaussian. Scale is stored as log, opacity as logit and
/// the rotation as a (w, x, y, z) quaternion kept at unit norm.
struct Gaussian3D {
  Vec3 position = Vec3::Zero();
  Vec3 log_scale = Vec3::Zero();
  Vec4 rotation = Vec4(1.0, 0.0, 0.0, 0.0);
  double opacity_logit = 0.0;
  /// sh[k] holds the RGB coefficients of real SH basis function k.
  ShCoeffs sh = zero_sh();

  Vec3 scale() const { return log_scale.array().exp(); }
  double opacity() const;

  ParamVector params() const;
  void set_params(const ParamVector& p);
};

double sigmoid(double x);
double logit(double p);

/// Builds a Gaussian from natural parameters; `rgb` sets the DC term so a
/// degree-0 evaluation reproduces it.
Gaussian3D make_gaussian(const Vec3& position, const Vec3& scale,
                         const Vec4& rotation, double opacity, const Vec3& rgb);

/// Rotation matrix of a (w, x, y, z) quaternion, normalized first.
Mat3 quaternion_to_matrix(const Vec4& q);

/// Sigma = R diag(s^2) R^T.
Mat3 covariance(const Gaussian3D& g);

/// Throws InvalidArgument when |q| deviates from 1 by more than 1e-6 or a
/// value is not finite.
void validate(const Gaussian3D& g);

struct Aabb {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
};

struct GaussianCloud {
  std::vector<Gaussian3D> gaussians;

  std::size_t size() const { return gaussians.size(); }
  bool empty() const { return gaussians.empty(); }
  Aabb bounds() const;
  /// Radius of the bounding sphere of positions about their mean.
  double extent() const;
};

void validate(const GaussianCloud& cloud);

/// Renormalizes every quaternion to unit length.
void normalize_rotations(GaussianCloud& cloud);

}  // namespace zp3
