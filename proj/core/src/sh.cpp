// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/sh.hpp"

namespace zp3 {

std::array<double, kShCoeffs> sh_basis(const Vec3& dir) {
  const double x = dir.x(), y = dir.y(), z = dir.z();
  return {kShC0,
          -kShC1 * y,
          kShC1 * z,
          -kShC1 * x,
          kShC2[0] * x * y,
          kShC2[1] * y * z,
          kShC2[2] * (2.0 * z * z - x * x - y * y),
          kShC2[3] * x * z,
          kShC2[4] * (x * x - y * y)};
}

std::array<Vec3, kShCoeffs> sh_basis_gradient(const Vec3& dir) {
  const double x = dir.x(), y = dir.y(), z = dir.z();
  return {Vec3::Zero(),
          Vec3(0.0, -kShC1, 0.0),
          Vec3(0.0, 0.0, kShC1),
          Vec3(-kShC1, 0.0, 0.0),
          Vec3(kShC2[0] * y, kShC2[0] * x, 0.0),
          Vec3(0.0, kShC2[1] * z, kShC2[1] * y),
          Vec3(-2.0 * kShC2[2] * x, -2.0 * kShC2[2] * y, 4.0 * kShC2[2] * z),
          Vec3(kShC2[3] * z, 0.0, kShC2[3] * x),
          Vec3(2.0 * kShC2[4] * x, -2.0 * kShC2[4] * y, 0.0)};
}

ShColor sh_eval(const std::array<Vec3, kShCoeffs>& coeffs, const Vec3& dir) {
  const auto basis = sh_basis(dir);
  Vec3 acc = Vec3::Constant(0.5);
  for (int k = 0; k < kShCoeffs; ++k) acc += basis[k] * coeffs[k];
  return {acc.cwiseMax(0.0).cwiseMin(1.0), acc};
}

}  // namespace zp3
