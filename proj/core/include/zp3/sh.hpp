// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "zp3/gaussian.hpp"

namespace zp3 {

inline constexpr double kShC0 = 0.28209479177387814;
inline constexpr double kShC1 = 0.4886025119029199;
inline constexpr std::array<double, 5> kShC2 = {
    1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
    -1.0925484305920792, 0.5462742152960396};

/// Real SH basis, degrees 0..2, at a unit direction.
std::array<double, kShCoeffs> sh_basis(const Vec3& dir);

/// d basis_k / d dir, treating the direction components as free variables.
std::array<Vec3, kShCoeffs> sh_basis_gradient(const Vec3& dir);

struct ShColor {
  Vec3 rgb;            // clamped to [0, 1]
  Vec3 unclamped;      // basis . coeffs + 0.5
};

/// View-dependent color: basis . coeffs + 0.5, clamped to [0, 1].
ShColor sh_eval(const std::array<Vec3, kShCoeffs>& coeffs, const Vec3& dir);

}  // namespace zp3
