// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zp3/gaussian.hpp"

namespace zp3 {

inline constexpr std::uint32_t kCloudFormatVersion = 1;

/// "ZP3G" binary cloud: u32 version, u32 count, then per Gaussian 3 f32
/// position, 3 f32 log-scale, 4 f32 quaternion (w, x, y, z), f32 opacity
/// logit and 27 f32 SH values (coefficient-major, RGB inner). Little endian.
std::vector<std::uint8_t> encode_cloud(const GaussianCloud& cloud);
GaussianCloud decode_cloud(const std::vector<std::uint8_t>& bytes);

void write_cloud(const std::string& path, const GaussianCloud& cloud);
GaussianCloud read_cloud(const std::string& path);

/// Binary little-endian PLY with the property layout used by common 3DGS
/// viewers (f_dc_*, f_rest_* channel-major, opacity, scale_*, rot_*).
void export_ply(const std::string& path, const GaussianCloud& cloud);

}  // namespace zp3
