// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "zp3/image.hpp"

namespace zp3app {

/// Reads an 8- or 16-bit PNG into a pixel-domain image with 1 (gray) or 3
/// (RGB) channels; alpha is dropped.
zp3::Image read_png(const std::string& path);

/// Writes an 8-bit PNG (1 or 3 channels, values clamped to [0, 1]) without
/// time chunks, so equal images give equal bytes.
void write_png(const std::string& path, const zp3::Image& image);

}  // namespace zp3app
