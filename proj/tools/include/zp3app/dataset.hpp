// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "zp3/reconstruct.hpp"

namespace zp3app {

struct DatasetMeta {
  double observed_start = 0.0;
  double observed_end = 90.0;
  std::vector<double> elevations = {0.0};
  double scene_scale = 1.0;
  zp3::Vec3 target = zp3::Vec3::Zero();
};

/// On-disk layout: images/<stem>.png, masks/<stem>.png, poses.json (file
/// names relative to images/) and meta.json.
struct Dataset {
  std::string root;
  std::vector<zp3::Observation> views;
  DatasetMeta meta;
};

/// Throws zp3::InvalidArgument naming the offending stem when an image
/// lacks a mask or pose, and zp3::IoError on unreadable files.
Dataset load_dataset(const std::string& root);

void write_dataset(const std::string& root,
                   const std::vector<zp3::Observation>& views,
                   const DatasetMeta& meta);

}  // namespace zp3app
