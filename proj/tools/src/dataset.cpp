// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3app/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "zp3/error.hpp"
#include "zp3app/png_io.hpp"

namespace zp3app {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

DatasetMeta read_meta(const fs::path& path) {
  DatasetMeta meta;
  if (!fs::exists(path)) throw zp3::InvalidArgument("dataset has no meta.json");
  std::ifstream in(path);
  json j;
  try {
    in >> j;
    const auto& range = j.at("observed_range");
    meta.observed_start = range.at(0).get<double>();
    meta.observed_end = range.at(1).get<double>();
    if (j.contains("elevations")) meta.elevations = j["elevations"].get<std::vector<double>>();
    if (j.contains("scene_scale")) meta.scene_scale = j["scene_scale"].get<double>();
    if (j.contains("target")) {
      const auto t = j["target"].get<std::vector<double>>();
      if (t.size() != 3) throw zp3::InvalidArgument("meta.json target needs 3 values");
      meta.target = zp3::Vec3(t[0], t[1], t[2]);
    }
  } catch (const json::exception& e) {
    throw zp3::InvalidArgument(std::string("bad meta.json: ") + e.what());
  }
  const double span = meta.observed_end - meta.observed_start;
  if (!(span > 0.0 && span <= 360.0)) {
    throw zp3::InvalidArgument("meta.json observed_range span must be in (0, 360]");
  }
  return meta;
}

}  // namespace

Dataset load_dataset(const std::string& root) {
  const fs::path base(root);
  if (!fs::is_directory(base)) throw zp3::InvalidArgument("dataset not found: " + root);
  Dataset ds;
  ds.root = root;
  ds.meta = read_meta(base / "meta.json");
  if (!fs::exists(base / "poses.json")) {
    throw zp3::InvalidArgument("dataset has no poses.json");
  }
  std::map<std::string, zp3::Camera> poses;
  for (const auto& p : zp3::read_pose_file((base / "poses.json").string())) {
    poses[fs::path(p.file).stem().string()] = p.camera;
  }
  std::vector<std::string> stems;
  if (!fs::is_directory(base / "images")) {
    throw zp3::InvalidArgument("dataset has no images/ directory");
  }
  for (const auto& e : fs::directory_iterator(base / "images")) {
    if (e.path().extension() == ".png") stems.push_back(e.path().stem().string());
  }
  std::sort(stems.begin(), stems.end());
  if (stems.empty()) throw zp3::InvalidArgument("dataset has no images");
  for (const auto& stem : stems) {
    const fs::path mask_path = base / "masks" / (stem + ".png");
    if (!fs::exists(mask_path)) {
      throw zp3::InvalidArgument("missing mask for image '" + stem + "'");
    }
    auto pose = poses.find(stem);
    if (pose == poses.end()) {
      throw zp3::InvalidArgument("missing pose for image '" + stem + "'");
    }
    zp3::Observation obs;
    obs.id = stem;
    obs.image = read_png((base / "images" / (stem + ".png")).string());
    if (obs.image.channels() != 3) {
      throw zp3::InvalidArgument("image '" + stem + "' is not RGB");
    }
    const zp3::Image raw_mask = read_png(mask_path.string());
    if (raw_mask.width() != obs.image.width() ||
        raw_mask.height() != obs.image.height()) {
      throw zp3::InvalidArgument("mask size differs from image '" + stem + "'");
    }
    obs.mask = zp3::Image(raw_mask.width(), raw_mask.height(), 1);
    for (std::size_t p = 0; p < raw_mask.pixel_count(); ++p) {
      obs.mask[p] = raw_mask[p * raw_mask.channels()] > 0.5 ? 1.0 : 0.0;
    }
    obs.camera = pose->second;
    obs.view_spec = zp3::view_spec_from_camera(obs.camera, ds.meta.target);
    zp3::validate(obs);
    ds.views.push_back(std::move(obs));
  }
  return ds;
}

void write_dataset(const std::string& root,
                   const std::vector<zp3::Observation>& views,
                   const DatasetMeta& meta) {
  const fs::path base(root);
  std::error_code ec;
  fs::create_directories(base / "images", ec);
  fs::create_directories(base / "masks", ec);
  if (!fs::is_directory(base / "images") || !fs::is_directory(base / "masks")) {
    throw zp3::IoError("cannot create dataset directories under " + root);
  }
  std::vector<zp3::PoseEntry> poses;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const auto& v = views[i];
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%03zu", i);
    const std::string stem = v.id.empty() ? buf : v.id;
    write_png((base / "images" / (stem + ".png")).string(), v.image);
    write_png((base / "masks" / (stem + ".png")).string(), v.mask);
    poses.push_back({stem + ".png", v.camera});
  }
  zp3::write_pose_file((base / "poses.json").string(), poses);
  json j;
  j["observed_range"] = {meta.observed_start, meta.observed_end};
  j["elevations"] = meta.elevations;
  j["scene_scale"] = meta.scene_scale;
  j["target"] = {meta.target[0], meta.target[1], meta.target[2]};
  std::ofstream out(base / "meta.json");
  if (!out) throw zp3::IoError("cannot write meta.json under " + root);
  out << j.dump(2) << "\n";
}

}  // namespace zp3app
