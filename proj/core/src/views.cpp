// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#include "zp3/views.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "zp3/error.hpp"

namespace zp3 {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

}  // namespace

void validate(const Camera& camera) {
  if (!(camera.intrinsics.fx > 0.0) || !(camera.intrinsics.fy > 0.0)) {
    throw InvalidArgument("camera focal lengths must be positive");
  }
  const Mat3& r = camera.rotation;
  if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-6 ||
      std::abs(r.determinant() - 1.0) > 1e-6) {
    throw InvalidArgument("camera rotation must be orthonormal with det +1");
  }
}

double normalize_degrees(double degrees) {
  double d = std::fmod(degrees, 360.0);
  if (d < 0.0) d += 360.0;
  if (d >= 360.0) d -= 360.0;
  return d;
}

double angular_distance(double a_deg, double b_deg) {
  double d = normalize_degrees(a_deg - b_deg);
  return d > 180.0 ? 360.0 - d : d;
}

void validate(const ViewSpec& spec) {
  if (!(spec.radius > 0.0)) throw InvalidArgument("view radius must be > 0");
  if (spec.elevation < -90.0 || spec.elevation > 90.0) {
    throw InvalidArgument("view elevation must lie in [-90, 90]");
  }
  if (!std::isfinite(spec.azimuth)) {
    throw InvalidArgument("view azimuth must be finite");
  }
}

Camera camera_from_spec(const ViewSpec& spec, const Intrinsics& intrinsics) {
  validate(spec);
  const double az = spec.azimuth * kDeg;
  const double el = spec.elevation * kDeg;
  const Vec3 offset(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
                    std::sin(el));
  const Vec3 position = spec.target + spec.radius * offset;
  Vec3 forward = spec.target - position;
  if (forward.norm() < 1e-12) {
    throw InvalidArgument("degenerate look-at: camera sits on its target");
  }
  forward.normalize();
  Vec3 up = Vec3::UnitZ();
  if (forward.cross(up).norm() < 1e-9) {
    // Looking straight up or down; fall back to the azimuth direction.
    up = Vec3(std::cos(az), std::sin(az), 0.0) * (spec.elevation > 0 ? 1 : -1);
  }
  const Vec3 right = forward.cross(up).normalized();
  const Vec3 down = forward.cross(right);

  Camera cam;
  cam.intrinsics = intrinsics;
  cam.rotation.row(0) = right.transpose();
  cam.rotation.row(1) = down.transpose();
  cam.rotation.row(2) = forward.transpose();
  cam.translation = -cam.rotation * position;
  cam.focus_distance = spec.radius;
  validate(cam);
  return cam;
}

ViewSpec view_spec_from_camera(const Camera& camera, const Vec3& target) {
  const Vec3 offset = camera.center() - target;
  ViewSpec spec;
  spec.target = target;
  spec.radius = offset.norm();
  if (spec.radius <= 0.0) {
    throw InvalidArgument("camera center coincides with the target");
  }
  spec.azimuth = normalize_degrees(std::atan2(offset.y(), offset.x()) / kDeg);
  spec.elevation =
      std::asin(std::clamp(offset.z() / spec.radius, -1.0, 1.0)) / kDeg;
  return spec;
}

Camera far_field_adapt(const Camera& camera, double factor) {
  if (!(factor >= 1.0)) {
    throw InvalidArgument("far-field factor must be >= 1");
  }
  Camera out = camera;
  const double shift = (factor - 1.0) * camera.focus_distance;
  // Moving the center back along -forward adds `shift` to every camera z.
  out.translation.z() += shift;
  out.intrinsics.fx *= factor;
  out.intrinsics.fy *= factor;
  out.focus_distance = camera.focus_distance * factor;
  if (factor > 1.0) out.projection = Projection::kFarField;
  return out;
}

double classify_view(const ViewSpec& candidate, double reference_azimuth,
                     const ViewClassThresholds& thresholds) {
  const double d = angular_distance(candidate.azimuth, reference_azimuth);
  if (d <= thresholds.frontal_max) return thresholds.frontal_weight;
  if (d >= thresholds.back_min) return thresholds.back_weight;
  return thresholds.side_weight;
}

std::vector<ViewSpec> make_input_set(double range_start, double range_end,
                                     int count, double radius,
                                     const Vec3& target) {
  if (count != 2 && count != 3) {
    throw InvalidArgument("input set size must be 2 or 3");
  }
  double span = normalize_degrees(range_end - range_start);
  if (span == 0.0 && range_end != range_start) span = 360.0;
  constexpr double kSeparation = 45.0;
  if (span + 1e-9 < (count - 1) * kSeparation) {
    throw InvalidArgument("visible range too narrow for the requested input set");
  }
  const double center = range_start + 0.5 * span;
  std::vector<ViewSpec> views;
  for (int i = 0; i < count; ++i) {
    ViewSpec v;
    v.azimuth =
        normalize_degrees(center + (i - 0.5 * (count - 1)) * kSeparation);
    v.elevation = 0.0;
    v.radius = radius;
    v.target = target;
    views.push_back(v);
  }
  return views;
}

double plan_base_angle(double theta0, double delta_e, int k,
                       PlanStrategy strategy) {
  if (strategy == PlanStrategy::kMonotone) return theta0 + k * delta_e;
  const int magnitude = (k + 1) / 2;  // ceil(k / 2)
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return theta0 + sign * magnitude * delta_e;
}

RotationPlan make_rotation_plan(double theta0, double delta_theta,
                                double delta_e, int iterations, int batch_size,
                                const std::vector<double>& elevations,
                                double radius, const Vec3& target,
                                PlanStrategy strategy) {
  if (iterations < 1) throw InvalidArgument("plan needs at least one iteration");
  if (batch_size < 1) throw InvalidArgument("plan batch size must be >= 1");
  if (!(delta_theta > 0.0)) throw InvalidArgument("delta_theta must be > 0");
  if (elevations.empty()) throw InvalidArgument("plan needs an elevation");
  RotationPlan plan;
  plan.theta0 = theta0;
  plan.delta_theta = delta_theta;
  plan.delta_e = delta_e;
  plan.batch_size = batch_size;
  plan.elevations = elevations;
  for (int k = 0; k < iterations; ++k) {
    const double base = plan_base_angle(theta0, delta_e, k, strategy);
    std::vector<ViewSpec> batch;
    for (int m = 0; m < batch_size; ++m) {
      for (double elevation : elevations) {
        ViewSpec v;
        v.azimuth = normalize_degrees(base + m * delta_theta);
        v.elevation = elevation;
        v.radius = radius;
        v.target = target;
        validate(v);
        batch.push_back(v);
      }
    }
    plan.batches.push_back(std::move(batch));
  }
  return plan;
}

std::vector<PoseEntry> read_pose_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open pose file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("malformed pose file " + path + ": " + e.what());
  }
  const nlohmann::json& frames =
      doc.is_object() && doc.contains("frames") ? doc["frames"] : doc;
  if (!frames.is_array()) {
    throw InvalidArgument("pose file must hold an array of frames");
  }
  std::vector<PoseEntry> poses;
  try {
    for (const auto& f : frames) {
      PoseEntry e;
      e.file = f.at("file").get<std::string>();
      e.camera.intrinsics = {f.at("fx").get<double>(), f.at("fy").get<double>(),
                             f.at("cx").get<double>(), f.at("cy").get<double>()};
      const auto rot = f.at("rotation").get<std::vector<double>>();
      const auto trans = f.at("translation").get<std::vector<double>>();
      if (rot.size() != 9 || trans.size() != 3) {
        throw InvalidArgument("pose '" + e.file +
                              "': rotation needs 9 values, translation 3");
      }
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) e.camera.rotation(r, c) = rot[r * 3 + c];
        e.camera.translation(r) = trans[r];
      }
      validate(e.camera);
      // Look-at distance: depth of the world origin in this camera.
      e.camera.focus_distance = std::max(e.camera.translation.z(), 1e-6);
      poses.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("malformed pose entry in " + path + ": " + e.what());
  }
  return poses;
}

void write_pose_file(const std::string& path,
                     const std::vector<PoseEntry>& poses) {
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& p : poses) {
    std::vector<double> rot(9);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) rot[r * 3 + c] = p.camera.rotation(r, c);
    }
    const Vec3& t = p.camera.translation;
    frames.push_back({{"file", p.file},
                      {"fx", p.camera.intrinsics.fx},
                      {"fy", p.camera.intrinsics.fy},
                      {"cx", p.camera.intrinsics.cx},
                      {"cy", p.camera.intrinsics.cy},
                      {"rotation", rot},
                      {"translation", {t.x(), t.y(), t.z()}}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write pose file " + path);
  out << nlohmann::json{{"frames", frames}}.dump(2) << "\n";
}

}  // namespace zp3
