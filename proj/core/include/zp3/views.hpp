// Copyright 2026 The zp3 Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace zp3 {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// Pinhole projection or its far-field adaptation (camera pushed far back
/// with focal length scaled, approximating an orthographic view).
enum class Projection { kPerspective, kFarField };

/// World-to-camera pinhole camera. Camera frame: +x right, +y down, +z
/// forward. Pixel centers sit at integer coordinates.
struct Camera {
  Intrinsics intrinsics;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  Projection projection = Projection::kPerspective;
  /// Distance along +z to the look-at point; used by far_field_adapt.
  double focus_distance = 1.0;

  Vec3 center() const { return -rotation.transpose() * translation; }
  Vec3 forward() const { return rotation.row(2).transpose(); }
  Vec3 to_camera(const Vec3& world) const {
    return rotation * world + translation;
  }
  /// Projects a camera-space point (z > 0) to pixel coordinates.
  Vec2 project(const Vec3& cam) const {
    return {intrinsics.fx * cam.x() / cam.z() + intrinsics.cx,
            intrinsics.fy * cam.y() / cam.z() + intrinsics.cy};
  }
};

/// Throws InvalidArgument unless focals are positive and the rotation is
/// orthonormal with det +1 (tolerance 1e-6).
void validate(const Camera& camera);

/// Spherical viewpoint about a look-at target. Azimuth is measured in the
/// xy-plane from +x toward +y; elevation toward +z.
struct ViewSpec {
  double azimuth = 0.0;    // degrees, [0, 360)
  double elevation = 0.0;  // degrees, [-90, 90]
  double radius = 1.0;
  Vec3 target = Vec3::Zero();
};

double normalize_degrees(double degrees);
/// Smallest absolute angular difference, in [0, 180].
double angular_distance(double a_deg, double b_deg);

void validate(const ViewSpec& spec);

/// Camera at the spherical position of `spec`, looking at its target with
/// +z as the up hint.
Camera camera_from_spec(const ViewSpec& spec, const Intrinsics& intrinsics);

/// Spherical coordinates of `camera`'s center about `target`.
ViewSpec view_spec_from_camera(const Camera& camera,
                               const Vec3& target = Vec3::Zero());

/// Pushes the camera back along its optical axis so the look-at distance
/// scales by `factor` and multiplies both focals by `factor`.
Camera far_field_adapt(const Camera& camera, double factor);

/// Angular thresholds that split conditioning views into frontal, side and
/// back classes.
struct ViewClassThresholds {
  double frontal_max = 45.0;
  double back_min = 135.0;
  double frontal_weight = 2.0;
  double back_weight = 1.5;
  double side_weight = 1.0;
};

/// Fusion weight of a conditioning view relative to a reference azimuth.
double classify_view(const ViewSpec& candidate, double reference_azimuth,
                     const ViewClassThresholds& thresholds = {});

/// `count` (2 or 3) conditioning views 45 degrees apart, centered in the
/// visible azimuth range, at zero elevation.
std::vector<ViewSpec> make_input_set(double range_start, double range_end,
                                     int count, double radius = 1.0,
                                     const Vec3& target = Vec3::Zero());

enum class PlanStrategy {
  /// theta_k = theta0 + (-1)^k * ceil(k/2) * delta_e
  kAlternating,
  /// theta_k = theta0 + k * delta_e
  kMonotone,
};

struct RotationPlan {
  std::vector<std::vector<ViewSpec>> batches;
  double theta0 = 0.0;
  double delta_theta = 45.0;
  double delta_e = 6.0;
  int batch_size = 8;
  std::vector<double> elevations;
};

/// Base angle of batch k under `strategy`.
double plan_base_angle(double theta0, double delta_e, int k,
                       PlanStrategy strategy = PlanStrategy::kAlternating);

RotationPlan make_rotation_plan(
    double theta0, double delta_theta, double delta_e, int iterations,
    int batch_size, const std::vector<double>& elevations,
    double radius = 1.0, const Vec3& target = Vec3::Zero(),
    PlanStrategy strategy = PlanStrategy::kAlternating);

/// One entry of a pose file.
struct PoseEntry {
  std::string file;
  Camera camera;
};

/// Reads a JSON pose document: an array (or {"frames": [...]}) of
/// {file, fx, fy, cx, cy, rotation[9] row-major, translation[3]}, world to
/// camera.
std::vector<PoseEntry> read_pose_file(const std::string& path);
void write_pose_file(const std::string& path,
                     const std::vector<PoseEntry>& poses);

}  // namespace zp3
