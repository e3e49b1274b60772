// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/camera.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>

#include "splatgen/error.hpp"

namespace splatgen {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

void validate(const CameraPose& pose) {
  if (!std::isfinite(pose.azimuth_deg) || !std::isfinite(pose.elevation_deg) ||
      !std::isfinite(pose.distance) || !std::isfinite(pose.fov_deg)) {
    fail(ErrorCode::kInvalidParameter, "camera pose has non-finite fields");
  }
  if (!(pose.distance > 0.0)) {
    fail(ErrorCode::kInvalidParameter,
         "camera distance must be positive, got " + std::to_string(pose.distance));
  }
  if (!(pose.fov_deg > 0.0 && pose.fov_deg < 180.0)) {
    fail(ErrorCode::kInvalidParameter,
         "camera fov must lie in (0, 180), got " + std::to_string(pose.fov_deg));
  }
  if (pose.width <= 0 || pose.height <= 0) {
    fail(ErrorCode::kInvalidParameter, "camera image size must be positive");
  }
}

CameraFrame make_frame(const CameraPose& pose) {
  validate(pose);
  const double az = pose.azimuth_deg * kDegToRad;
  const double el = pose.elevation_deg * kDegToRad;

  CameraFrame frame;
  frame.position = pose.distance * Eigen::Vector3d(std::cos(el) * std::sin(az),
                                                   -std::cos(el) * std::cos(az),
                                                   std::sin(el));
  // forward x up(+z) normalizes to the horizontal tangent of the orbit, which
  // stays well defined at the poles.
  const Eigen::Vector3d forward(-std::cos(el) * std::sin(az),
                                std::cos(el) * std::cos(az), -std::sin(el));
  const Eigen::Vector3d right(std::cos(az), std::sin(az), 0.0);
  const Eigen::Vector3d up = right.cross(forward);
  frame.world_to_camera.row(0) = right.transpose();
  frame.world_to_camera.row(1) = -up.transpose();
  frame.world_to_camera.row(2) = forward.transpose();

  const double focal = 0.5 * pose.height / std::tan(0.5 * pose.fov_deg * kDegToRad);
  frame.fx = focal;
  frame.fy = focal;
  frame.cx = 0.5 * pose.width;
  frame.cy = 0.5 * pose.height;
  frame.width = pose.width;
  frame.height = pose.height;
  return frame;
}

CameraPose eval_camera(double azimuth_deg, int width, int height,
                       double elevation_deg) {
  CameraPose pose;
  pose.azimuth_deg = azimuth_deg;
  pose.elevation_deg = elevation_deg;
  pose.distance = 3.0;
  pose.fov_deg = 40.0;
  pose.width = width;
  pose.height = height;
  return pose;
}

}  // namespace splatgen
