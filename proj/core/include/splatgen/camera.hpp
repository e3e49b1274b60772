// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

namespace splatgen {

/// Orbit camera looking at the world origin with +z as the up reference.
///
/// Azimuth 0 places the camera on the -y axis; azimuth grows
/// counter-clockwise seen from +z. Elevation is measured from the xy plane.
struct CameraPose {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  double distance = 1.0;
  double fov_deg = 40.0;  // vertical
  int width = 256;
  int height = 256;

  friend bool operator==(const CameraPose&, const CameraPose&) = default;
};

/// Resolved pinhole model: x_cam = world_to_camera * (p - position),
/// pixel = (fx * x/z + cx, fy * y/z + cy). Camera +z looks forward and
/// camera +y points down the image.
struct CameraFrame {
  Eigen::Matrix3d world_to_camera;
  Eigen::Vector3d position;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
};

/// Throws kInvalidParameter unless distance > 0, 0 < fov < 180, size > 0.
void validate(const CameraPose& pose);

CameraFrame make_frame(const CameraPose& pose);

/// Evaluation pose for turntables and metrics: distance 3.0, FOV 40 deg.
CameraPose eval_camera(double azimuth_deg, int width, int height,
                       double elevation_deg = 0.0);

}  // namespace splatgen
