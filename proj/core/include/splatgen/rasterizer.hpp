// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Core>

#include "splatgen/camera.hpp"
#include "splatgen/gaussians.hpp"
#include "splatgen/image.hpp"

namespace splatgen {

struct RenderSettings {
  int tile_size = 16;
  double alpha_clip = 0.99;
  double min_transmittance = 1e-4;
  // Kernel support radius in standard deviations. A pixel whose Mahalanobis
  // distance to a splat exceeds this receives no contribution from it, so
  // tiled and untiled evaluation agree exactly.
  double extent_sigma = 3.0;
  ProjectionSettings projection;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct RenderOutput {
  Image rgb;    // H x W x 3
  Image alpha;  // H x W x 1
  Eigen::Vector3d background = Eigen::Vector3d::Zero();
  // 1 where the Gaussian projected in front of the camera with a non-empty
  // footprint inside the image.
  std::vector<char> visible;
};

/// Gradients shaped like GaussianCloud fields, plus per-Gaussian norms of
/// the screen-space mean gradient (densification statistics).
struct RenderGrads {
  std::vector<Eigen::Vector3d> positions;
  std::vector<Quaternion> rotations;
  std::vector<Eigen::Vector3d> log_scales;
  std::vector<double> opacity_logits;
  std::vector<double> sh_coeffs;
  std::vector<double> mean2d_grad_norms;
  std::vector<char> visible;

  void resize_like(const GaussianCloud& cloud);
  /// this += scale * other (same shapes); norms and visibility are not summed.
  void add_scaled(const RenderGrads& other, double scale);
};

/// Tile-based front-to-back compositing. rgb = premultiplied color +
/// T_final * background, alpha = 1 - T_final.
RenderOutput render(const GaussianCloud& cloud, const CameraPose& camera,
                    const Eigen::Vector3d& background, const RenderSettings& settings = {});

/// Reverse-mode pass for a loss whose per-pixel gradients w.r.t. the rendered
/// rgb (H x W x 3) and alpha (H x W x 1) are supplied. Throws kShape when the
/// upstream images do not match the camera resolution.
RenderGrads render_backward(const GaussianCloud& cloud, const CameraPose& camera,
                            const Eigen::Vector3d& background, const Image& upstream_rgb_grad,
                            const Image& upstream_alpha_grad,
                            const RenderSettings& settings = {});

}  // namespace splatgen
