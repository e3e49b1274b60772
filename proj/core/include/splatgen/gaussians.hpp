// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "splatgen/camera.hpp"
#include "splatgen/spherical_harmonics.hpp"

namespace splatgen {

using Covariance3 = Eigen::Matrix3d;
using Quaternion = Eigen::Vector4d;  // (w, x, y, z)

/// Structure-of-arrays Gaussian scene.
///
/// Rotations are stored raw and normalized on use. Scales are stored as log
/// standard deviations and opacities as logits. `sh_coeffs` holds
/// size() * sh_count() * 3 values laid out [gaussian][coefficient][channel].
struct GaussianCloud {
  int sh_degree = 0;
  std::vector<Eigen::Vector3d> positions;
  std::vector<Quaternion> rotations;
  std::vector<Eigen::Vector3d> log_scales;
  std::vector<double> opacity_logits;
  std::vector<double> sh_coeffs;

  GaussianCloud() = default;
  explicit GaussianCloud(int degree) : sh_degree(degree) {}

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  int sh_count() const { return sh_coeff_count(sh_degree); }
  int sh_stride() const { return 3 * sh_count(); }

  std::span<double> sh(std::size_t i) {
    return {sh_coeffs.data() + i * sh_stride(), static_cast<std::size_t>(sh_stride())};
  }
  std::span<const double> sh(std::size_t i) const {
    return {sh_coeffs.data() + i * sh_stride(), static_cast<std::size_t>(sh_stride())};
  }

  /// Appends one Gaussian; `sh` must hold sh_stride() values.
  void push_back(const Eigen::Vector3d& position, const Quaternion& rotation,
                 const Eigen::Vector3d& log_scale, double opacity_logit,
                 std::span<const double> sh);

  /// Keeps rows with keep[i] != 0, preserving order.
  void filter(const std::vector<char>& keep);

  /// Throws kShape on inconsistent array sizes, kInvalidParameter on
  /// non-finite values or zero quaternions.
  void validate() const;

  friend bool operator==(const GaussianCloud&, const GaussianCloud&) = default;
};

double sigmoid(double x);
double logit(double p);

/// q / |q|; throws kInvalidParameter for a zero or non-finite quaternion.
Quaternion normalize_quaternion(const Quaternion& q);

/// Pulls a gradient w.r.t. normalize(q) back to the raw quaternion q.
Quaternion normalize_quaternion_backward(const Quaternion& q, const Quaternion& grad_unit);

/// Rotation matrix of a unit quaternion.
Eigen::Matrix3d rotation_matrix(const Quaternion& unit_q);

/// Sigma = R diag(s^2) R^T with s = exp(log_scale).
///
/// Requires |q| within 1e-6 of 1 and finite inputs (kInvalidParameter).
Covariance3 build_covariance(const Quaternion& rotation, const Eigen::Vector3d& log_scale);

struct CovarianceGrad {
  Quaternion rotation = Quaternion::Zero();
  Eigen::Vector3d log_scale = Eigen::Vector3d::Zero();
};

/// Backward of build_covariance. `grad_cov` uses the full-matrix convention
/// dL = sum_ij G_ij dSigma_ij and must be symmetric.
CovarianceGrad build_covariance_backward(const Quaternion& rotation,
                                         const Eigen::Vector3d& log_scale,
                                         const Eigen::Matrix3d& grad_cov);

struct ProjectionSettings {
  double near = 0.01;
  double low_pass = 0.3;  // px^2 added to both diagonal entries of cov2d
};

struct Projection {
  bool culled = true;
  Eigen::Vector2d mean2d = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov2d = Eigen::Matrix2d::Zero();
  double depth = 0.0;
};

/// EWA projection: cov2d = J W Sigma W^T J^T + low_pass * I, with J the
/// perspective Jacobian at the mean. Gaussians with depth <= near come back
/// with culled = true.
Projection project_gaussian(const Eigen::Vector3d& mean, const Covariance3& cov,
                            const CameraFrame& camera, const ProjectionSettings& settings = {});
Projection project_gaussian(const Eigen::Vector3d& mean, const Covariance3& cov,
                            const CameraPose& camera, const ProjectionSettings& settings = {});

struct ProjectionGrad {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();  // full-matrix convention
};

/// Backward of project_gaussian for a non-culled Gaussian. `grad_cov2d` uses
/// the full-matrix convention and must be symmetric.
ProjectionGrad project_gaussian_backward(const Eigen::Vector3d& mean, const Covariance3& cov,
                                         const CameraFrame& camera,
                                         const Eigen::Vector2d& grad_mean2d,
                                         const Eigen::Matrix2d& grad_cov2d);

/// Backward of eval_sh: returns dL/d(view_dir) treating its components as
/// independent, and adds dL/dcoeffs into `grad_coeffs`.
Eigen::Vector3d eval_sh_backward(std::span<const double> coeffs,
                                 const Eigen::Vector3d& view_dir,
                                 const Eigen::Vector3d& grad_rgb,
                                 std::span<double> grad_coeffs);

}  // namespace splatgen
