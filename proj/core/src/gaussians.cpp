// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/gaussians.hpp"

#include <cmath>
#include <string>

#include "splatgen/error.hpp"

namespace splatgen {

void GaussianCloud::push_back(const Eigen::Vector3d& position, const Quaternion& rotation,
                              const Eigen::Vector3d& log_scale, double opacity_logit,
                              std::span<const double> sh) {
  if (static_cast<int>(sh.size()) != sh_stride()) {
    fail(ErrorCode::kShape, "push_back: expected " + std::to_string(sh_stride()) +
                                " SH values, got " + std::to_string(sh.size()));
  }
  positions.push_back(position);
  rotations.push_back(rotation);
  log_scales.push_back(log_scale);
  opacity_logits.push_back(opacity_logit);
  sh_coeffs.insert(sh_coeffs.end(), sh.begin(), sh.end());
}

void GaussianCloud::filter(const std::vector<char>& keep) {
  if (keep.size() != size()) fail(ErrorCode::kShape, "filter mask size mismatch");
  const std::size_t stride = static_cast<std::size_t>(sh_stride());
  std::size_t out = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (!keep[i]) continue;
    if (out != i) {
      positions[out] = positions[i];
      rotations[out] = rotations[i];
      log_scales[out] = log_scales[i];
      opacity_logits[out] = opacity_logits[i];
      for (std::size_t k = 0; k < stride; ++k) {
        sh_coeffs[out * stride + k] = sh_coeffs[i * stride + k];
      }
    }
    ++out;
  }
  positions.resize(out);
  rotations.resize(out);
  log_scales.resize(out);
  opacity_logits.resize(out);
  sh_coeffs.resize(out * stride);
}

void GaussianCloud::validate() const {
  if (sh_degree < 0 || sh_degree > kMaxShDegree) {
    fail(ErrorCode::kShape, "SH degree must lie in [0, 3]");
  }
  const std::size_t n = size();
  if (rotations.size() != n || log_scales.size() != n || opacity_logits.size() != n ||
      sh_coeffs.size() != n * static_cast<std::size_t>(sh_stride())) {
    fail(ErrorCode::kShape, "GaussianCloud arrays disagree on the Gaussian count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!positions[i].allFinite() || !rotations[i].allFinite() || !log_scales[i].allFinite() ||
        !std::isfinite(opacity_logits[i])) {
      fail(ErrorCode::kInvalidParameter, "Gaussian " + std::to_string(i) + " is not finite");
    }
    if (rotations[i].squaredNorm() == 0.0) {
      fail(ErrorCode::kInvalidParameter, "Gaussian " + std::to_string(i) + " has a zero quaternion");
    }
  }
  for (double v : sh_coeffs) {
    if (!std::isfinite(v)) fail(ErrorCode::kInvalidParameter, "non-finite SH coefficient");
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

Quaternion normalize_quaternion(const Quaternion& q) {
  const double n = q.norm();
  if (!std::isfinite(n) || n == 0.0) {
    fail(ErrorCode::kInvalidParameter, "quaternion must be finite and non-zero");
  }
  return q / n;
}

Quaternion normalize_quaternion_backward(const Quaternion& q, const Quaternion& grad_unit) {
  const double n = q.norm();
  const Quaternion u = q / n;
  return (grad_unit - u * u.dot(grad_unit)) / n;
}

Eigen::Matrix3d rotation_matrix(const Quaternion& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Eigen::Matrix3d r;
  r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
      2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
      2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
  return r;
}

namespace {

Quaternion rotation_matrix_backward(const Quaternion& q, const Eigen::Matrix3d& g) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Quaternion d;
  d[0] = 2.0 * (-z * g(0, 1) + y * g(0, 2) + z * g(1, 0) - x * g(1, 2) - y * g(2, 0) +
                x * g(2, 1));
  d[1] = 2.0 * (y * g(0, 1) + z * g(0, 2) + y * g(1, 0) - 2.0 * x * g(1, 1) - w * g(1, 2) +
                z * g(2, 0) + w * g(2, 1) - 2.0 * x * g(2, 2));
  d[2] = 2.0 * (-2.0 * y * g(0, 0) + x * g(0, 1) + w * g(0, 2) + x * g(1, 0) + z * g(1, 2) -
                w * g(2, 0) + z * g(2, 1) - 2.0 * y * g(2, 2));
  d[3] = 2.0 * (-2.0 * z * g(0, 0) - w * g(0, 1) + x * g(0, 2) + w * g(1, 0) -
                2.0 * z * g(1, 1) + y * g(1, 2) + x * g(2, 0) + y * g(2, 1));
  return d;
}

void check_covariance_inputs(const Quaternion& rotation, const Eigen::Vector3d& log_scale) {
  if (!rotation.allFinite() || !log_scale.allFinite()) {
    fail(ErrorCode::kInvalidParameter, "build_covariance: non-finite input");
  }
  if (std::abs(rotation.norm() - 1.0) > 1e-6) {
    fail(ErrorCode::kInvalidParameter, "build_covariance: quaternion is not unit norm");
  }
}

}  // namespace

Covariance3 build_covariance(const Quaternion& rotation, const Eigen::Vector3d& log_scale) {
  check_covariance_inputs(rotation, log_scale);
  const Eigen::Matrix3d m = rotation_matrix(rotation) * log_scale.array().exp().matrix().asDiagonal();
  return m * m.transpose();
}

CovarianceGrad build_covariance_backward(const Quaternion& rotation,
                                         const Eigen::Vector3d& log_scale,
                                         const Eigen::Matrix3d& grad_cov) {
  check_covariance_inputs(rotation, log_scale);
  const Eigen::Matrix3d r = rotation_matrix(rotation);
  const Eigen::Vector3d s = log_scale.array().exp();
  const Eigen::Matrix3d m = r * s.asDiagonal();
  const Eigen::Matrix3d grad_m = 2.0 * grad_cov * m;

  CovarianceGrad out;
  for (int j = 0; j < 3; ++j) {
    out.log_scale[j] = grad_m.col(j).dot(r.col(j)) * s[j];
  }
  out.rotation = rotation_matrix_backward(rotation, grad_m * s.asDiagonal());
  return out;
}

Projection project_gaussian(const Eigen::Vector3d& mean, const Covariance3& cov,
                            const CameraFrame& camera, const ProjectionSettings& settings) {
  Projection out;
  const Eigen::Vector3d t = camera.world_to_camera * (mean - camera.position);
  out.depth = t.z();
  if (!(t.z() > settings.near)) return out;

  const double inv_z = 1.0 / t.z();
  Eigen::Matrix<double, 2, 3> jac;
  jac << camera.fx * inv_z, 0.0, -camera.fx * t.x() * inv_z * inv_z,
      0.0, camera.fy * inv_z, -camera.fy * t.y() * inv_z * inv_z;
  const Eigen::Matrix<double, 2, 3> tw = jac * camera.world_to_camera;

  out.culled = false;
  out.mean2d = {camera.fx * t.x() * inv_z + camera.cx, camera.fy * t.y() * inv_z + camera.cy};
  out.cov2d = tw * cov * tw.transpose();
  out.cov2d(0, 1) = out.cov2d(1, 0) = 0.5 * (out.cov2d(0, 1) + out.cov2d(1, 0));
  out.cov2d(0, 0) += settings.low_pass;
  out.cov2d(1, 1) += settings.low_pass;
  return out;
}

Projection project_gaussian(const Eigen::Vector3d& mean, const Covariance3& cov,
                            const CameraPose& camera, const ProjectionSettings& settings) {
  return project_gaussian(mean, cov, make_frame(camera), settings);
}

ProjectionGrad project_gaussian_backward(const Eigen::Vector3d& mean, const Covariance3& cov,
                                         const CameraFrame& camera,
                                         const Eigen::Vector2d& grad_mean2d,
                                         const Eigen::Matrix2d& grad_cov2d) {
  const Eigen::Matrix3d& w = camera.world_to_camera;
  const Eigen::Vector3d t = w * (mean - camera.position);
  const double inv_z = 1.0 / t.z();
  const double inv_z2 = inv_z * inv_z;
  const double inv_z3 = inv_z2 * inv_z;
  const double fx = camera.fx, fy = camera.fy;

  Eigen::Matrix<double, 2, 3> jac;
  jac << fx * inv_z, 0.0, -fx * t.x() * inv_z2, 0.0, fy * inv_z, -fy * t.y() * inv_z2;
  const Eigen::Matrix<double, 2, 3> tw = jac * w;

  ProjectionGrad out;
  out.cov = tw.transpose() * grad_cov2d * tw;
  const Eigen::Matrix<double, 2, 3> grad_tw = 2.0 * grad_cov2d * tw * cov;
  const Eigen::Matrix<double, 2, 3> grad_j = grad_tw * w.transpose();

  Eigen::Vector3d grad_t;
  grad_t.x() = -fx * inv_z2 * grad_j(0, 2) + grad_mean2d.x() * fx * inv_z;
  grad_t.y() = -fy * inv_z2 * grad_j(1, 2) + grad_mean2d.y() * fy * inv_z;
  grad_t.z() = -fx * inv_z2 * grad_j(0, 0) + 2.0 * fx * t.x() * inv_z3 * grad_j(0, 2) -
               fy * inv_z2 * grad_j(1, 1) + 2.0 * fy * t.y() * inv_z3 * grad_j(1, 2) -
               grad_mean2d.x() * fx * t.x() * inv_z2 - grad_mean2d.y() * fy * t.y() * inv_z2;
  out.mean = w.transpose() * grad_t;
  return out;
}

Eigen::Vector3d eval_sh_backward(std::span<const double> coeffs,
                                 const Eigen::Vector3d& view_dir,
                                 const Eigen::Vector3d& grad_rgb,
                                 std::span<double> grad_coeffs) {
  const int count = static_cast<int>(coeffs.size() / 3);
  const int degree = sh_degree_for_count(count);
  if (grad_coeffs.size() != coeffs.size()) {
    fail(ErrorCode::kShape, "eval_sh_backward: gradient buffer size mismatch");
  }
  const auto basis = sh_basis(degree, view_dir);
  const auto dbasis = sh_basis_gradient(degree, view_dir);
  Eigen::Vector3d grad_dir = Eigen::Vector3d::Zero();
  for (int k = 0; k < count; ++k) {
    double dot = 0.0;
    for (int c = 0; c < 3; ++c) {
      grad_coeffs[3 * k + c] += basis[k] * grad_rgb[c];
      dot += coeffs[3 * k + c] * grad_rgb[c];
    }
    grad_dir += dot * dbasis[k];
  }
  return grad_dir;
}

}  // namespace splatgen
