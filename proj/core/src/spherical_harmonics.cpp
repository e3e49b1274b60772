// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/spherical_harmonics.hpp"

#include <string>

#include "splatgen/error.hpp"

namespace splatgen {

namespace {

constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                          -1.0925484305920792, 0.5462742152960396};
constexpr double kC3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                          0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                          -0.5900435899266435};

}  // namespace

int sh_degree_for_count(int count) {
  for (int degree = 0; degree <= kMaxShDegree; ++degree) {
    if (sh_coeff_count(degree) == count) return degree;
  }
  fail(ErrorCode::kShape, "SH coefficient count " + std::to_string(count) +
                              " is not (L+1)^2 for L in [0, 3]");
}

std::array<double, kMaxShCoeffs> sh_basis(int degree, const Eigen::Vector3d& dir) {
  std::array<double, kMaxShCoeffs> y{};
  const double x = dir.x(), yy_ = dir.y(), z = dir.z();
  y[0] = kShC0;
  if (degree < 1) return y;
  y[1] = -kC1 * yy_;
  y[2] = kC1 * z;
  y[3] = -kC1 * x;
  if (degree < 2) return y;
  const double xx = x * x, yy = yy_ * yy_, zz = z * z;
  const double xy = x * yy_, yz = yy_ * z, xz = x * z;
  y[4] = kC2[0] * xy;
  y[5] = kC2[1] * yz;
  y[6] = kC2[2] * (2.0 * zz - xx - yy);
  y[7] = kC2[3] * xz;
  y[8] = kC2[4] * (xx - yy);
  if (degree < 3) return y;
  y[9] = kC3[0] * yy_ * (3.0 * xx - yy);
  y[10] = kC3[1] * xy * z;
  y[11] = kC3[2] * yy_ * (4.0 * zz - xx - yy);
  y[12] = kC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
  y[13] = kC3[4] * x * (4.0 * zz - xx - yy);
  y[14] = kC3[5] * z * (xx - yy);
  y[15] = kC3[6] * x * (xx - 3.0 * yy);
  return y;
}

std::array<Eigen::Vector3d, kMaxShCoeffs> sh_basis_gradient(int degree,
                                                            const Eigen::Vector3d& dir) {
  std::array<Eigen::Vector3d, kMaxShCoeffs> g;
  for (auto& v : g) v.setZero();
  if (degree < 1) return g;
  const double x = dir.x(), y = dir.y(), z = dir.z();
  g[1] = {0.0, -kC1, 0.0};
  g[2] = {0.0, 0.0, kC1};
  g[3] = {-kC1, 0.0, 0.0};
  if (degree < 2) return g;
  const double xx = x * x, yy = y * y, zz = z * z;
  g[4] = kC2[0] * Eigen::Vector3d(y, x, 0.0);
  g[5] = kC2[1] * Eigen::Vector3d(0.0, z, y);
  g[6] = kC2[2] * Eigen::Vector3d(-2.0 * x, -2.0 * y, 4.0 * z);
  g[7] = kC2[3] * Eigen::Vector3d(z, 0.0, x);
  g[8] = kC2[4] * Eigen::Vector3d(2.0 * x, -2.0 * y, 0.0);
  if (degree < 3) return g;
  g[9] = kC3[0] * Eigen::Vector3d(6.0 * x * y, 3.0 * xx - 3.0 * yy, 0.0);
  g[10] = kC3[1] * Eigen::Vector3d(y * z, x * z, x * y);
  g[11] = kC3[2] * Eigen::Vector3d(-2.0 * x * y, 4.0 * zz - xx - 3.0 * yy, 8.0 * y * z);
  g[12] = kC3[3] * Eigen::Vector3d(-6.0 * x * z, -6.0 * y * z, 6.0 * zz - 3.0 * xx - 3.0 * yy);
  g[13] = kC3[4] * Eigen::Vector3d(4.0 * zz - 3.0 * xx - yy, -2.0 * x * y, 8.0 * x * z);
  g[14] = kC3[5] * Eigen::Vector3d(2.0 * x * z, -2.0 * y * z, xx - yy);
  g[15] = kC3[6] * Eigen::Vector3d(3.0 * xx - 3.0 * yy, -6.0 * x * y, 0.0);
  return g;
}

Eigen::Vector3d eval_sh(std::span<const double> coeffs, const Eigen::Vector3d& view_dir) {
  if (coeffs.size() % 3 != 0) {
    fail(ErrorCode::kShape, "SH coefficient array must hold 3 channels per coefficient");
  }
  const int count = static_cast<int>(coeffs.size() / 3);
  const int degree = sh_degree_for_count(count);
  const auto basis = sh_basis(degree, view_dir);
  Eigen::Vector3d rgb = Eigen::Vector3d::Constant(0.5);
  for (int k = 0; k < count; ++k) {
    for (int c = 0; c < 3; ++c) rgb[c] += basis[k] * coeffs[3 * k + c];
  }
  return rgb;
}

}  // namespace splatgen
