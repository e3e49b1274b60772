// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>

#include <Eigen/Core>

namespace splatgen {

inline constexpr int kMaxShDegree = 3;
inline constexpr int kMaxShCoeffs = (kMaxShDegree + 1) * (kMaxShDegree + 1);

/// Y_00 of the real SH basis, 1 / (2 sqrt(pi)).
inline constexpr double kShC0 = 0.28209479177387814;

constexpr int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }

/// Degree whose coefficient count is `count`; throws kShape otherwise.
int sh_degree_for_count(int count);

/// Real SH basis values for l <= degree, ordered (l, m) with m = -l..l.
/// Uses the sign convention common to Gaussian-splatting renderers.
std::array<double, kMaxShCoeffs> sh_basis(int degree, const Eigen::Vector3d& dir);

/// Partial derivatives of each basis polynomial w.r.t. (x, y, z), treating
/// the direction components as independent variables.
std::array<Eigen::Vector3d, kMaxShCoeffs> sh_basis_gradient(int degree,
                                                            const Eigen::Vector3d& dir);

/// 0.5 + sum_k coeffs[k] * Y_k(view_dir), unclamped.
///
/// `coeffs` holds count * 3 values laid out [coefficient][channel].
Eigen::Vector3d eval_sh(std::span<const double> coeffs, const Eigen::Vector3d& view_dir);

}  // namespace splatgen
