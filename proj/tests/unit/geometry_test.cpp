// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "splatgen/camera.hpp"
#include "splatgen/error.hpp"
#include "splatgen/gaussians.hpp"
#include "splatgen/spherical_harmonics.hpp"

namespace splatgen {
namespace {

constexpr double kPi = std::numbers::pi;

Quaternion random_unit_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quaternion q(n(rng), n(rng), n(rng), n(rng));
  return q / q.norm();
}

template <typename Fn>
ErrorCode error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no splatgen::Error thrown";
  return ErrorCode::kIo;
}

TEST(Camera, EvalPoseDefaults) {
  const CameraPose pose = eval_camera(0.0, 64, 48);
  EXPECT_DOUBLE_EQ(pose.distance, 3.0);
  EXPECT_DOUBLE_EQ(pose.fov_deg, 40.0);
  EXPECT_DOUBLE_EQ(pose.elevation_deg, 0.0);
  EXPECT_EQ(pose.width, 64);
  EXPECT_EQ(pose.height, 48);
}

TEST(Camera, AzimuthZeroSitsOnNegativeY) {
  const CameraFrame f = make_frame(eval_camera(0.0, 64, 64));
  EXPECT_NEAR(f.position.x(), 0.0, 1e-12);
  EXPECT_NEAR(f.position.y(), -3.0, 1e-12);
  EXPECT_NEAR(f.position.z(), 0.0, 1e-12);
  // Forward row looks at the origin.
  EXPECT_NEAR((f.world_to_camera.row(2).transpose() - Eigen::Vector3d(0, 1, 0)).norm(), 0.0,
              1e-12);
  // Image +y points down: world +z maps to negative camera y.
  EXPECT_LT((f.world_to_camera * Eigen::Vector3d::UnitZ()).y(), 0.0);
}

TEST(Camera, AzimuthNinetyIsCounterClockwise) {
  const CameraFrame f = make_frame(eval_camera(90.0, 64, 64));
  EXPECT_NEAR(f.position.x(), 3.0, 1e-12);
  EXPECT_NEAR(f.position.y(), 0.0, 1e-12);
}

TEST(Camera, RotationIsOrthonormal) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const CameraFrame f = make_frame(testing::random_camera(rng, 32, 32));
    const Eigen::Matrix3d r = f.world_to_camera;
    EXPECT_NEAR((r * r.transpose() - Eigen::Matrix3d::Identity()).norm(), 0.0, 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
}

TEST(Camera, FocalFromVerticalFov) {
  const CameraFrame f = make_frame(eval_camera(0.0, 80, 60));
  const double focal = 30.0 / std::tan(20.0 * kPi / 180.0);
  EXPECT_NEAR(f.fx, focal, 1e-9);
  EXPECT_NEAR(f.fy, focal, 1e-9);
  EXPECT_DOUBLE_EQ(f.cx, 40.0);
  EXPECT_DOUBLE_EQ(f.cy, 30.0);
}

TEST(Camera, ValidateRejectsBadPoses) {
  CameraPose p = eval_camera(0.0, 16, 16);
  p.distance = 0.0;
  EXPECT_EQ(error_of([&] { validate(p); }), ErrorCode::kInvalidParameter);
  p = eval_camera(0.0, 16, 16);
  p.fov_deg = 180.0;
  EXPECT_EQ(error_of([&] { validate(p); }), ErrorCode::kInvalidParameter);
  p = eval_camera(0.0, 16, 16);
  p.width = 0;
  EXPECT_EQ(error_of([&] { validate(p); }), ErrorCode::kInvalidParameter);
}

TEST(Covariance, IdentityCase) {
  const Covariance3 c = build_covariance(Quaternion(1, 0, 0, 0), Eigen::Vector3d::Zero());
  EXPECT_NEAR((c - Eigen::Matrix3d::Identity()).norm(), 0.0, 1e-15);
}

TEST(Covariance, QuarterTurnAboutZ) {
  const double h = std::sqrt(0.5);
  const Covariance3 c =
      build_covariance(Quaternion(h, 0, 0, h), Eigen::Vector3d(std::log(2.0), 0.0, 0.0));
  const Eigen::Matrix3d expected = Eigen::Vector3d(1.0, 4.0, 1.0).asDiagonal();
  EXPECT_NEAR((c - expected).norm(), 0.0, 1e-12);
}

TEST(Covariance, SpectrumDependsOnlyOnScale) {
  std::mt19937_64 rng(11);
  const Eigen::Vector3d s(0.3, 1.7, 0.9);
  const Eigen::Vector3d log_s = s.array().log();
  Eigen::Vector3d expected = s.array().square();
  std::sort(expected.data(), expected.data() + 3);
  for (int i = 0; i < 100; ++i) {
    const Covariance3 c = build_covariance(random_unit_quaternion(rng), log_s);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(c);
    EXPECT_NEAR((eig.eigenvalues() - expected).norm(), 0.0, 1e-12);
  }
}

TEST(Covariance, DoubleCoverIsExact) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100; ++i) {
    const Quaternion q = random_unit_quaternion(rng);
    const Eigen::Vector3d s(-1.0, 0.2, 0.5);
    EXPECT_EQ(build_covariance(q, s), build_covariance(-q, s));
  }
}

TEST(Covariance, RejectsNonFiniteAndNonUnit) {
  EXPECT_EQ(error_of([] {
              build_covariance(Quaternion(1, 0, 0, 0), Eigen::Vector3d(NAN, 0, 0));
            }),
            ErrorCode::kInvalidParameter);
  EXPECT_EQ(error_of([] { build_covariance(Quaternion(2, 0, 0, 0), Eigen::Vector3d::Zero()); }),
            ErrorCode::kInvalidParameter);
  EXPECT_EQ(error_of([] { normalize_quaternion(Quaternion::Zero()); }),
            ErrorCode::kInvalidParameter);
}

TEST(Covariance, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const Quaternion q = random_unit_quaternion(rng);
    const Eigen::Vector3d ls(n(rng) * 0.5, n(rng) * 0.5, n(rng) * 0.5);
    Eigen::Matrix3d g;
    for (int i = 0; i < 9; ++i) g.data()[i] = n(rng);
    g = 0.5 * (g + g.transpose()).eval();
    auto loss = [&](const Quaternion& qq, const Eigen::Vector3d& ll) {
      return (g.array() * build_covariance(qq, ll).array()).sum();
    };
    const CovarianceGrad grad = build_covariance_backward(q, ls, g);
    Eigen::Vector3d num_s;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d lp = ls, lm = ls;
      lp[k] += h;
      lm[k] -= h;
      num_s[k] = (loss(q, lp) - loss(q, lm)) / (2 * h);
    }
    EXPECT_LT((grad.log_scale - num_s).norm(), 1e-5 * num_s.norm());

    // Rotation gradient: perturb the raw quaternion through normalization,
    // compare the projection onto the tangent space.
    Quaternion num_q;
    for (int k = 0; k < 4; ++k) {
      Quaternion qp = q, qm = q;
      qp[k] += h;
      qm[k] -= h;
      num_q[k] = (loss(normalize_quaternion(qp), ls) - loss(normalize_quaternion(qm), ls)) /
                 (2 * h);
    }
    const Quaternion analytic = normalize_quaternion_backward(q, grad.rotation);
    EXPECT_LT((analytic - num_q).norm(), 1e-5 * std::max(num_q.norm(), 1e-3));
  }
}

TEST(Projection, OriginLandsAtImageCentre) {
  const CameraPose pose = eval_camera(0.0, 64, 64);
  const Projection p =
      project_gaussian(Eigen::Vector3d::Zero(), Covariance3::Identity() * 0.01, pose);
  ASSERT_FALSE(p.culled);
  EXPECT_NEAR(p.mean2d.x(), 32.0, 1e-12);
  EXPECT_NEAR(p.mean2d.y(), 32.0, 1e-12);
  EXPECT_NEAR(p.depth, 3.0, 1e-12);
}

TEST(Projection, IsotropicStaysIsotropicAtCentre) {
  const CameraPose pose = eval_camera(0.0, 64, 64);
  ProjectionSettings no_floor;
  no_floor.low_pass = 0.0;
  const double sigma2 = 0.04;
  const Projection p =
      project_gaussian(Eigen::Vector3d::Zero(), Covariance3::Identity() * sigma2, pose, no_floor);
  const double focal = make_frame(pose).fx;
  EXPECT_NEAR(p.cov2d(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(p.cov2d(0, 0), p.cov2d(1, 1), 1e-12);
  EXPECT_NEAR(p.cov2d(0, 0), sigma2 * focal * focal / 9.0, 1e-9);

  const Projection floored =
      project_gaussian(Eigen::Vector3d::Zero(), Covariance3::Identity() * sigma2, pose);
  EXPECT_NEAR(floored.cov2d(0, 0) - p.cov2d(0, 0), 0.3, 1e-12);
}

TEST(Projection, BehindOrAtNearIsCulled) {
  const CameraPose pose = eval_camera(0.0, 64, 64);
  EXPECT_TRUE(project_gaussian(Eigen::Vector3d(0, -3.0, 0), Covariance3::Identity(), pose).culled);
  EXPECT_TRUE(project_gaussian(Eigen::Vector3d(0, -4.0, 0), Covariance3::Identity(), pose).culled);
  EXPECT_TRUE(
      project_gaussian(Eigen::Vector3d(0, -2.995, 0), Covariance3::Identity(), pose).culled);
  EXPECT_FALSE(
      project_gaussian(Eigen::Vector3d(0, -2.98, 0), Covariance3::Identity(), pose).culled);
}

TEST(Projection, MeanAgreesWithPinhole) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (int i = 0; i < 100; ++i) {
    const CameraPose pose = testing::random_camera(rng, 48, 40);
    const CameraFrame f = make_frame(pose);
    const Eigen::Vector3d m(u(rng), u(rng), u(rng));
    const Eigen::Vector3d c = f.world_to_camera * (m - f.position);
    const Projection p = project_gaussian(m, Covariance3::Identity() * 0.01, f);
    ASSERT_FALSE(p.culled);
    EXPECT_NEAR(p.mean2d.x(), f.fx * c.x() / c.z() + f.cx, 1e-9);
    EXPECT_NEAR(p.mean2d.y(), f.fy * c.y() / c.z() + f.cy, 1e-9);
    EXPECT_NEAR(p.depth, c.z(), 1e-12);
  }
}

TEST(Projection, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> n(0.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    const CameraFrame f = make_frame(testing::random_camera(rng, 48, 48));
    const Eigen::Vector3d m(0.3 * n(rng), 0.3 * n(rng), 0.3 * n(rng));
    const Covariance3 cov = build_covariance(random_unit_quaternion(rng),
                                             Eigen::Vector3d(-2 + 0.3 * n(rng), -2.2, -1.8));
    const Eigen::Vector2d gm(n(rng), n(rng));
    Eigen::Matrix2d gc;
    gc << n(rng), 0, 0, n(rng);
    gc(0, 1) = gc(1, 0) = n(rng);
    auto loss = [&](const Eigen::Vector3d& mm, const Covariance3& cc) {
      const Projection p = project_gaussian(mm, cc, f);
      return gm.dot(p.mean2d) + (gc.array() * p.cov2d.array()).sum();
    };
    const ProjectionGrad g = project_gaussian_backward(m, cov, f, gm, gc);
    Eigen::Vector3d num_m;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d mp = m, mm = m;
      mp[k] += h;
      mm[k] -= h;
      num_m[k] = (loss(mp, cov) - loss(mm, cov)) / (2 * h);
    }
    EXPECT_LT((g.mean - num_m).norm(), 1e-5 * num_m.norm());
    // Symmetric perturbations: dL = sum_ij G_ij dS_ij.
    for (int r = 0; r < 3; ++r) {
      for (int c = r; c < 3; ++c) {
        Covariance3 e = Covariance3::Zero();
        e(r, c) = e(c, r) = 1.0;
        const double num = (loss(m, cov + h * e) - loss(m, cov - h * e)) / (2 * h);
        const double ana = (g.cov.array() * e.array()).sum();
        EXPECT_NEAR(ana, num, 1e-5 * std::max(1.0, std::abs(num)));
      }
    }
  }
}

TEST(SphericalHarmonics, CoefficientCounts) {
  EXPECT_EQ(sh_coeff_count(0), 1);
  EXPECT_EQ(sh_coeff_count(3), 16);
  EXPECT_EQ(sh_degree_for_count(9), 2);
  EXPECT_EQ(error_of([] { sh_degree_for_count(5); }), ErrorCode::kShape);
}

TEST(SphericalHarmonics, BasisMatchesLegendreOracle) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Eigen::Vector3d d(n(rng), n(rng), n(rng));
    d.normalize();
    const auto got = sh_basis(3, d);
    const auto want = testing::oracle_sh_basis(3, d);
    for (int k = 0; k < 16; ++k) EXPECT_NEAR(got[k], want[static_cast<std::size_t>(k)], 1e-12);
  }
}

TEST(SphericalHarmonics, DegreeZeroIsDirectionIndependent) {
  const std::vector<double> c{0.4, -0.2, 1.0};
  const Eigen::Vector3d a = eval_sh(c, Eigen::Vector3d::UnitX());
  const Eigen::Vector3d b = eval_sh(c, Eigen::Vector3d(0, -0.6, 0.8));
  EXPECT_EQ(a, b);
  const double y00 = 0.5 / std::sqrt(kPi);
  EXPECT_NEAR(a.x(), 0.5 + y00 * 0.4, 1e-15);
  EXPECT_NEAR(a.y(), 0.5 - y00 * 0.2, 1e-15);
}

TEST(SphericalHarmonics, ZeroCoefficientsGiveMidGrey) {
  for (int degree = 0; degree <= 3; ++degree) {
    const std::vector<double> c(static_cast<std::size_t>(3 * sh_coeff_count(degree)), 0.0);
    EXPECT_EQ(eval_sh(c, Eigen::Vector3d::UnitZ()), Eigen::Vector3d::Constant(0.5));
  }
}

TEST(SphericalHarmonics, ZBandIsAffineInZ) {
  std::vector<double> c(12, 0.0);
  c[2 * 3 + 0] = 1.0;  // (l=1, m=0), red channel
  const double y10 = std::sqrt(3.0 / (4.0 * kPi));
  std::mt19937_64 rng(32);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    Eigen::Vector3d d(n(rng), n(rng), n(rng));
    d.normalize();
    const double r = eval_sh(c, d).x();
    EXPECT_NEAR(std::abs(r - 0.5), y10 * std::abs(d.z()), 1e-12);
  }
  EXPECT_NEAR(eval_sh(c, Eigen::Vector3d::UnitZ()).x() + eval_sh(c, -Eigen::Vector3d::UnitZ()).x(),
              1.0, 1e-15);
}

TEST(SphericalHarmonics, WrongCountIsShapeError) {
  const std::vector<double> c(5, 0.0);
  EXPECT_EQ(error_of([&] { eval_sh(c, Eigen::Vector3d::UnitZ()); }), ErrorCode::kShape);
}

TEST(SphericalHarmonics, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> n(0.0, 1.0);
  const double h = 1e-6;
  std::vector<double> c(48);
  for (double& v : c) v = 0.3 * n(rng);
  const Eigen::Vector3d d = Eigen::Vector3d(0.3, -0.5, 0.7).normalized();
  const Eigen::Vector3d up(0.7, -1.1, 0.4);
  std::vector<double> gc(48, 0.0);
  const Eigen::Vector3d gd = eval_sh_backward(c, d, up, gc);
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d dp = d, dm = d;
    dp[k] += h;
    dm[k] -= h;
    const double num = (up.dot(eval_sh(c, dp)) - up.dot(eval_sh(c, dm))) / (2 * h);
    EXPECT_NEAR(gd[k], num, 1e-6);
  }
  for (std::size_t k = 0; k < c.size(); ++k) {
    auto cp = c, cm = c;
    cp[k] += h;
    cm[k] -= h;
    const double num = (up.dot(eval_sh(cp, d)) - up.dot(eval_sh(cm, d))) / (2 * h);
    EXPECT_NEAR(gc[k], num, 1e-8);
  }
}

}  // namespace
}  // namespace splatgen
