// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "splatgen/error.hpp"
#include "splatgen/rasterizer.hpp"
#include "splatgen/spherical_harmonics.hpp"

namespace splatgen {
namespace {

using testing::max_abs_diff;

const double kY00 = 0.28209479177387814;

void add_gaussian(GaussianCloud& cloud, const Eigen::Vector3d& p, double sigma, double opacity,
                  const Eigen::Vector3d& color) {
  const std::vector<double> sh{(color.x() - 0.5) / kY00, (color.y() - 0.5) / kY00,
                               (color.z() - 0.5) / kY00};
  cloud.push_back(p, Quaternion(1, 0, 0, 0), Eigen::Vector3d::Constant(std::log(sigma)),
                  logit(opacity), sh);
}

TEST(Render, EmptyCloudIsBackground) {
  const GaussianCloud cloud;
  const RenderOutput out = render(cloud, eval_camera(0.0, 32, 24), Eigen::Vector3d::Zero());
  EXPECT_EQ(out.rgb.width, 32);
  EXPECT_EQ(out.rgb.height, 24);
  EXPECT_EQ(out.rgb.channels, 3);
  EXPECT_EQ(out.alpha.channels, 1);
  for (double v : out.rgb.pixels) EXPECT_EQ(v, 0.0);
  for (double v : out.alpha.pixels) EXPECT_EQ(v, 0.0);

  const RenderOutput white = render(cloud, eval_camera(0.0, 8, 8), Eigen::Vector3d::Ones());
  for (double v : white.rgb.pixels) EXPECT_EQ(v, 1.0);
}

TEST(Render, CentredGaussianIsRadial) {
  GaussianCloud cloud;
  add_gaussian(cloud, Eigen::Vector3d::Zero(), 0.2, 0.95, Eigen::Vector3d(0.8, 0.4, 0.2));
  const RenderOutput out = render(cloud, eval_camera(0.0, 64, 64), Eigen::Vector3d::Zero());
  double peak = 0.0;
  for (double v : out.alpha.pixels) peak = std::max(peak, v);
  EXPECT_EQ(out.alpha.at(31, 31), peak);
  EXPECT_EQ(out.alpha.at(32, 32), peak);

  struct Sample {
    double r2;
    double a;
  };
  std::vector<Sample> samples;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      const double dx = x + 0.5 - 32.0, dy = y + 0.5 - 32.0;
      samples.push_back({dx * dx + dy * dy, out.alpha.at(x, y)});
    }
  }
  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    return a.r2 < b.r2;
  });
  for (std::size_t i = 1; i < samples.size(); ++i) {
    EXPECT_LE(samples[i].a, samples[i - 1].a + 1e-12) << "r2 " << samples[i].r2;
  }
}

TEST(Render, TwoOverlappingGaussiansMatchOracle) {
  GaussianCloud cloud;
  add_gaussian(cloud, Eigen::Vector3d(0.1, 0.0, 0.05), 0.25, 0.8, Eigen::Vector3d(0.9, 0.1, 0.1));
  add_gaussian(cloud, Eigen::Vector3d(-0.1, 0.3, -0.05), 0.3, 0.7, Eigen::Vector3d(0.1, 0.2, 0.9));
  const CameraPose cam = eval_camera(20.0, 64, 64, 10.0);
  const Eigen::Vector3d bg(0.2, 0.3, 0.4);
  const RenderOutput out = render(cloud, cam, bg);
  const auto ref = testing::oracle_render(cloud, cam, bg);
  EXPECT_LT(max_abs_diff(out.rgb, ref.rgb), 1e-6);
  EXPECT_LT(max_abs_diff(out.alpha, ref.alpha), 1e-6);
}

TEST(Render, RandomScenesMatchOracle) {
  std::mt19937_64 rng(41);
  for (int s = 0; s < 10; ++s) {
    testing::SceneOptions opt;
    opt.gaussians = 1 + s * 7;
    opt.sh_degree = s % 4;
    const GaussianCloud cloud = testing::random_scene(rng, opt);
    const CameraPose cam = testing::random_camera(rng, 40, 36);
    const Eigen::Vector3d bg(0.1, 0.5, 0.9);
    const RenderOutput out = render(cloud, cam, bg);
    const auto ref = testing::oracle_render(cloud, cam, bg);
    EXPECT_LT(max_abs_diff(out.rgb, ref.rgb), 1e-6);
    EXPECT_LT(max_abs_diff(out.alpha, ref.alpha), 1e-6);
  }
}

TEST(Render, CompositingIdentityWithBackground) {
  std::mt19937_64 rng(42);
  const GaussianCloud cloud = testing::random_scene(rng, {});
  const CameraPose cam = testing::random_camera(rng, 32, 32);
  const Eigen::Vector3d bg(0.3, 0.6, 0.9);
  const RenderOutput black = render(cloud, cam, Eigen::Vector3d::Zero());
  const RenderOutput coloured = render(cloud, cam, bg);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      const double a = black.alpha.at(x, y);
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, 1.0);
      EXPECT_EQ(a, coloured.alpha.at(x, y));
      for (int c = 0; c < 3; ++c) {
        EXPECT_NEAR(coloured.rgb.at(x, y, c), black.rgb.at(x, y, c) + (1.0 - a) * bg[c], 1e-12);
      }
    }
  }
}

TEST(Render, AlphaEqualsWhiteOnBlack) {
  std::mt19937_64 rng(43);
  GaussianCloud cloud = testing::random_scene(rng, {});
  for (double& v : cloud.sh_coeffs) v = 0.5 / kY00;
  const CameraPose cam = testing::random_camera(rng, 48, 48);
  const RenderOutput out = render(cloud, cam, Eigen::Vector3d::Zero());
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 48; ++x) {
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(out.rgb.at(x, y, c), out.alpha.at(x, y), 1e-12);
    }
  }
}

TEST(Render, DeterministicAcrossThreadCounts) {
  std::mt19937_64 rng(44);
  testing::SceneOptions opt;
  opt.gaussians = 60;
  opt.sh_degree = 2;
  const GaussianCloud cloud = testing::random_scene(rng, opt);
  const CameraPose cam = testing::random_camera(rng, 64, 64);
  const auto probe = testing::random_probe(rng, 64, 64);
  RenderSettings one, many;
  one.threads = 1;
  many.threads = 4;
  const RenderOutput a = render(cloud, cam, Eigen::Vector3d::Zero(), one);
  const RenderOutput b = render(cloud, cam, Eigen::Vector3d::Zero(), many);
  EXPECT_EQ(a.rgb, b.rgb);
  EXPECT_EQ(a.alpha, b.alpha);
  const RenderGrads ga =
      render_backward(cloud, cam, Eigen::Vector3d::Zero(), probe.w_rgb, probe.w_alpha, one);
  const RenderGrads gb =
      render_backward(cloud, cam, Eigen::Vector3d::Zero(), probe.w_rgb, probe.w_alpha, many);
  EXPECT_EQ(ga.positions, gb.positions);
  EXPECT_EQ(ga.rotations, gb.rotations);
  EXPECT_EQ(ga.log_scales, gb.log_scales);
  EXPECT_EQ(ga.opacity_logits, gb.opacity_logits);
  EXPECT_EQ(ga.sh_coeffs, gb.sh_coeffs);
  EXPECT_EQ(ga.mean2d_grad_norms, gb.mean2d_grad_norms);
}

TEST(Render, InvariantToInputPermutation) {
  std::mt19937_64 rng(45);
  testing::SceneOptions opt;
  opt.gaussians = 40;
  opt.sh_degree = 1;
  const GaussianCloud cloud = testing::random_scene(rng, opt);
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  GaussianCloud shuffled(cloud.sh_degree);
  for (std::size_t i : order) {
    shuffled.push_back(cloud.positions[i], cloud.rotations[i], cloud.log_scales[i],
                       cloud.opacity_logits[i], cloud.sh(i));
  }
  const CameraPose cam = testing::random_camera(rng, 48, 48);
  const RenderOutput a = render(cloud, cam, Eigen::Vector3d::Zero());
  const RenderOutput b = render(shuffled, cam, Eigen::Vector3d::Zero());
  EXPECT_EQ(a.rgb, b.rgb);
  EXPECT_EQ(a.alpha, b.alpha);

  const auto probe = testing::random_probe(rng, 48, 48);
  const RenderGrads ga =
      render_backward(cloud, cam, Eigen::Vector3d::Zero(), probe.w_rgb, probe.w_alpha);
  const RenderGrads gb =
      render_backward(shuffled, cam, Eigen::Vector3d::Zero(), probe.w_rgb, probe.w_alpha);
  for (std::size_t k = 0; k < order.size(); ++k) {
    EXPECT_LT((ga.positions[order[k]] - gb.positions[k]).norm(), 1e-12);
    EXPECT_NEAR(ga.opacity_logits[order[k]], gb.opacity_logits[k], 1e-12);
  }
}

TEST(RenderBackward, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(46);
  testing::SceneOptions opt;
  opt.sh_degree = 3;
  const GaussianCloud cloud = testing::random_scene(rng, opt);
  const CameraPose cam = testing::random_camera(rng, 32, 32);
  const RenderGrads g = render_backward(cloud, cam, Eigen::Vector3d::Zero(), Image(32, 32, 3),
                                        Image(32, 32, 1));
  ASSERT_EQ(g.positions.size(), cloud.size());
  ASSERT_EQ(g.sh_coeffs.size(), cloud.sh_coeffs.size());
  for (const auto& v : g.positions) EXPECT_EQ(v, Eigen::Vector3d::Zero());
  for (const auto& v : g.rotations) EXPECT_EQ(v, Quaternion::Zero());
  for (const auto& v : g.log_scales) EXPECT_EQ(v, Eigen::Vector3d::Zero());
  for (double v : g.opacity_logits) EXPECT_EQ(v, 0.0);
  for (double v : g.sh_coeffs) EXPECT_EQ(v, 0.0);
}

TEST(RenderBackward, SingleGaussianSumRgbMatchesFiniteDifferences) {
  GaussianCloud cloud(1);
  const std::vector<double> sh{0.3, -0.2, 0.1, 0.05, 0.1, -0.1, 0.2, 0.0, 0.1, -0.05, 0.02, 0.1};
  cloud.push_back(Eigen::Vector3d(0.1, 0.05, -0.1), Quaternion(0.9, 0.2, -0.3, 0.1),
                  Eigen::Vector3d(std::log(0.3), std::log(0.2), std::log(0.25)), logit(0.6), sh);
  const CameraPose cam = eval_camera(30.0, 32, 32, 15.0);
  testing::ProbeLoss probe{Image(32, 32, 3, 1.0), Image(32, 32, 1, 0.0)};
  RenderSettings smooth;
  smooth.extent_sigma = 8.0;
  for (const auto& e : testing::gradient_check(cloud, cam, Eigen::Vector3d::Zero(), probe, 1e-5,
                                               smooth)) {
    EXPECT_LT(e.rel_error, 1e-5) << e.group;
  }
}

// With the default 3-sigma cutoff the forward map has jumps, so check every
// entry whose one-sided differences agree (the stencil misses the cutoff).
TEST(RenderBackward, DefaultCutoffMatchesWhereSmooth) {
  std::mt19937_64 rng(47);
  int checked = 0, skipped = 0;
  for (int s = 0; s < 5; ++s) {
    testing::SceneOptions opt;
    opt.gaussians = 4;
    opt.opacity_max = 0.7;
    opt.log_scale_min = std::log(0.08);
    opt.log_scale_max = std::log(0.25);
    const GaussianCloud cloud = testing::random_scene(rng, opt);
    const CameraPose cam = testing::random_camera(rng, 32, 32);
    const auto probe = testing::random_probe(rng, 32, 32);
    const Eigen::Vector3d bg(0.2, 0.2, 0.2);
    const RenderGrads g = render_backward(cloud, cam, bg, probe.w_rgb, probe.w_alpha);
    const double l0 = probe(render(cloud, cam, bg));
    const double h = 1e-5;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      for (int k = 0; k < 3; ++k) {
        GaussianCloud plus = cloud, minus = cloud;
        plus.positions[i][k] += h;
        minus.positions[i][k] -= h;
        const double lp = probe(render(plus, cam, bg));
        const double lm = probe(render(minus, cam, bg));
        const double fwd = (lp - l0) / h, bwd = (l0 - lm) / h;
        if (std::abs(fwd - bwd) > 1e-3 * std::max(1.0, std::abs(fwd))) {
          ++skipped;
          continue;
        }
        ++checked;
        const double central = (lp - lm) / (2 * h);
        EXPECT_NEAR(g.positions[i][k], central, 1e-5 * std::max(1.0, std::abs(central)));
      }
    }
  }
  EXPECT_GT(checked, 40);
  EXPECT_LT(skipped, 5);
}

TEST(RenderBackward, MeanAlphaPushesClippedGaussianOutward) {
  GaussianCloud cloud;
  add_gaussian(cloud, Eigen::Vector3d(1.0, 0.0, 0.0), 0.15, 0.8, Eigen::Vector3d::Constant(0.5));
  const CameraPose cam = eval_camera(0.0, 64, 64);
  const RenderOutput out = render(cloud, cam, Eigen::Vector3d::Zero());
  // The Gaussian straddles the right border.
  EXPECT_GT(out.alpha.at(63, 32), 0.1);
  EXPECT_EQ(out.alpha.at(20, 32), 0.0);

  Image w_alpha(64, 64, 1, 1.0 / (64.0 * 64.0));
  const RenderGrads g =
      render_backward(cloud, cam, Eigen::Vector3d::Zero(), Image(64, 64, 3), w_alpha);
  const double h = 1e-5;
  GaussianCloud plus = cloud, minus = cloud;
  plus.positions[0].x() += h;
  minus.positions[0].x() -= h;
  auto mean_alpha = [&](const GaussianCloud& c) {
    const RenderOutput r = render(c, cam, Eigen::Vector3d::Zero());
    return std::accumulate(r.alpha.pixels.begin(), r.alpha.pixels.end(), 0.0) / (64.0 * 64.0);
  };
  const double numeric = (mean_alpha(plus) - mean_alpha(minus)) / (2 * h);
  EXPECT_LT(numeric, 0.0);
  EXPECT_LT(g.positions[0].x(), 0.0);
  EXPECT_NEAR(g.positions[0].x(), numeric, 1e-4 * std::abs(numeric));
  // Descending the loss moves the splat further out of frame.
  EXPECT_GT(-g.positions[0].x(), 0.0);
}

TEST(RenderBackward, ShapeMismatchIsRejected) {
  GaussianCloud cloud;
  add_gaussian(cloud, Eigen::Vector3d::Zero(), 0.2, 0.5, Eigen::Vector3d::Constant(0.5));
  const CameraPose cam = eval_camera(0.0, 16, 16);
  try {
    render_backward(cloud, cam, Eigen::Vector3d::Zero(), Image(16, 15, 3), Image(16, 16, 1));
    FAIL() << "expected shape error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
  try {
    render_backward(cloud, cam, Eigen::Vector3d::Zero(), Image(16, 16, 3), Image(16, 16, 3));
    FAIL() << "expected shape error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
}

TEST(RenderBackward, GradStatsOnlyForVisibleGaussians) {
  GaussianCloud cloud;
  add_gaussian(cloud, Eigen::Vector3d::Zero(), 0.2, 0.5, Eigen::Vector3d::Constant(0.5));
  add_gaussian(cloud, Eigen::Vector3d(0.0, -5.0, 0.0), 0.2, 0.5, Eigen::Vector3d::Constant(0.5));
  const CameraPose cam = eval_camera(0.0, 32, 32);
  std::mt19937_64 rng(48);
  const auto probe = testing::random_probe(rng, 32, 32);
  const RenderGrads g =
      render_backward(cloud, cam, Eigen::Vector3d::Zero(), probe.w_rgb, probe.w_alpha);
  EXPECT_TRUE(g.visible[0]);
  EXPECT_FALSE(g.visible[1]);
  EXPECT_GT(g.mean2d_grad_norms[0], 0.0);
  EXPECT_EQ(g.mean2d_grad_norms[1], 0.0);
  EXPECT_EQ(g.positions[1], Eigen::Vector3d::Zero());
}

}  // namespace
}  // namespace splatgen
