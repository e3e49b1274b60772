// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splatgen/error.hpp"

namespace splatgen {

std::string augment_prompt(const Prompt& prompt, const CameraPose& camera) {
  if (camera.elevation_deg > 60.0) return prompt.text + ", overhead view";
  double az = std::fmod(camera.azimuth_deg, 360.0);
  if (az < 0.0) az += 360.0;
  const char* phrase = ", side view";
  if (az < 45.0 || az >= 315.0) {
    phrase = ", front view";
  } else if (az >= 135.0 && az < 225.0) {
    phrase = ", back view";
  }
  return prompt.text + phrase;
}

NoiseSchedule NoiseSchedule::linear(int steps, double beta_start, double beta_end) {
  if (steps < 1) fail(ErrorCode::kConfig, "noise schedule needs at least one step");
  if (!(beta_start > 0.0 && beta_end < 1.0 && (steps == 1 || beta_start < beta_end))) {
    fail(ErrorCode::kConfig, "betas must satisfy 0 < beta_start < beta_end < 1");
  }
  std::vector<double> alpha_bar(static_cast<std::size_t>(steps));
  double prod = 1.0;
  for (int i = 0; i < steps; ++i) {
    const double beta =
        steps == 1 ? beta_start : beta_start + (beta_end - beta_start) * i / (steps - 1);
    prod *= 1.0 - beta;
    alpha_bar[static_cast<std::size_t>(i)] = prod;
  }
  return NoiseSchedule(std::move(alpha_bar));
}

NoiseSchedule NoiseSchedule::from_alpha_bar(std::vector<double> alpha_bar) {
  if (alpha_bar.empty()) fail(ErrorCode::kConfig, "empty alpha_bar schedule");
  double prev = 1.0;
  for (double a : alpha_bar) {
    if (!(a > 0.0 && a < prev)) {
      fail(ErrorCode::kConfig, "alpha_bar must be strictly decreasing inside (0, 1)");
    }
    prev = a;
  }
  return NoiseSchedule(std::move(alpha_bar));
}

void NoiseSchedule::check(int t) const {
  if (t < 1 || t > steps()) {
    fail(ErrorCode::kRange,
         "timestep " + std::to_string(t) + " outside [1, " + std::to_string(steps()) + "]");
  }
}

double NoiseSchedule::alpha_bar(int t) const {
  check(t);
  return alpha_bar_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::beta(int t) const {
  check(t);
  const double prev = t == 1 ? 1.0 : alpha_bar_[static_cast<std::size_t>(t - 2)];
  return 1.0 - alpha_bar_[static_cast<std::size_t>(t - 1)] / prev;
}

Image add_noise(const Image& x, int t, const Image& eps, const NoiseSchedule& schedule) {
  const double abar = schedule.alpha_bar(t);
  if (!x.same_shape(eps)) fail(ErrorCode::kShape, "add_noise: image and noise shapes differ");
  const double a = std::sqrt(abar), b = std::sqrt(1.0 - abar);
  Image out = x;
  for (std::size_t k = 0; k < out.size(); ++k) out.pixels[k] = a * x.pixels[k] + b * eps.pixels[k];
  return out;
}

Image cfg_combine(const Image& eps_cond, const Image& eps_uncond, double scale) {
  if (!eps_cond.same_shape(eps_uncond)) fail(ErrorCode::kShape, "cfg_combine: shapes differ");
  Image out = eps_uncond;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.pixels[k] = eps_uncond.pixels[k] + scale * (eps_cond.pixels[k] - eps_uncond.pixels[k]);
  }
  return out;
}

double sds_weight(int t, const NoiseSchedule& schedule) { return 1.0 - schedule.alpha_bar(t); }

std::string_view guidance_mode_name(GuidanceMode mode) {
  return mode == GuidanceMode::kMultiView ? "mv" : "sd";
}

void GuidanceConfig::validate() const {
  if (!(cfg_scale > 0.0)) fail(ErrorCode::kConfig, "cfg_scale must be positive");
  if (!(t_min_percent > 0.0 && t_max_percent < 1.0 && t_min_percent <= t_max_percent)) {
    fail(ErrorCode::kConfig, "timestep percents must satisfy 0 < min <= max < 1");
  }
  if (!(weight >= 0.0)) fail(ErrorCode::kConfig, "guidance weight must be non-negative");
}

int sample_timestep(std::mt19937_64& rng, const GuidanceConfig& config,
                    const NoiseSchedule& schedule) {
  config.validate();
  const int steps = schedule.steps();
  // The small slack keeps products such as 0.02 * 1000 on their integer.
  const int lo = std::max(1, static_cast<int>(std::ceil(config.t_min_percent * steps - 1e-9)));
  const int hi = std::min(steps, static_cast<int>(std::floor(config.t_max_percent * steps + 1e-9)));
  if (lo > hi) {
    fail(ErrorCode::kConfig, "timestep window [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "] is empty");
  }
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

AnalyticDenoiser::AnalyticDenoiser(Image target)
    : target_([target = std::move(target)](const CameraPose&) { return target; }) {}

AnalyticDenoiser::AnalyticDenoiser(TargetFn target_for_camera)
    : target_(std::move(target_for_camera)) {}

ScoreResult AnalyticDenoiser::score(const ScoreRequest& request) {
  const double abar = request.alpha_bar;
  if (!(abar > 0.0 && abar < 1.0)) fail(ErrorCode::kRange, "alpha_bar outside (0, 1)");
  const double a = std::sqrt(abar), b = std::sqrt(1.0 - abar);
  ScoreResult result;
  result.kind = ScoreKind::kNoisePrediction;
  for (std::size_t v = 0; v < request.noisy.size(); ++v) {
    const Image target = target_(request.cameras[v]);
    const Image& xt = request.noisy[v];
    if (!target.same_shape(xt)) fail(ErrorCode::kShape, "analytic target shape mismatch");
    Image eps_hat = xt;
    for (std::size_t k = 0; k < eps_hat.size(); ++k) {
      eps_hat.pixels[k] = (xt.pixels[k] - a * target.pixels[k]) / b;
    }
    result.values.push_back(std::move(eps_hat));
  }
  return result;
}

namespace {

std::vector<Image> run_sds(ScoreRequest& request, std::span<const Image> xs,
                           std::span<const Image> eps, ScoreProvider& provider,
                           const NoiseSchedule& schedule) {
  const int t = request.timestep;
  request.alpha_bar = schedule.alpha_bar(t);
  std::vector<Image> noisy;
  noisy.reserve(xs.size());
  for (std::size_t v = 0; v < xs.size(); ++v) noisy.push_back(add_noise(xs[v], t, eps[v], schedule));
  request.images = xs;
  request.noisy = noisy;

  ScoreResult result = provider.score(request);
  if (result.values.size() != xs.size()) {
    fail(ErrorCode::kGuidanceUnavailable, "provider returned " +
                                              std::to_string(result.values.size()) +
                                              " outputs for " + std::to_string(xs.size()) + " images");
  }
  for (std::size_t v = 0; v < xs.size(); ++v) {
    if (!result.values[v].same_shape(xs[v])) {
      fail(ErrorCode::kGuidanceUnavailable, "provider output shape does not match its input");
    }
  }
  if (result.kind == ScoreKind::kPixelGradient) return std::move(result.values);

  const bool guided = !result.unconditional.empty();
  if (guided && result.unconditional.size() != xs.size()) {
    fail(ErrorCode::kGuidanceUnavailable, "provider unconditional output count mismatch");
  }
  const double w = sds_weight(t, schedule);
  std::vector<Image> grads;
  grads.reserve(xs.size());
  for (std::size_t v = 0; v < xs.size(); ++v) {
    Image eps_hat = guided ? cfg_combine(result.values[v], result.unconditional[v], request.cfg_scale)
                           : std::move(result.values[v]);
    for (std::size_t k = 0; k < eps_hat.size(); ++k) {
      eps_hat.pixels[k] = w * (eps_hat.pixels[k] - eps[v].pixels[k]);
    }
    grads.push_back(std::move(eps_hat));
  }
  return grads;
}

}  // namespace

Image sds_pixel_gradient(const Image& x, ScoreProvider& provider, const Prompt& prompt,
                         const CameraPose& camera, int t, const Image& eps,
                         const NoiseSchedule& schedule, double cfg_scale,
                         bool use_negative_prompt) {
  ScoreRequest request;
  request.mode = GuidanceMode::kSingleView;
  request.prompt = augment_prompt(prompt, camera);
  if (use_negative_prompt) request.negative_prompt = prompt.negative_text;
  request.timestep = t;
  request.cfg_scale = cfg_scale;
  request.cameras = {camera};
  auto grads = run_sds(request, std::span<const Image>(&x, 1), std::span<const Image>(&eps, 1),
                       provider, schedule);
  return std::move(grads.front());
}

std::vector<Image> multiview_sds_pixel_gradients(std::span<const Image> xs,
                                                 std::span<const CameraPose> cameras,
                                                 ScoreProvider& provider, const Prompt& prompt,
                                                 int t, std::span<const Image> eps,
                                                 const NoiseSchedule& schedule, double cfg_scale,
                                                 bool use_negative_prompt) {
  if (xs.empty()) fail(ErrorCode::kShape, "multiview SDS needs at least one view");
  if (cameras.size() != xs.size() || eps.size() != xs.size()) {
    fail(ErrorCode::kShape, "multiview SDS: views, cameras and noise counts differ");
  }
  ScoreRequest request;
  request.mode = GuidanceMode::kMultiView;
  request.prompt = prompt.text;
  if (use_negative_prompt) request.negative_prompt = prompt.negative_text;
  request.timestep = t;
  request.cfg_scale = cfg_scale;
  request.cameras.assign(cameras.begin(), cameras.end());
  return run_sds(request, xs, eps, provider, schedule);
}

Image sample_noise(std::mt19937_64& rng, const Image& like) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Image out(like.width, like.height, like.channels);
  for (double& v : out.pixels) v = normal(rng);
  return out;
}

}  // namespace splatgen
