// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "splatgen/camera.hpp"
#include "splatgen/image.hpp"

namespace splatgen {

inline constexpr std::string_view kDefaultNegativePrompt =
    "unrealistic, blurry, low quality, out of focus, low contrast, low-resolution";

struct Prompt {
  std::string text;
  std::string negative_text{kDefaultNegativePrompt};
};

/// Appends a viewpoint phrase: ", overhead view" above 60 deg elevation,
/// otherwise front/side/back/side by 90 deg azimuth sectors centred on
/// 0/90/180/270.
std::string augment_prompt(const Prompt& prompt, const CameraPose& camera);

/// Discrete diffusion schedule indexed by t in [1, T].
class NoiseSchedule {
 public:
  /// Betas linearly spaced from beta_start to beta_end.
  static NoiseSchedule linear(int steps = 1000, double beta_start = 1e-4, double beta_end = 2e-2);
  /// Schedule advertised by a remote model; alpha_bar must be strictly
  /// decreasing inside (0, 1).
  static NoiseSchedule from_alpha_bar(std::vector<double> alpha_bar);

  int steps() const { return static_cast<int>(alpha_bar_.size()); }
  double alpha_bar(int t) const;
  double beta(int t) const;
  const std::vector<double>& alpha_bars() const { return alpha_bar_; }

 private:
  explicit NoiseSchedule(std::vector<double> alpha_bar) : alpha_bar_(std::move(alpha_bar)) {}
  void check(int t) const;
  std::vector<double> alpha_bar_;
};

/// x_t = sqrt(abar_t) x + sqrt(1 - abar_t) eps. Throws kRange for t outside
/// [1, T], kShape on mismatched images.
Image add_noise(const Image& x, int t, const Image& eps, const NoiseSchedule& schedule);

/// eps_uncond + scale * (eps_cond - eps_uncond).
Image cfg_combine(const Image& eps_cond, const Image& eps_uncond, double scale);

/// SDS weighting w(t) = 1 - abar_t.
double sds_weight(int t, const NoiseSchedule& schedule);

enum class GuidanceMode { kSingleView, kMultiView };

std::string_view guidance_mode_name(GuidanceMode mode);  // "sd" | "mv"

struct GuidanceConfig {
  double cfg_scale = 50.0;
  double t_min_percent = 0.02;
  double t_max_percent = 0.98;
  double weight = 1.0;
  GuidanceMode mode = GuidanceMode::kMultiView;
  bool use_negative_prompt = false;

  void validate() const;
};

/// Uniform t over [ceil(min% * T), floor(max% * T)]; kConfig when empty.
int sample_timestep(std::mt19937_64& rng, const GuidanceConfig& config,
                    const NoiseSchedule& schedule);

struct ScoreRequest {
  GuidanceMode mode = GuidanceMode::kSingleView;
  std::string prompt;           // augmented for single view, raw for multiview
  std::string negative_prompt;  // empty when negative prompting is off
  int timestep = 1;
  double alpha_bar = 0.0;
  double cfg_scale = 1.0;
  std::vector<CameraPose> cameras;
  std::span<const Image> images;  // clean renders x, in [0, 1]
  std::span<const Image> noisy;   // x_t built with the caller's eps
};

enum class ScoreKind {
  kNoisePrediction,  // values = eps_cond, unconditional = eps_uncond (optional)
  kPixelGradient,    // values are final pixel-space SDS gradients
};

struct ScoreResult {
  ScoreKind kind = ScoreKind::kNoisePrediction;
  std::vector<Image> values;
  std::vector<Image> unconditional;
};

/// Source of diffusion guidance. One request is in flight at a time.
/// Implementations signal transient failure with kGuidanceUnavailable.
class ScoreProvider {
 public:
  virtual ~ScoreProvider() = default;
  virtual ScoreResult score(const ScoreRequest& request) = 0;
};

/// Test oracle: predicts eps_hat = (x_t - sqrt(abar) x*) / sqrt(1 - abar)
/// for a known clean target x*, so SDS collapses to a scaled photometric
/// gradient towards x*.
class AnalyticDenoiser final : public ScoreProvider {
 public:
  using TargetFn = std::function<Image(const CameraPose&)>;

  explicit AnalyticDenoiser(Image target);
  explicit AnalyticDenoiser(TargetFn target_for_camera);

  ScoreResult score(const ScoreRequest& request) override;

 private:
  TargetFn target_;
};

/// w(t) (eps_hat - eps) for one render, with the prompt augmented by the
/// camera's viewpoint phrase.
Image sds_pixel_gradient(const Image& x, ScoreProvider& provider, const Prompt& prompt,
                         const CameraPose& camera, int t, const Image& eps,
                         const NoiseSchedule& schedule, double cfg_scale,
                         bool use_negative_prompt = true);

/// Joint multiview variant: one provider call carrying all views with exact
/// (unquantized) cameras and the raw prompt.
std::vector<Image> multiview_sds_pixel_gradients(std::span<const Image> xs,
                                                 std::span<const CameraPose> cameras,
                                                 ScoreProvider& provider, const Prompt& prompt,
                                                 int t, std::span<const Image> eps,
                                                 const NoiseSchedule& schedule, double cfg_scale,
                                                 bool use_negative_prompt = false);

/// Standard normal noise shaped like `like`.
Image sample_noise(std::mt19937_64& rng, const Image& like);

}  // namespace splatgen
