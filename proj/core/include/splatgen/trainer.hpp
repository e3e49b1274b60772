// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "splatgen/camera.hpp"
#include "splatgen/gaussians.hpp"
#include "splatgen/guidance.hpp"
#include "splatgen/image.hpp"
#include "splatgen/rasterizer.hpp"

namespace splatgen {

/// Hyperparameters of the two-stage generation pipeline. Field names double
/// as keys of the key=value run-config format.
struct TrainConfig {
  int stage1_steps = 2000;
  int stage2_steps = 1000;
  int batch_cameras = 12;
  int mv_group_size = 4;
  int stage2_single_views = 4;

  int n_init_gaussians = 5000;
  double init_radius = 0.5;
  int sh_degree = 0;

  int densify_interval = 100;
  double densify_grad_threshold = 0.02;
  bool densify_in_stage2 = true;
  double split_scale_fraction = 0.01;
  double split_factor = 1.6;
  int prune_interval = 100;
  double prune_opacity_threshold = 0.05;
  double prune_scale_fraction = 0.5;
  double scene_extent = 1.0;

  double lr_position = 1e-4;
  double lr_feature = 1e-2;
  double lr_opacity = 3e-3;
  double lr_scale = 3e-3;
  double lr_rotation = 3e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-15;

  double weight_mv = 1.0;
  double weight_sparsity = 1.0;
  double weight_sd = 0.5;

  double cfg_scale = 50.0;
  double mv_t_min_percent = 0.02;
  double mv_t_max_percent = 0.98;
  double sd_t_min_percent = 0.2;
  double sd_t_max_percent = 0.5;
  bool mv_negative_prompt = false;
  bool sd_negative_prompt = true;
  std::string negative_prompt{kDefaultNegativePrompt};

  int render_resolution = 256;
  double camera_distance_min = 0.8;
  double camera_distance_max = 1.2;
  double fov_min = 15.0;
  double fov_max = 60.0;
  double elevation_min = -20.0;
  double elevation_max = 60.0;
  double azimuth_min = 0.0;
  double azimuth_max = 360.0;
  std::array<double, 3> background{0.0, 0.0, 0.0};

  int schedule_steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 2e-2;
  int max_consecutive_failures = 10;
  std::uint64_t seed = 0;

  /// Throws kConfig on negative weights, non-positive intervals or empty ranges.
  void validate() const;

  GuidanceConfig multiview_guidance() const;
  GuidanceConfig single_view_guidance() const;
  Eigen::Vector3d background_color() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// First/second Adam moments for one parameter group, row-aligned with the
/// cloud (`width` scalars per Gaussian).
struct ParamMoments {
  int width = 0;
  std::vector<double> m;
  std::vector<double> v;

  std::size_t rows() const { return width == 0 ? 0 : m.size() / width; }
  void resize(std::size_t rows);
  void filter(const std::vector<char>& keep);
  void zero_row(std::size_t row);
};

struct AdamState {
  ParamMoments position{3, {}, {}};
  ParamMoments rotation{4, {}, {}};
  ParamMoments scale{3, {}, {}};
  ParamMoments opacity{1, {}, {}};
  ParamMoments feature{0, {}, {}};
  std::int64_t step = 0;

  void resize(const GaussianCloud& cloud);
  void filter(const std::vector<char>& keep);
  void zero_row(std::size_t row);
  /// True when every group has exactly cloud.size() rows.
  bool aligned_with(const GaussianCloud& cloud) const;
};

/// One Adam step over every parameter group, then quaternion renormalization.
void adam_step(GaussianCloud& cloud, AdamState& adam, const RenderGrads& grads,
               const TrainConfig& config);

struct TrainState {
  GaussianCloud cloud;
  AdamState adam;
  std::vector<double> grad_accum;  // summed screen-space mean-gradient norms
  std::vector<int> grad_count;     // views in which each Gaussian was visible
  std::mt19937_64 rng;
  std::int64_t step = 0;
  int consecutive_failures = 0;
  int skipped_steps = 0;
  std::array<double, 2> stage_seconds{0.0, 0.0};

  /// Fresh optimizer and statistics for `cloud`.
  static TrainState create(GaussianCloud cloud, std::uint64_t seed);
  void reset_stats();
};

/// Uniform positions in a ball, identity rotations, sigma = radius * (4/n)^(1/3),
/// opacity 0.1 and a random gray DC color in [0.3, 0.7].
GaussianCloud init_cloud(int n, std::mt19937_64& rng, double radius = 0.5, int sh_degree = 0);

/// Independent poses drawn uniformly inside the configured boxes.
std::vector<CameraPose> sample_cameras(std::mt19937_64& rng, const TrainConfig& config, int k);

/// Group sharing elevation, distance and FOV with azimuths a + 360 j / n.
std::vector<CameraPose> sample_multiview_group(std::mt19937_64& rng, const TrainConfig& config,
                                               int n);

/// Discrete pose set (e.g. fixed reference views) that replaces the
/// continuous boxes. Multiview groups need every anchor's 360/n rotations
/// to be present in the set.
class ReferenceViews {
 public:
  explicit ReferenceViews(std::vector<CameraPose> poses);
  const std::vector<CameraPose>& poses() const { return poses_; }
  CameraPose sample(std::mt19937_64& rng) const;
  std::vector<CameraPose> sample_group(std::mt19937_64& rng, int n) const;

 private:
  std::vector<CameraPose> poses_;
};

/// Splits Gaussians with mean accumulated screen-gradient norm above the
/// threshold (large ones) or clones them (small ones), then resets stats.
void densify(TrainState& state, const TrainConfig& config);

/// Drops low-opacity or oversized Gaussians; kDegenerateModel if none remain.
void prune(TrainState& state, const TrainConfig& config);

struct SparsityLoss {
  double loss = 0.0;
  Image grad;
};

/// mean |alpha| over the image domain and its gradient.
SparsityLoss sparsity_loss(const Image& alpha);

struct GuidanceSource {
  ScoreProvider* provider = nullptr;
  NoiseSchedule schedule = NoiseSchedule::linear();
};

struct Providers {
  GuidanceSource multiview;
  std::optional<GuidanceSource> single_view;
};

struct StepRecord {
  std::int64_t step = 0;
  int stage = 1;
  double sds_mv = 0.0;      // 0.5 * mean squared multiview SDS gradient
  double sds_sd = 0.0;      // same for single-view guidance
  double sparsity = 0.0;    // mean alpha over rendered views
  std::size_t gaussians = 0;
  bool skipped = false;
};

struct StepOptions {
  Prompt prompt;
  const ReferenceViews* reference_views = nullptr;
  RenderSettings render;
};

/// One optimization step of the given stage (1 or 2). Guidance failures skip
/// the step; kGuidanceUnavailable escapes after max_consecutive_failures.
StepRecord train_step(TrainState& state, const Providers& providers, const TrainConfig& config,
                      int stage, const StepOptions& options = {});

struct RunReport {
  std::string label;  // "full-model" or "first-stage-only"
  std::string prompt;
  std::uint64_t seed = 0;
  int stage1_steps = 0;
  int stage2_steps = 0;
  std::array<double, 2> stage_seconds{0.0, 0.0};
  double total_seconds = 0.0;
  int skipped_steps = 0;
  std::size_t final_gaussians = 0;
  std::vector<StepRecord> steps;
};

struct PipelineOptions {
  const ReferenceViews* reference_views = nullptr;
  RenderSettings render;
  std::function<void(const StepRecord&)> on_step;
};

struct PipelineResult {
  GaussianCloud cloud;
  RunReport report;
};

/// Stage 1 with multiview guidance only, then stage 2 with joint guidance.
/// Densification runs every densify_interval steps during the first half of
/// each stage; pruning runs every prune_interval steps throughout.
PipelineResult run_pipeline(const Prompt& prompt, const Providers& providers,
                            const TrainConfig& config, const PipelineOptions& options = {});

}  // namespace splatgen
