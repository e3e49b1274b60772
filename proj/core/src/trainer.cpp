// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "splatgen/error.hpp"

namespace splatgen {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
}

double wrap_degrees(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0.0) d += 360.0;
  return d;
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::kConfig, what);
}

}  // namespace

void TrainConfig::validate() const {
  require(stage1_steps >= 0 && stage2_steps >= 0, "stage step counts must be non-negative");
  require(mv_group_size >= 1, "mv_group_size must be positive");
  require(batch_cameras >= mv_group_size, "batch_cameras must hold at least one multiview group");
  require(stage2_single_views >= 0 && stage2_single_views < batch_cameras,
          "stage2_single_views must leave room for a multiview group");
  require(n_init_gaussians >= 1, "n_init_gaussians must be positive");
  require(init_radius > 0.0, "init_radius must be positive");
  require(sh_degree >= 0 && sh_degree <= kMaxShDegree, "sh_degree must lie in [0, 3]");
  require(densify_interval > 0 && prune_interval > 0, "intervals must be positive");
  require(densify_grad_threshold >= 0.0, "densify_grad_threshold must be non-negative");
  require(split_factor > 1.0, "split_factor must exceed 1");
  require(split_scale_fraction > 0.0 && prune_scale_fraction > 0.0 && scene_extent > 0.0,
          "scale fractions and scene_extent must be positive");
  require(prune_opacity_threshold >= 0.0 && prune_opacity_threshold < 1.0,
          "prune_opacity_threshold must lie in [0, 1)");
  require(lr_position >= 0.0 && lr_feature >= 0.0 && lr_opacity >= 0.0 && lr_scale >= 0.0 &&
              lr_rotation >= 0.0,
          "learning rates must be non-negative");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0 &&
              adam_eps > 0.0,
          "invalid Adam hyperparameters");
  require(weight_mv >= 0.0 && weight_sparsity >= 0.0 && weight_sd >= 0.0,
          "loss weights must be non-negative");
  require(render_resolution >= 1, "render_resolution must be positive");
  require(camera_distance_min > 0.0 && camera_distance_min <= camera_distance_max,
          "camera distance range must be non-empty and positive");
  require(fov_min > 0.0 && fov_min <= fov_max && fov_max < 180.0,
          "fov range must be non-empty inside (0, 180)");
  require(elevation_min <= elevation_max, "elevation range must be non-empty");
  require(azimuth_min <= azimuth_max, "azimuth range must be non-empty");
  require(schedule_steps >= 1, "schedule_steps must be positive");
  require(max_consecutive_failures >= 1, "max_consecutive_failures must be positive");
  for (double c : background) require(c >= 0.0 && c <= 1.0, "background must lie in [0, 1]");
  multiview_guidance().validate();
  single_view_guidance().validate();
}

GuidanceConfig TrainConfig::multiview_guidance() const {
  GuidanceConfig g;
  g.cfg_scale = cfg_scale;
  g.t_min_percent = mv_t_min_percent;
  g.t_max_percent = mv_t_max_percent;
  g.weight = weight_mv;
  g.mode = GuidanceMode::kMultiView;
  g.use_negative_prompt = mv_negative_prompt;
  return g;
}

GuidanceConfig TrainConfig::single_view_guidance() const {
  GuidanceConfig g;
  g.cfg_scale = cfg_scale;
  g.t_min_percent = sd_t_min_percent;
  g.t_max_percent = sd_t_max_percent;
  g.weight = weight_sd;
  g.mode = GuidanceMode::kSingleView;
  g.use_negative_prompt = sd_negative_prompt;
  return g;
}

Eigen::Vector3d TrainConfig::background_color() const {
  return {background[0], background[1], background[2]};
}

void ParamMoments::resize(std::size_t rows) {
  m.assign(rows * width, 0.0);
  v.assign(rows * width, 0.0);
}

void ParamMoments::filter(const std::vector<char>& keep) {
  std::size_t out = 0;
  for (std::size_t r = 0; r < keep.size(); ++r) {
    if (!keep[r]) continue;
    for (int k = 0; k < width; ++k) {
      m[out * width + k] = m[r * width + k];
      v[out * width + k] = v[r * width + k];
    }
    ++out;
  }
  m.resize(out * width);
  v.resize(out * width);
}

void ParamMoments::zero_row(std::size_t row) {
  if ((row + 1) * width > m.size()) {
    m.resize((row + 1) * width, 0.0);
    v.resize((row + 1) * width, 0.0);
  }
  std::fill_n(m.begin() + static_cast<std::ptrdiff_t>(row * width), width, 0.0);
  std::fill_n(v.begin() + static_cast<std::ptrdiff_t>(row * width), width, 0.0);
}

void AdamState::resize(const GaussianCloud& cloud) {
  feature.width = cloud.sh_stride();
  for (ParamMoments* g : {&position, &rotation, &scale, &opacity, &feature}) g->resize(cloud.size());
}

void AdamState::filter(const std::vector<char>& keep) {
  for (ParamMoments* g : {&position, &rotation, &scale, &opacity, &feature}) g->filter(keep);
}

void AdamState::zero_row(std::size_t row) {
  for (ParamMoments* g : {&position, &rotation, &scale, &opacity, &feature}) g->zero_row(row);
}

bool AdamState::aligned_with(const GaussianCloud& cloud) const {
  const std::size_t n = cloud.size();
  for (const ParamMoments* g : {&position, &rotation, &scale, &opacity, &feature}) {
    if (g->m.size() != n * g->width || g->v.size() != n * g->width) return false;
  }
  return feature.width == cloud.sh_stride();
}

namespace {

struct AdamCoefficients {
  double beta1, beta2, eps, correction1, correction2;
};

inline void adam_update(double& param, double grad, double& m, double& v, double lr,
                        const AdamCoefficients& c) {
  m = c.beta1 * m + (1.0 - c.beta1) * grad;
  v = c.beta2 * v + (1.0 - c.beta2) * grad * grad;
  const double m_hat = m / c.correction1;
  const double v_hat = v / c.correction2;
  param -= lr * m_hat / (std::sqrt(v_hat) + c.eps);
}

}  // namespace

void adam_step(GaussianCloud& cloud, AdamState& adam, const RenderGrads& grads,
               const TrainConfig& config) {
  if (!adam.aligned_with(cloud) || grads.positions.size() != cloud.size() ||
      grads.sh_coeffs.size() != cloud.sh_coeffs.size()) {
    fail(ErrorCode::kShape, "adam_step: optimizer state, gradients and cloud are misaligned");
  }
  ++adam.step;
  const auto step = static_cast<double>(adam.step);
  const AdamCoefficients c{config.adam_beta1, config.adam_beta2, config.adam_eps,
                           1.0 - std::pow(config.adam_beta1, step),
                           1.0 - std::pow(config.adam_beta2, step)};
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      adam_update(cloud.positions[i][k], grads.positions[i][k], adam.position.m[3 * i + k],
                  adam.position.v[3 * i + k], config.lr_position, c);
      adam_update(cloud.log_scales[i][k], grads.log_scales[i][k], adam.scale.m[3 * i + k],
                  adam.scale.v[3 * i + k], config.lr_scale, c);
    }
    for (int k = 0; k < 4; ++k) {
      adam_update(cloud.rotations[i][k], grads.rotations[i][k], adam.rotation.m[4 * i + k],
                  adam.rotation.v[4 * i + k], config.lr_rotation, c);
    }
    adam_update(cloud.opacity_logits[i], grads.opacity_logits[i], adam.opacity.m[i],
                adam.opacity.v[i], config.lr_opacity, c);
    cloud.rotations[i] = normalize_quaternion(cloud.rotations[i]);
  }
  for (std::size_t k = 0; k < cloud.sh_coeffs.size(); ++k) {
    adam_update(cloud.sh_coeffs[k], grads.sh_coeffs[k], adam.feature.m[k], adam.feature.v[k],
                config.lr_feature, c);
  }
}

TrainState TrainState::create(GaussianCloud cloud, std::uint64_t seed) {
  TrainState state;
  state.cloud = std::move(cloud);
  state.adam.resize(state.cloud);
  state.rng.seed(seed);
  state.reset_stats();
  return state;
}

void TrainState::reset_stats() {
  grad_accum.assign(cloud.size(), 0.0);
  grad_count.assign(cloud.size(), 0);
}

GaussianCloud init_cloud(int n, std::mt19937_64& rng, double radius, int sh_degree) {
  if (n < 1) fail(ErrorCode::kConfig, "init_cloud needs at least one Gaussian");
  if (!(radius > 0.0)) fail(ErrorCode::kConfig, "init_cloud radius must be positive");
  GaussianCloud cloud(sh_degree);
  const double sigma = radius * std::cbrt(4.0 / n);
  const Eigen::Vector3d log_scale = Eigen::Vector3d::Constant(std::log(sigma));
  const double opacity_logit = logit(0.1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> sh(static_cast<std::size_t>(cloud.sh_stride()), 0.0);
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d dir(normal(rng), normal(rng), normal(rng));
    while (dir.squaredNorm() < 1e-24) dir = {normal(rng), normal(rng), normal(rng)};
    dir.normalize();
    const double r = radius * std::cbrt(uniform(rng, 0.0, 1.0));
    const double gray = uniform(rng, 0.3, 0.7);
    sh[0] = sh[1] = sh[2] = (gray - 0.5) / kShC0;
    cloud.push_back(r * dir, Quaternion(1.0, 0.0, 0.0, 0.0), log_scale, opacity_logit, sh);
  }
  return cloud;
}

namespace {

CameraPose draw_pose(std::mt19937_64& rng, const TrainConfig& config) {
  CameraPose pose;
  pose.azimuth_deg = wrap_degrees(uniform(rng, config.azimuth_min, config.azimuth_max));
  pose.elevation_deg = uniform(rng, config.elevation_min, config.elevation_max);
  pose.distance = uniform(rng, config.camera_distance_min, config.camera_distance_max);
  pose.fov_deg = uniform(rng, config.fov_min, config.fov_max);
  pose.width = pose.height = config.render_resolution;
  return pose;
}

}  // namespace

std::vector<CameraPose> sample_cameras(std::mt19937_64& rng, const TrainConfig& config, int k) {
  if (k < 1) fail(ErrorCode::kConfig, "sample_cameras needs k >= 1");
  std::vector<CameraPose> poses;
  poses.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) poses.push_back(draw_pose(rng, config));
  return poses;
}

std::vector<CameraPose> sample_multiview_group(std::mt19937_64& rng, const TrainConfig& config,
                                               int n) {
  if (n < 1) fail(ErrorCode::kConfig, "multiview group needs n >= 1");
  const CameraPose anchor = draw_pose(rng, config);
  std::vector<CameraPose> group(static_cast<std::size_t>(n), anchor);
  for (int j = 1; j < n; ++j) {
    group[static_cast<std::size_t>(j)].azimuth_deg = wrap_degrees(anchor.azimuth_deg + 360.0 * j / n);
  }
  return group;
}

ReferenceViews::ReferenceViews(std::vector<CameraPose> poses) : poses_(std::move(poses)) {
  if (poses_.empty()) fail(ErrorCode::kConfig, "reference view set is empty");
  for (const auto& p : poses_) validate(p);
}

CameraPose ReferenceViews::sample(std::mt19937_64& rng) const {
  return poses_[std::uniform_int_distribution<std::size_t>(0, poses_.size() - 1)(rng)];
}

std::vector<CameraPose> ReferenceViews::sample_group(std::mt19937_64& rng, int n) const {
  const CameraPose anchor = sample(rng);
  std::vector<CameraPose> group{anchor};
  for (int j = 1; j < n; ++j) {
    const double az = wrap_degrees(anchor.azimuth_deg + 360.0 * j / n);
    auto it = std::find_if(poses_.begin(), poses_.end(), [&](const CameraPose& p) {
      const double gap = std::abs(wrap_degrees(p.azimuth_deg) - az);
      return std::min(gap, 360.0 - gap) < 1e-6 && p.elevation_deg == anchor.elevation_deg &&
             p.distance == anchor.distance && p.fov_deg == anchor.fov_deg &&
             p.width == anchor.width && p.height == anchor.height;
    });
    if (it == poses_.end()) {
      fail(ErrorCode::kConfig, "reference views lack the multiview sibling at azimuth " +
                                   std::to_string(az));
    }
    group.push_back(*it);
  }
  return group;
}

void densify(TrainState& state, const TrainConfig& config) {
  GaussianCloud& cloud = state.cloud;
  const std::size_t n = cloud.size();
  if (state.grad_accum.size() != n || state.grad_count.size() != n) {
    fail(ErrorCode::kShape, "densify: gradient statistics misaligned with the cloud");
  }
  const double split_cutoff = config.split_scale_fraction * config.scene_extent;
  const double log_split = std::log(config.split_factor);
  std::vector<double> sh(static_cast<std::size_t>(cloud.sh_stride()));
  for (std::size_t i = 0; i < n; ++i) {
    if (state.grad_count[i] == 0) continue;
    const double mean_grad = state.grad_accum[i] / state.grad_count[i];
    if (!(mean_grad > config.densify_grad_threshold)) continue;

    Eigen::Index major = 0;
    const double max_log_scale = cloud.log_scales[i].maxCoeff(&major);
    const double sigma = std::exp(max_log_scale);
    const Eigen::Vector3d axis =
        rotation_matrix(normalize_quaternion(cloud.rotations[i])).col(major);
    std::copy(cloud.sh(i).begin(), cloud.sh(i).end(), sh.begin());

    if (sigma > split_cutoff) {
      const Eigen::Vector3d center = cloud.positions[i];
      const Eigen::Vector3d child_scale = cloud.log_scales[i].array() - log_split;
      cloud.positions[i] = center + 0.5 * sigma * axis;
      cloud.log_scales[i] = child_scale;
      cloud.push_back(center - 0.5 * sigma * axis, cloud.rotations[i], child_scale,
                      cloud.opacity_logits[i], sh);
      state.adam.zero_row(i);
    } else {
      cloud.push_back(cloud.positions[i] + 0.01 * sigma * axis, cloud.rotations[i],
                      cloud.log_scales[i], cloud.opacity_logits[i], sh);
    }
    state.adam.zero_row(cloud.size() - 1);
  }
  state.reset_stats();
}

void prune(TrainState& state, const TrainConfig& config) {
  GaussianCloud& cloud = state.cloud;
  const double max_sigma = config.prune_scale_fraction * config.scene_extent;
  std::vector<char> keep(cloud.size(), 1);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const bool transparent = sigmoid(cloud.opacity_logits[i]) < config.prune_opacity_threshold;
    const bool oversized = std::exp(cloud.log_scales[i].maxCoeff()) > max_sigma;
    keep[i] = !(transparent || oversized);
    kept += keep[i] ? 1 : 0;
  }
  if (kept == 0) {
    fail(ErrorCode::kDegenerateModel,
         "pruning would remove all " + std::to_string(cloud.size()) + " Gaussians");
  }
  if (kept == cloud.size()) return;
  cloud.filter(keep);
  state.adam.filter(keep);
  std::size_t out = 0;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (!keep[i]) continue;
    state.grad_accum[out] = state.grad_accum[i];
    state.grad_count[out] = state.grad_count[i];
    ++out;
  }
  state.grad_accum.resize(out);
  state.grad_count.resize(out);
}

SparsityLoss sparsity_loss(const Image& alpha) {
  SparsityLoss out;
  out.grad = Image(alpha.width, alpha.height, alpha.channels);
  if (alpha.size() == 0) return out;
  const double inv = 1.0 / static_cast<double>(alpha.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    const double a = alpha.pixels[k];
    sum += std::abs(a);
    out.grad.pixels[k] = a > 0.0 ? inv : (a < 0.0 ? -inv : 0.0);
  }
  out.loss = sum * inv;
  return out;
}

namespace {

double half_mean_square(const Image& img) {
  if (img.size() == 0) return 0.0;
  double s = 0.0;
  for (double v : img.pixels) s += v * v;
  return 0.5 * s / static_cast<double>(img.size());
}

struct ViewWork {
  CameraPose camera;
  Image rgb;
  Image alpha;
  Image guidance_grad;
  double guidance_weight = 0.0;
};

}  // namespace

StepRecord train_step(TrainState& state, const Providers& providers, const TrainConfig& config,
                      int stage, const StepOptions& options) {
  if (stage != 1 && stage != 2) fail(ErrorCode::kConfig, "stage must be 1 or 2");
  if (providers.multiview.provider == nullptr) {
    fail(ErrorCode::kConfig, "a multiview guidance provider is required");
  }
  const Eigen::Vector3d background = config.background_color();
  const GuidanceConfig mv_cfg = config.multiview_guidance();
  const GuidanceConfig sd_cfg = config.single_view_guidance();
  const bool joint = stage == 2 && config.weight_sd > 0.0 && providers.single_view.has_value() &&
                     providers.single_view->provider != nullptr;
  const int singles = joint ? config.stage2_single_views : 0;
  const int groups = std::max(1, (config.batch_cameras - singles) / config.mv_group_size);
  Prompt prompt = options.prompt;
  prompt.negative_text = config.negative_prompt;

  StepRecord record;
  record.stage = stage;
  record.step = state.step + 1;

  std::vector<ViewWork> views;
  double sds_mv = 0.0, sds_sd = 0.0;
  try {
    for (int g = 0; g < groups; ++g) {
      const auto cameras = options.reference_views
                               ? options.reference_views->sample_group(state.rng, config.mv_group_size)
                               : sample_multiview_group(state.rng, config, config.mv_group_size);
      const int t = sample_timestep(state.rng, mv_cfg, providers.multiview.schedule);
      std::vector<Image> rgbs, eps;
      for (const auto& cam : cameras) {
        RenderOutput r = render(state.cloud, cam, background, options.render);
        eps.push_back(sample_noise(state.rng, r.rgb));
        rgbs.push_back(std::move(r.rgb));
        views.push_back({cam, {}, std::move(r.alpha), {}, config.weight_mv});
      }
      auto grads = multiview_sds_pixel_gradients(rgbs, cameras, *providers.multiview.provider,
                                                 prompt, t, eps, providers.multiview.schedule,
                                                 mv_cfg.cfg_scale, mv_cfg.use_negative_prompt);
      const std::size_t first = views.size() - cameras.size();
      for (std::size_t v = 0; v < cameras.size(); ++v) {
        sds_mv += half_mean_square(grads[v]);
        views[first + v].guidance_grad = std::move(grads[v]);
        views[first + v].rgb = std::move(rgbs[v]);
      }
    }
    for (int s = 0; s < singles; ++s) {
      const CameraPose cam = options.reference_views ? options.reference_views->sample(state.rng)
                                                     : sample_cameras(state.rng, config, 1).front();
      const int t = sample_timestep(state.rng, sd_cfg, providers.single_view->schedule);
      RenderOutput r = render(state.cloud, cam, background, options.render);
      const Image eps = sample_noise(state.rng, r.rgb);
      Image grad = sds_pixel_gradient(r.rgb, *providers.single_view->provider, prompt, cam, t, eps,
                                      providers.single_view->schedule, sd_cfg.cfg_scale,
                                      sd_cfg.use_negative_prompt);
      sds_sd += half_mean_square(grad);
      views.push_back({cam, std::move(r.rgb), std::move(r.alpha), std::move(grad), config.weight_sd});
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kGuidanceUnavailable) throw;
    ++state.skipped_steps;
    if (++state.consecutive_failures >= config.max_consecutive_failures) {
      fail(ErrorCode::kGuidanceUnavailable,
           "guidance failed " + std::to_string(state.consecutive_failures) +
               " consecutive times: " + e.what());
    }
    record.skipped = true;
    record.gaussians = state.cloud.size();
    return record;
  }
  state.consecutive_failures = 0;

  // The step loss is the mean over rendered views.
  const double view_scale = 1.0 / static_cast<double>(views.size());
  RenderGrads total;
  total.resize_like(state.cloud);
  double sparsity = 0.0;
  for (const ViewWork& view : views) {
    const SparsityLoss sp = sparsity_loss(view.alpha);
    sparsity += sp.loss;
    Image rgb_grad = view.guidance_grad;
    for (double& g : rgb_grad.pixels) g *= view.guidance_weight * view_scale;
    Image alpha_grad = sp.grad;
    for (double& g : alpha_grad.pixels) g *= config.weight_sparsity * view_scale;
    const RenderGrads grads =
        render_backward(state.cloud, view.camera, background, rgb_grad, alpha_grad, options.render);
    total.add_scaled(grads, 1.0);
    for (std::size_t i = 0; i < state.cloud.size(); ++i) {
      if (!grads.visible[i]) continue;
      state.grad_accum[i] += grads.mean2d_grad_norms[i];
      state.grad_count[i] += 1;
    }
  }
  adam_step(state.cloud, state.adam, total, config);
  ++state.step;

  const std::size_t mv_views = static_cast<std::size_t>(groups * config.mv_group_size);
  record.sds_mv = sds_mv / static_cast<double>(mv_views);
  record.sds_sd = singles > 0 ? sds_sd / singles : 0.0;
  record.sparsity = sparsity * view_scale;
  record.gaussians = state.cloud.size();
  return record;
}

PipelineResult run_pipeline(const Prompt& prompt, const Providers& providers,
                            const TrainConfig& config, const PipelineOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();
  if (prompt.text.empty()) fail(ErrorCode::kConfig, "prompt text must be non-empty");
  if (config.stage2_steps > 0 && config.weight_sd > 0.0 &&
      (!providers.single_view || providers.single_view->provider == nullptr)) {
    fail(ErrorCode::kConfig, "stage 2 with weight_sd > 0 needs a single-view provider");
  }

  std::mt19937_64 init_rng(config.seed);
  TrainState state = TrainState::create(
      init_cloud(config.n_init_gaussians, init_rng, config.init_radius, config.sh_degree),
      config.seed + 1);

  RunReport report;
  report.label = config.stage2_steps == 0 ? "first-stage-only" : "full-model";
  report.prompt = prompt.text;
  report.seed = config.seed;
  report.stage1_steps = config.stage1_steps;
  report.stage2_steps = config.stage2_steps;

  StepOptions step_options;
  step_options.prompt = prompt;
  step_options.reference_views = options.reference_views;
  step_options.render = options.render;
  TrainConfig effective = config;
  effective.negative_prompt = prompt.negative_text;

  const std::array<int, 2> stage_steps{config.stage1_steps, config.stage2_steps};
  for (int stage = 1; stage <= 2; ++stage) {
    const int steps = stage_steps[static_cast<std::size_t>(stage - 1)];
    const bool densify_stage = stage == 1 || config.densify_in_stage2;
    state.reset_stats();
    const auto stage_start = std::chrono::steady_clock::now();
    int done = 0;
    while (done < steps) {
      StepRecord rec = train_step(state, providers, effective, stage, step_options);
      if (rec.skipped) {
        report.steps.push_back(rec);
        if (options.on_step) options.on_step(rec);
        continue;
      }
      ++done;
      if (densify_stage && done % config.densify_interval == 0 && 2 * done <= steps) {
        densify(state, config);
      }
      if (done % config.prune_interval == 0) prune(state, config);
      rec.gaussians = state.cloud.size();
      report.steps.push_back(rec);
      if (options.on_step) options.on_step(rec);
    }
    const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - stage_start;
    state.stage_seconds[static_cast<std::size_t>(stage - 1)] += spent.count();
  }

  report.stage_seconds = state.stage_seconds;
  report.skipped_steps = state.skipped_steps;
  report.final_gaussians = state.cloud.size();
  const std::chrono::duration<double> total = std::chrono::steady_clock::now() - started;
  report.total_seconds = total.count();
  return {std::move(state.cloud), std::move(report)};
}

}  // namespace splatgen
