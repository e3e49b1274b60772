// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/run_config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <type_traits>

#include "file_util.hpp"
#include "splatgen/error.hpp"

namespace splatgen {

namespace {

template <typename Config, typename Fn>
void visit_fields(Config& c, Fn&& fn) {
  fn("stage1_steps", c.stage1_steps);
  fn("stage2_steps", c.stage2_steps);
  fn("batch_cameras", c.batch_cameras);
  fn("mv_group_size", c.mv_group_size);
  fn("stage2_single_views", c.stage2_single_views);
  fn("n_init_gaussians", c.n_init_gaussians);
  fn("init_radius", c.init_radius);
  fn("sh_degree", c.sh_degree);
  fn("densify_interval", c.densify_interval);
  fn("densify_grad_threshold", c.densify_grad_threshold);
  fn("densify_in_stage2", c.densify_in_stage2);
  fn("split_scale_fraction", c.split_scale_fraction);
  fn("split_factor", c.split_factor);
  fn("prune_interval", c.prune_interval);
  fn("prune_opacity_threshold", c.prune_opacity_threshold);
  fn("prune_scale_fraction", c.prune_scale_fraction);
  fn("scene_extent", c.scene_extent);
  fn("lr_position", c.lr_position);
  fn("lr_feature", c.lr_feature);
  fn("lr_opacity", c.lr_opacity);
  fn("lr_scale", c.lr_scale);
  fn("lr_rotation", c.lr_rotation);
  fn("adam_beta1", c.adam_beta1);
  fn("adam_beta2", c.adam_beta2);
  fn("adam_eps", c.adam_eps);
  fn("weight_mv", c.weight_mv);
  fn("weight_sparsity", c.weight_sparsity);
  fn("weight_sd", c.weight_sd);
  fn("cfg_scale", c.cfg_scale);
  fn("mv_t_min_percent", c.mv_t_min_percent);
  fn("mv_t_max_percent", c.mv_t_max_percent);
  fn("sd_t_min_percent", c.sd_t_min_percent);
  fn("sd_t_max_percent", c.sd_t_max_percent);
  fn("mv_negative_prompt", c.mv_negative_prompt);
  fn("sd_negative_prompt", c.sd_negative_prompt);
  fn("negative_prompt", c.negative_prompt);
  fn("render_resolution", c.render_resolution);
  fn("camera_distance_min", c.camera_distance_min);
  fn("camera_distance_max", c.camera_distance_max);
  fn("fov_min", c.fov_min);
  fn("fov_max", c.fov_max);
  fn("elevation_min", c.elevation_min);
  fn("elevation_max", c.elevation_max);
  fn("azimuth_min", c.azimuth_min);
  fn("azimuth_max", c.azimuth_max);
  fn("background", c.background);
  fn("schedule_steps", c.schedule_steps);
  fn("beta_start", c.beta_start);
  fn("beta_end", c.beta_end);
  fn("max_consecutive_failures", c.max_consecutive_failures);
  fn("seed", c.seed);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  if constexpr (std::is_floating_point_v<T>) {
    if (*begin == '+') ++begin;
  }
  const auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) return false;
  if constexpr (std::is_floating_point_v<T>) return std::isfinite(out);
  return true;
}

template <typename T>
bool parse_value(std::string_view text, T& out) {
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true") out = true;
    else if (text == "false") out = false;
    else return false;
    return true;
  } else if constexpr (std::is_same_v<T, std::string>) {
    out = std::string(text);
    return true;
  } else if constexpr (std::is_same_v<T, std::array<double, 3>>) {
    std::array<double, 3> v{};
    std::size_t start = 0;
    for (int i = 0; i < 3; ++i) {
      const std::size_t comma = i < 2 ? text.find(',', start) : text.size();
      if (comma == std::string_view::npos) return false;
      if (!parse_number(trim(text.substr(start, comma - start)), v[static_cast<std::size_t>(i)])) {
        return false;
      }
      start = comma + 1;
    }
    out = v;
    return true;
  } else {
    return parse_number(text, out);
  }
}

template <typename T>
std::string format_number(T v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, std::array<double, 3>>) {
    return format_number(v[0]) + "," + format_number(v[1]) + "," + format_number(v[2]);
  } else {
    return format_number(v);
  }
}

bool assign(TrainConfig& config, std::string_view key, std::string_view value,
            std::string& error) {
  bool found = false;
  visit_fields(config, [&](std::string_view name, auto& field) {
    if (found || name != key) return;
    found = true;
    if (!parse_value(value, field)) error = "invalid value '" + std::string(value) + "'";
  });
  if (!found) error = "unknown key";
  return error.empty();
}

}  // namespace

std::vector<std::string> run_config_keys() {
  std::vector<std::string> keys;
  const TrainConfig config;
  visit_fields(config, [&](std::string_view name, const auto&) { keys.emplace_back(name); });
  return keys;
}

void set_run_config_value(TrainConfig& config, std::string_view key, std::string_view value) {
  std::string error;
  if (!assign(config, trim(key), trim(value), error)) {
    fail(ErrorCode::kConfig, "config key '" + std::string(key) + "': " + error);
  }
}

TrainConfig parse_run_config(std::string_view text, const TrainConfig& base) {
  TrainConfig config = base;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "config line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::kConfig, where + ": expected key=value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.emplace(key).second) {
      fail(ErrorCode::kConfig, where + ": duplicate key '" + std::string(key) + "'");
    }
    std::string error;
    if (!assign(config, key, value, error)) {
      fail(ErrorCode::kConfig, where + ": key '" + std::string(key) + "': " + error);
    }
  }
  return config;
}

std::string serialize_run_config(const TrainConfig& config) {
  std::string out;
  visit_fields(config, [&](std::string_view name, const auto& field) {
    out += name;
    out += '=';
    out += format_value(field);
    out += '\n';
  });
  return out;
}

TrainConfig load_run_config(const std::filesystem::path& path, const TrainConfig& base) {
  return parse_run_config(detail::read_file(path), base);
}

}  // namespace splatgen
