// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include <Eigen/LU>

#include "splatgen/error.hpp"
#include "splatgen/parallel.hpp"

namespace splatgen {

void RenderGrads::resize_like(const GaussianCloud& cloud) {
  const std::size_t n = cloud.size();
  positions.assign(n, Eigen::Vector3d::Zero());
  rotations.assign(n, Quaternion::Zero());
  log_scales.assign(n, Eigen::Vector3d::Zero());
  opacity_logits.assign(n, 0.0);
  sh_coeffs.assign(cloud.sh_coeffs.size(), 0.0);
  mean2d_grad_norms.assign(n, 0.0);
  visible.assign(n, 0);
}

void RenderGrads::add_scaled(const RenderGrads& other, double scale) {
  if (other.positions.size() != positions.size() || other.sh_coeffs.size() != sh_coeffs.size()) {
    fail(ErrorCode::kShape, "RenderGrads::add_scaled shape mismatch");
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    positions[i] += scale * other.positions[i];
    rotations[i] += scale * other.rotations[i];
    log_scales[i] += scale * other.log_scales[i];
    opacity_logits[i] += scale * other.opacity_logits[i];
  }
  for (std::size_t k = 0; k < sh_coeffs.size(); ++k) sh_coeffs[k] += scale * other.sh_coeffs[k];
}

namespace {

// Per-Gaussian screen-space state shared by the forward and backward passes.
struct Splat {
  int id = 0;
  Eigen::Vector2d mean2d;
  double conic_a = 0.0, conic_b = 0.0, conic_c = 0.0;
  double opacity = 0.0;
  Eigen::Vector3d color;
  int x0 = 0, x1 = -1, y0 = 0, y1 = -1;  // inclusive pixel footprint
};

struct Prepared {
  CameraFrame frame;
  std::vector<Splat> splats;  // sorted front to back
  std::vector<char> visible;  // indexed by Gaussian id
  int tiles_x = 0, tiles_y = 0;
  std::vector<std::vector<std::uint32_t>> tile_lists;  // indices into splats
};

struct SplatGeometry {
  Quaternion unit_q;
  Covariance3 cov3;
  Projection proj;
  Eigen::Vector3d view_dir;
  double view_dist = 0.0;
  Eigen::Vector3d raw_color;
};

SplatGeometry splat_geometry(const GaussianCloud& cloud, std::size_t i, const CameraFrame& frame,
                             const ProjectionSettings& settings) {
  SplatGeometry g;
  g.unit_q = normalize_quaternion(cloud.rotations[i]);
  g.cov3 = build_covariance(g.unit_q, cloud.log_scales[i]);
  g.proj = project_gaussian(cloud.positions[i], g.cov3, frame, settings);
  const Eigen::Vector3d v = cloud.positions[i] - frame.position;
  g.view_dist = v.norm();
  g.view_dir = v / g.view_dist;
  g.raw_color = eval_sh(cloud.sh(i), g.view_dir);
  return g;
}

Prepared prepare(const GaussianCloud& cloud, const CameraPose& camera,
                 const RenderSettings& settings) {
  cloud.validate();
  if (settings.tile_size <= 0) fail(ErrorCode::kInvalidParameter, "tile size must be positive");
  Prepared p;
  p.frame = make_frame(camera);
  const int width = camera.width, height = camera.height;
  p.visible.assign(cloud.size(), 0);

  std::vector<Splat> all(cloud.size());
  std::vector<double> depth(cloud.size(), 0.0);
  parallel_for(
      cloud.size(),
      [&](std::size_t i) {
        const SplatGeometry g = splat_geometry(cloud, i, p.frame, settings.projection);
        Splat& s = all[i];
        s.id = static_cast<int>(i);
        depth[i] = g.proj.depth;
        if (g.proj.culled) return;
        const Eigen::Matrix2d conic = g.proj.cov2d.inverse();
        s.mean2d = g.proj.mean2d;
        s.conic_a = conic(0, 0);
        s.conic_b = 0.5 * (conic(0, 1) + conic(1, 0));
        s.conic_c = conic(1, 1);
        s.opacity = sigmoid(cloud.opacity_logits[i]);
        s.color = g.raw_color.cwiseMax(0.0).cwiseMin(1.0);
        // Exact bounding box of the support ellipse, padded against rounding.
        const double rx = settings.extent_sigma * std::sqrt(g.proj.cov2d(0, 0)) + 1e-7;
        const double ry = settings.extent_sigma * std::sqrt(g.proj.cov2d(1, 1)) + 1e-7;
        const double fx0 = std::ceil(s.mean2d.x() - rx - 0.5);
        const double fx1 = std::floor(s.mean2d.x() + rx - 0.5);
        const double fy0 = std::ceil(s.mean2d.y() - ry - 0.5);
        const double fy1 = std::floor(s.mean2d.y() + ry - 0.5);
        if (fx1 < 0.0 || fy1 < 0.0 || fx0 > width - 1 || fy0 > height - 1) return;
        s.x0 = static_cast<int>(std::max(fx0, 0.0));
        s.x1 = static_cast<int>(std::min(fx1, width - 1.0));
        s.y0 = static_cast<int>(std::max(fy0, 0.0));
        s.y1 = static_cast<int>(std::min(fy1, height - 1.0));
        if (s.x0 > s.x1 || s.y0 > s.y1) return;
        p.visible[i] = 1;
      },
      settings.threads);

  std::vector<int> order;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (p.visible[i]) order.push_back(static_cast<int>(i));
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return depth[a] < depth[b] || (depth[a] == depth[b] && a < b);
  });
  p.splats.reserve(order.size());
  for (int i : order) p.splats.push_back(all[i]);

  const int ts = settings.tile_size;
  p.tiles_x = (width + ts - 1) / ts;
  p.tiles_y = (height + ts - 1) / ts;
  p.tile_lists.assign(static_cast<std::size_t>(p.tiles_x) * p.tiles_y, {});
  for (std::size_t k = 0; k < p.splats.size(); ++k) {
    const Splat& s = p.splats[k];
    for (int ty = s.y0 / ts; ty <= s.y1 / ts; ++ty) {
      for (int tx = s.x0 / ts; tx <= s.x1 / ts; ++tx) {
        p.tile_lists[static_cast<std::size_t>(ty) * p.tiles_x + tx].push_back(
            static_cast<std::uint32_t>(k));
      }
    }
  }
  return p;
}

// One composited splat at one pixel.
struct Contribution {
  std::uint32_t slot;  // position in the tile list
  double alpha;
  double transmittance;  // T before this splat
  double dx, dy;
  bool clipped;
};

// Front-to-back compositing of one pixel; returns the final transmittance.
template <typename Visit>
double composite_pixel(const Prepared& p, const std::vector<std::uint32_t>& list, int px, int py,
                       const RenderSettings& settings, Visit&& visit) {
  const double cx = px + 0.5, cy = py + 0.5;
  const double support = settings.extent_sigma * settings.extent_sigma;
  double t = 1.0;
  for (std::uint32_t slot = 0; slot < list.size(); ++slot) {
    const Splat& s = p.splats[list[slot]];
    if (px < s.x0 || px > s.x1 || py < s.y0 || py > s.y1) continue;
    const double dx = cx - s.mean2d.x();
    const double dy = cy - s.mean2d.y();
    const double q = s.conic_a * dx * dx + 2.0 * s.conic_b * dx * dy + s.conic_c * dy * dy;
    if (q > support) continue;
    const double raw = s.opacity * std::exp(-0.5 * q);
    const bool clipped = raw > settings.alpha_clip;
    const double alpha = clipped ? settings.alpha_clip : raw;
    visit(Contribution{slot, alpha, t, dx, dy, clipped}, s);
    t *= 1.0 - alpha;
    if (t < settings.min_transmittance) break;
  }
  return t;
}

template <typename PixelFn>
void for_each_tile_pixel(const Prepared& p, std::size_t tile, int width, int height, int ts,
                         PixelFn&& fn) {
  const int tx = static_cast<int>(tile % p.tiles_x);
  const int ty = static_cast<int>(tile / p.tiles_x);
  const int x_end = std::min(width, (tx + 1) * ts);
  const int y_end = std::min(height, (ty + 1) * ts);
  for (int py = ty * ts; py < y_end; ++py) {
    for (int px = tx * ts; px < x_end; ++px) fn(px, py);
  }
}

}  // namespace

RenderOutput render(const GaussianCloud& cloud, const CameraPose& camera,
                    const Eigen::Vector3d& background, const RenderSettings& settings) {
  const Prepared p = prepare(cloud, camera, settings);
  const int width = camera.width, height = camera.height;
  RenderOutput out;
  out.rgb = Image(width, height, 3);
  out.alpha = Image(width, height, 1);
  out.background = background;
  out.visible = p.visible;

  parallel_for(
      p.tile_lists.size(),
      [&](std::size_t tile) {
        const auto& list = p.tile_lists[tile];
        for_each_tile_pixel(p, tile, width, height, settings.tile_size, [&](int px, int py) {
          Eigen::Vector3d color = Eigen::Vector3d::Zero();
          const double t = composite_pixel(
              p, list, px, py, settings,
              [&](const Contribution& c, const Splat& s) { color += s.color * (c.alpha * c.transmittance); });
          for (int ch = 0; ch < 3; ++ch) out.rgb.at(px, py, ch) = color[ch] + t * background[ch];
          out.alpha.at(px, py) = 1.0 - t;
        });
      },
      settings.threads);
  return out;
}

namespace {

// Screen-space gradient of one splat: mean2d, conic (a, b, c), opacity, color.
struct ScreenGrad {
  Eigen::Vector2d mean2d = Eigen::Vector2d::Zero();
  double conic_a = 0.0, conic_b = 0.0, conic_c = 0.0;
  double opacity = 0.0;
  Eigen::Vector3d color = Eigen::Vector3d::Zero();

  void add(const ScreenGrad& o) {
    mean2d += o.mean2d;
    conic_a += o.conic_a;
    conic_b += o.conic_b;
    conic_c += o.conic_c;
    opacity += o.opacity;
    color += o.color;
  }
};

}  // namespace

RenderGrads render_backward(const GaussianCloud& cloud, const CameraPose& camera,
                            const Eigen::Vector3d& background, const Image& upstream_rgb_grad,
                            const Image& upstream_alpha_grad, const RenderSettings& settings) {
  validate(camera);
  const int width = camera.width, height = camera.height;
  if (upstream_rgb_grad.width != width || upstream_rgb_grad.height != height ||
      upstream_rgb_grad.channels != 3 || upstream_rgb_grad.size() != upstream_rgb_grad.index(0, height) ||
      upstream_alpha_grad.width != width || upstream_alpha_grad.height != height ||
      upstream_alpha_grad.channels != 1 ||
      upstream_alpha_grad.size() != upstream_alpha_grad.index(0, height)) {
    fail(ErrorCode::kShape, "render_backward: upstream gradients must be HxWx3 and HxWx1 "
                            "matching the camera resolution");
  }
  for (double v : upstream_rgb_grad.pixels) {
    if (!std::isfinite(v)) fail(ErrorCode::kInvalidParameter, "non-finite upstream rgb gradient");
  }
  for (double v : upstream_alpha_grad.pixels) {
    if (!std::isfinite(v)) fail(ErrorCode::kInvalidParameter, "non-finite upstream alpha gradient");
  }

  const Prepared p = prepare(cloud, camera, settings);
  std::vector<std::vector<ScreenGrad>> tile_grads(p.tile_lists.size());

  parallel_for(
      p.tile_lists.size(),
      [&](std::size_t tile) {
        const auto& list = p.tile_lists[tile];
        auto& grads = tile_grads[tile];
        grads.assign(list.size(), ScreenGrad{});
        if (list.empty()) return;
        std::vector<Contribution> contribs;
        for_each_tile_pixel(p, tile, width, height, settings.tile_size, [&](int px, int py) {
          const Eigen::Vector3d g_rgb(upstream_rgb_grad.at(px, py, 0), upstream_rgb_grad.at(px, py, 1),
                                      upstream_rgb_grad.at(px, py, 2));
          const double g_alpha = upstream_alpha_grad.at(px, py);
          if (g_rgb.isZero(0.0) && g_alpha == 0.0) return;
          contribs.clear();
          const double t_final = composite_pixel(
              p, list, px, py, settings,
              [&](const Contribution& c, const Splat&) { contribs.push_back(c); });

          // Color accumulated behind the current splat, including background.
          Eigen::Vector3d behind = t_final * background;
          for (auto it = contribs.rbegin(); it != contribs.rend(); ++it) {
            const Contribution& c = *it;
            const Splat& s = p.splats[list[c.slot]];
            ScreenGrad& g = grads[c.slot];
            const double one_minus = 1.0 - c.alpha;
            const double weight = c.alpha * c.transmittance;
            g.color += weight * g_rgb;
            const double d_alpha = g_rgb.dot(s.color * c.transmittance - behind / one_minus) +
                                   g_alpha * t_final / one_minus;
            behind += s.color * weight;
            if (c.clipped) continue;
            // alpha = opacity * exp(-q / 2)
            g.opacity += d_alpha * c.alpha / s.opacity;
            const double d_q = -0.5 * c.alpha * d_alpha;
            g.conic_a += d_q * c.dx * c.dx;
            g.conic_b += d_q * 2.0 * c.dx * c.dy;
            g.conic_c += d_q * c.dy * c.dy;
            // dq/dmean = -2 * conic * d
            g.mean2d.x() += -2.0 * d_q * (s.conic_a * c.dx + s.conic_b * c.dy);
            g.mean2d.y() += -2.0 * d_q * (s.conic_b * c.dx + s.conic_c * c.dy);
          }
        });
      },
      settings.threads);

  // Fixed tile order keeps the reduction deterministic.
  std::vector<ScreenGrad> screen(p.splats.size());
  for (std::size_t tile = 0; tile < p.tile_lists.size(); ++tile) {
    const auto& list = p.tile_lists[tile];
    for (std::size_t slot = 0; slot < list.size(); ++slot) screen[list[slot]].add(tile_grads[tile][slot]);
  }

  RenderGrads out;
  out.resize_like(cloud);
  out.visible = p.visible;
  const int stride = cloud.sh_stride();
  parallel_for(
      p.splats.size(),
      [&](std::size_t k) {
        const Splat& s = p.splats[k];
        const ScreenGrad& g = screen[k];
        const auto i = static_cast<std::size_t>(s.id);
        const SplatGeometry geo = splat_geometry(cloud, i, p.frame, settings.projection);

        out.mean2d_grad_norms[i] = g.mean2d.norm();
        out.opacity_logits[i] = g.opacity * s.opacity * (1.0 - s.opacity);

        // Clamp to [0, 1] passes gradient only where the raw color is in range.
        Eigen::Vector3d g_raw = g.color;
        for (int ch = 0; ch < 3; ++ch) {
          if (geo.raw_color[ch] < 0.0 || geo.raw_color[ch] > 1.0) g_raw[ch] = 0.0;
        }
        std::span<double> g_sh(out.sh_coeffs.data() + i * stride, static_cast<std::size_t>(stride));
        const Eigen::Vector3d g_dir = eval_sh_backward(cloud.sh(i), geo.view_dir, g_raw, g_sh);
        Eigen::Vector3d g_pos =
            (g_dir - geo.view_dir * geo.view_dir.dot(g_dir)) / geo.view_dist;

        Eigen::Matrix2d conic;
        conic << s.conic_a, s.conic_b, s.conic_b, s.conic_c;
        Eigen::Matrix2d g_conic;
        g_conic << g.conic_a, 0.5 * g.conic_b, 0.5 * g.conic_b, g.conic_c;
        const Eigen::Matrix2d g_cov2d = -conic * g_conic * conic;

        const ProjectionGrad pg =
            project_gaussian_backward(cloud.positions[i], geo.cov3, p.frame, g.mean2d, g_cov2d);
        g_pos += pg.mean;
        const CovarianceGrad cg = build_covariance_backward(geo.unit_q, cloud.log_scales[i], pg.cov);
        out.positions[i] = g_pos;
        out.log_scales[i] = cg.log_scale;
        out.rotations[i] = normalize_quaternion_backward(cloud.rotations[i], cg.rotation);
      },
      settings.threads);
  return out;
}

}  // namespace splatgen
