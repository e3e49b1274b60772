// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "splatgen/camera.hpp"
#include "splatgen/gaussians.hpp"
#include "splatgen/image.hpp"
#include "splatgen/rasterizer.hpp"

namespace splatgen {

/// Quantizes [0, 1] values to 8 bits (round to nearest, clamped).
std::vector<std::uint8_t> to_rgb8(const Image& rgb);

/// 8-bit RGB PNG, written atomically.
void write_png(const Image& rgb, const std::filesystem::path& path);
/// Reads an 8-bit RGB PNG into [0, 1] values.
Image read_png(const std::filesystem::path& path);

/// `frames` evaluation cameras at azimuth k * 360 / frames, elevation 0.
std::vector<CameraPose> turntable_cameras(int frames, int resolution);

/// Renders a white-background turntable as frame_000.png, frame_001.png, ...
std::vector<std::filesystem::path> render_turntable(
    const GaussianCloud& cloud, const std::filesystem::path& out_dir, int frames = 120,
    int resolution = 256, const Eigen::Vector3d& background = Eigen::Vector3d::Ones(),
    const RenderSettings& settings = {});

}  // namespace splatgen
