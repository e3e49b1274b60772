// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "splatgen/gaussians.hpp"

namespace splatgen {

// Binary little-endian PLY in the common Gaussian-splatting layout:
// x y z, f_dc_0..2, f_rest_* (channel-major), opacity, scale_0..2, rot_0..3,
// all float32. Parsing is strict: the header must match the layout byte for
// byte and the payload must fill the file exactly.

std::string encode_ply(const GaussianCloud& cloud);
GaussianCloud decode_ply(std::string_view bytes);

/// Atomic write (temp file + rename).
void save_ply(const GaussianCloud& cloud, const std::filesystem::path& path);
GaussianCloud load_ply(const std::filesystem::path& path);

}  // namespace splatgen
