// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "splatgen/metrics.hpp"

namespace splatgen {

// "FTV1" magic, u32 LE row count K, u32 LE dimension D, then K*D float32 LE
// row-major. K and D must be positive and the file exactly 12 + 4*K*D bytes.

std::string encode_features(const FeatureSet& features);
FeatureSet decode_features(std::string_view bytes, std::string source = {});

void save_features(const FeatureSet& features, const std::filesystem::path& path);
FeatureSet load_features(const std::filesystem::path& path, std::string source = {});

}  // namespace splatgen
