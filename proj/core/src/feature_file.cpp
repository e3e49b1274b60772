// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/feature_file.hpp"

#include <cmath>
#include <limits>

#include "file_util.hpp"
#include "splatgen/error.hpp"

namespace splatgen {

namespace {

constexpr std::string_view kFeatureMagic = "FTV1";
constexpr std::size_t kFeatureHeader = 12;

}  // namespace

std::string encode_features(const FeatureSet& features) {
  const auto k = features.count(), d = features.dim();
  if (k < 1 || d < 1) fail(ErrorCode::kShape, "feature file needs K >= 1 and D >= 1");
  if (k > std::numeric_limits<std::uint32_t>::max() || d > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::kShape, "feature matrix too large");
  }
  if (!features.rows.allFinite()) fail(ErrorCode::kInvalidFeature, "non-finite feature value");
  std::string out(kFeatureMagic);
  detail::append_u32_le(out, static_cast<std::uint32_t>(k));
  detail::append_u32_le(out, static_cast<std::uint32_t>(d));
  out.reserve(kFeatureHeader + 4 * static_cast<std::size_t>(k * d));
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      detail::append_f32_le(out, static_cast<float>(features.rows(r, c)));
    }
  }
  return out;
}

FeatureSet decode_features(std::string_view bytes, std::string source) {
  if (bytes.size() < kFeatureHeader) {
    fail(ErrorCode::kParse, "feature file truncated: " + std::to_string(bytes.size()) + " bytes");
  }
  if (bytes.substr(0, 4) != kFeatureMagic) fail(ErrorCode::kParse, "feature file: bad magic");
  const std::uint64_t k = detail::read_u32_le(bytes.data() + 4);
  const std::uint64_t d = detail::read_u32_le(bytes.data() + 8);
  if (k == 0 || d == 0) fail(ErrorCode::kParse, "feature file: K and D must be positive");
  const std::uint64_t expected = kFeatureHeader + 4 * k * d;
  if (bytes.size() != expected) {
    fail(ErrorCode::kParse, "feature file: size " + std::to_string(bytes.size()) +
                                " does not match header (expected " + std::to_string(expected) + ")");
  }
  FeatureSet set;
  set.source = std::move(source);
  set.rows.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
  const char* p = bytes.data() + kFeatureHeader;
  for (Eigen::Index r = 0; r < set.rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < set.rows.cols(); ++c, p += 4) {
      const float f = detail::read_f32_le(p);
      if (!std::isfinite(f)) {
        fail(ErrorCode::kInvalidFeature,
             "feature file: non-finite value at byte " + std::to_string(p - bytes.data()));
      }
      set.rows(r, c) = f;
    }
  }
  return set;
}

void save_features(const FeatureSet& features, const std::filesystem::path& path) {
  detail::write_file_atomic(path, encode_features(features));
}

FeatureSet load_features(const std::filesystem::path& path, std::string source) {
  return decode_features(detail::read_file(path), std::move(source));
}

}  // namespace splatgen
