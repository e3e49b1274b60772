// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/ply.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "file_util.hpp"
#include "splatgen/error.hpp"

namespace splatgen {

namespace {

constexpr std::string_view kMagic = "ply\nformat binary_little_endian 1.0\nelement vertex ";
constexpr std::string_view kEndHeader = "end_header\n";

std::string properties(int sh_degree) {
  const int rest = sh_coeff_count(sh_degree) - 1;
  std::string out;
  auto prop = [&out](const std::string& name) { out += "property float " + name + "\n"; };
  for (const char* n : {"x", "y", "z"}) prop(n);
  for (int c = 0; c < 3; ++c) prop("f_dc_" + std::to_string(c));
  for (int i = 0; i < 3 * rest; ++i) prop("f_rest_" + std::to_string(i));
  prop("opacity");
  for (int c = 0; c < 3; ++c) prop("scale_" + std::to_string(c));
  for (int c = 0; c < 4; ++c) prop("rot_" + std::to_string(c));
  return out;
}

int property_count(int sh_degree) { return 14 + 3 * sh_coeff_count(sh_degree) - 3; }

[[noreturn]] void parse_error(std::size_t offset, const std::string& what) {
  fail(ErrorCode::kParse, "ply: " + what + " at byte " + std::to_string(offset));
}

}  // namespace

std::string encode_ply(const GaussianCloud& cloud) {
  cloud.validate();
  std::string out(kMagic);
  out += std::to_string(cloud.size()) + "\n";
  out += properties(cloud.sh_degree);
  out += kEndHeader;

  const int k = cloud.sh_count();
  out.reserve(out.size() + cloud.size() * 4 * static_cast<std::size_t>(property_count(cloud.sh_degree)));
  auto put = [&out](double v) { detail::append_f32_le(out, static_cast<float>(v)); };
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int c = 0; c < 3; ++c) put(cloud.positions[i][c]);
    const auto sh = cloud.sh(i);
    for (int c = 0; c < 3; ++c) put(sh[static_cast<std::size_t>(c)]);
    for (int c = 0; c < 3; ++c) {
      for (int j = 1; j < k; ++j) put(sh[static_cast<std::size_t>(3 * j + c)]);
    }
    put(cloud.opacity_logits[i]);
    for (int c = 0; c < 3; ++c) put(cloud.log_scales[i][c]);
    for (int c = 0; c < 4; ++c) put(cloud.rotations[i][c]);
  }
  return out;
}

GaussianCloud decode_ply(std::string_view bytes) {
  if (!bytes.starts_with(kMagic)) {
    std::size_t at = 0;
    while (at < bytes.size() && at < kMagic.size() && bytes[at] == kMagic[at]) ++at;
    parse_error(at, "unsupported header");
  }
  std::size_t pos = kMagic.size();
  const std::size_t eol = bytes.find('\n', pos);
  if (eol == std::string_view::npos) parse_error(pos, "unterminated vertex count");
  const std::string_view count_text = bytes.substr(pos, eol - pos);
  std::size_t count = 0;
  const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
  if (ec != std::errc() || ptr != count_text.data() + count_text.size() || count_text.empty() ||
      (count_text.size() > 1 && count_text[0] == '0')) {
    parse_error(pos, "invalid vertex count");
  }
  pos = eol + 1;

  const std::size_t end = bytes.find(kEndHeader, pos);
  if (end == std::string_view::npos) parse_error(pos, "missing end_header");
  const std::string_view props = bytes.substr(pos, end - pos);
  std::size_t lines = 0;
  for (char ch : props) lines += ch == '\n';
  const int rest_total = static_cast<int>(lines) - 14;
  int degree = -1;
  for (int d = 0; d <= kMaxShDegree; ++d) {
    if (3 * (sh_coeff_count(d) - 1) == rest_total) degree = d;
  }
  if (degree < 0) parse_error(pos, "unsupported property count " + std::to_string(lines));
  const std::string expected = properties(degree);
  if (props != expected) {
    std::size_t at = 0;
    while (at < props.size() && props[at] == expected[at]) ++at;
    parse_error(pos + at, "unexpected property layout");
  }
  pos = end + kEndHeader.size();

  const std::size_t row_bytes = 4 * static_cast<std::size_t>(property_count(degree));
  if (count > (bytes.size() - pos) / row_bytes || bytes.size() - pos != count * row_bytes) {
    parse_error(pos, "payload holds " + std::to_string(bytes.size() - pos) + " bytes, expected " +
                         std::to_string(count) + " rows of " + std::to_string(row_bytes));
  }

  GaussianCloud cloud(degree);
  const int k = cloud.sh_count();
  std::vector<double> sh(static_cast<std::size_t>(cloud.sh_stride()));
  cloud.positions.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto get = [&]() {
      const float f = detail::read_f32_le(bytes.data() + pos);
      if (!std::isfinite(f)) parse_error(pos, "non-finite value");
      pos += 4;
      return static_cast<double>(f);
    };
    Eigen::Vector3d p, s;
    Quaternion q;
    for (int c = 0; c < 3; ++c) p[c] = get();
    for (int c = 0; c < 3; ++c) sh[static_cast<std::size_t>(c)] = get();
    for (int c = 0; c < 3; ++c) {
      for (int j = 1; j < k; ++j) sh[static_cast<std::size_t>(3 * j + c)] = get();
    }
    const double opacity = get();
    for (int c = 0; c < 3; ++c) s[c] = get();
    const std::size_t rot_at = pos;
    for (int c = 0; c < 4; ++c) q[c] = get();
    if (q.squaredNorm() == 0.0) parse_error(rot_at, "zero quaternion");
    cloud.push_back(p, q, s, opacity, sh);
  }
  return cloud;
}

void save_ply(const GaussianCloud& cloud, const std::filesystem::path& path) {
  detail::write_file_atomic(path, encode_ply(cloud));
}

GaussianCloud load_ply(const std::filesystem::path& path) {
  return decode_ply(detail::read_file(path));
}

}  // namespace splatgen
