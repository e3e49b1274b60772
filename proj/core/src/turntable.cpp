// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/turntable.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

#include <png.h>

#include "file_util.hpp"
#include "splatgen/error.hpp"

namespace splatgen {

namespace {

void append_png(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void flush_png(png_structp) {}

void png_fail(png_structp png, png_const_charp message) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  *text = message;
  png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

struct PngReader {
  std::string_view bytes;
  std::size_t pos = 0;
};

void read_png_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* in = static_cast<PngReader*>(png_get_io_ptr(png));
  if (in->pos + length > in->bytes.size()) png_error(png, "truncated data");
  std::copy_n(in->bytes.data() + in->pos, length, reinterpret_cast<char*>(data));
  in->pos += length;
}

}  // namespace

std::vector<std::uint8_t> to_rgb8(const Image& rgb) {
  if (rgb.channels != 3) fail(ErrorCode::kShape, "to_rgb8 expects a 3-channel image");
  std::vector<std::uint8_t> out(rgb.size());
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    const double v = std::clamp(rgb.pixels[i], 0.0, 1.0);
    out[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
  }
  return out;
}

void write_png(const Image& rgb, const std::filesystem::path& path) {
  const auto data = to_rgb8(rgb);
  if (rgb.width < 1 || rgb.height < 1) fail(ErrorCode::kShape, "cannot write an empty PNG");
  std::string encoded;
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, png_fail, png_warn);
  if (png == nullptr) fail(ErrorCode::kIo, "png: cannot allocate writer");
  png_infop info = png_create_info_struct(png);
  struct Cleanup {
    png_structp& p;
    png_infop& i;
    ~Cleanup() { png_destroy_write_struct(&p, &i); }
  } cleanup{png, info};
  if (info == nullptr) fail(ErrorCode::kIo, "png: cannot allocate info");
  if (setjmp(png_jmpbuf(png))) fail(ErrorCode::kIo, "png: " + error);
  png_set_write_fn(png, &encoded, append_png, flush_png);
  png_set_IHDR(png, info, static_cast<png_uint_32>(rgb.width), static_cast<png_uint_32>(rgb.height),
               8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < rgb.height; ++y) {
    png_write_row(png, data.data() + static_cast<std::size_t>(y) * rgb.width * 3);
  }
  png_write_end(png, nullptr);
  detail::write_file_atomic(path, encoded);
}

Image read_png(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file(path);
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    fail(ErrorCode::kParse, path.string() + " is not a PNG file");
  }
  std::string error;
  std::vector<std::uint8_t> row;
  Image out;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, png_fail, png_warn);
  if (png == nullptr) fail(ErrorCode::kIo, "png: cannot allocate reader");
  png_infop info = png_create_info_struct(png);
  struct Cleanup {
    png_structp& p;
    png_infop& i;
    ~Cleanup() { png_destroy_read_struct(&p, &i, nullptr); }
  } cleanup{png, info};
  if (info == nullptr) fail(ErrorCode::kIo, "png: cannot allocate info");
  PngReader reader{bytes, 0};
  if (setjmp(png_jmpbuf(png))) fail(ErrorCode::kParse, path.string() + ": " + error);
  png_set_read_fn(png, &reader, read_png_bytes);
  png_read_info(png, info);
  const auto width = static_cast<int>(png_get_image_width(png, info));
  const auto height = static_cast<int>(png_get_image_height(png, info));
  if (png_get_bit_depth(png, info) != 8 || png_get_color_type(png, info) != PNG_COLOR_TYPE_RGB) {
    fail(ErrorCode::kParse, path.string() + ": only 8-bit RGB PNGs are supported");
  }
  row.resize(static_cast<std::size_t>(width) * 3);
  out = Image(width, height, 3);
  for (int y = 0; y < height; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < width * 3; ++x) {
      out.pixels[static_cast<std::size_t>(y) * width * 3 + x] = row[static_cast<std::size_t>(x)] / 255.0;
    }
  }
  png_read_end(png, nullptr);
  return out;
}

std::vector<CameraPose> turntable_cameras(int frames, int resolution) {
  if (frames < 1) fail(ErrorCode::kInvalidParameter, "turntable needs at least one frame");
  if (resolution < 1) fail(ErrorCode::kInvalidParameter, "resolution must be positive");
  std::vector<CameraPose> poses;
  poses.reserve(static_cast<std::size_t>(frames));
  for (int k = 0; k < frames; ++k) {
    poses.push_back(eval_camera(360.0 * k / frames, resolution, resolution));
  }
  return poses;
}

std::vector<std::filesystem::path> render_turntable(const GaussianCloud& cloud,
                                                    const std::filesystem::path& out_dir, int frames,
                                                    int resolution, const Eigen::Vector3d& background,
                                                    const RenderSettings& settings) {
  const auto poses = turntable_cameras(frames, resolution);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> paths;
  paths.reserve(poses.size());
  for (std::size_t k = 0; k < poses.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.png", k);
    const auto path = out_dir / name;
    write_png(render(cloud, poses[k], background, settings).rgb, path);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace splatgen
