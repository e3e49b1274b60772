// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/wire.hpp"

#include <cmath>

#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "file_util.hpp"
#include "splatgen/error.hpp"

namespace splatgen {

using nlohmann::json;

namespace {

[[noreturn]] void wire_error(const std::string& what) {
  fail(ErrorCode::kGuidanceUnavailable, "guidance wire: " + what);
}

json parse_body(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    wire_error(std::string("malformed JSON: ") + e.what());
  }
}

Image decode_rgb(const json& j, const char* key, int width, int height) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_string()) {
    wire_error(std::string("missing '") + key + "' payload");
  }
  Image img(width, height, 3);
  img.pixels = decode_float_payload(j.at(key).get<std::string>(), img.size());
  return img;
}

}  // namespace

std::string encode_float_payload(const std::vector<double>& values) {
  std::string raw;
  raw.reserve(values.size() * 4);
  for (double v : values) detail::append_f32_le(raw, static_cast<float>(v));
  std::string out(4 * ((raw.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(raw.data()),
                                static_cast<int>(raw.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<double> decode_float_payload(std::string_view base64, std::size_t expected_count) {
  if (base64.size() % 4 != 0) wire_error("base64 length is not a multiple of 4");
  std::string raw(base64.size() / 4 * 3, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(raw.data()),
                                reinterpret_cast<const unsigned char*>(base64.data()),
                                static_cast<int>(base64.size()));
  if (n < 0) wire_error("invalid base64 payload");
  std::size_t len = static_cast<std::size_t>(n);
  if (base64.ends_with("==")) len -= 2;
  else if (base64.ends_with("=")) len -= 1;
  if (len != expected_count * 4) {
    wire_error("payload holds " + std::to_string(len) + " bytes, expected " +
               std::to_string(expected_count * 4));
  }
  std::vector<double> out(expected_count);
  for (std::size_t i = 0; i < expected_count; ++i) {
    const float f = detail::read_f32_le(raw.data() + 4 * i);
    if (!std::isfinite(f)) wire_error("non-finite value in payload");
    out[i] = f;
  }
  return out;
}

std::string encode_schedule(const NoiseSchedule& schedule) {
  return json{{"T", schedule.steps()}, {"alpha_bar", schedule.alpha_bars()}}.dump();
}

NoiseSchedule decode_schedule(std::string_view text) {
  const json j = parse_body(text);
  try {
    const int steps = j.at("T").get<int>();
    auto alpha_bar = j.at("alpha_bar").get<std::vector<double>>();
    if (static_cast<int>(alpha_bar.size()) != steps) {
      wire_error("schedule T disagrees with alpha_bar length");
    }
    return NoiseSchedule::from_alpha_bar(std::move(alpha_bar));
  } catch (const json::exception& e) {
    wire_error(std::string("bad schedule: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kGuidanceUnavailable) throw;
    wire_error(std::string("bad schedule: ") + e.what());
  }
}

std::string encode_guidance_request(const ScoreRequest& request) {
  if (request.cameras.size() != request.images.size()) {
    fail(ErrorCode::kShape, "guidance request: camera and image counts differ");
  }
  json images = json::array();
  for (std::size_t v = 0; v < request.images.size(); ++v) {
    const Image& img = request.images[v];
    if (img.channels != 3) fail(ErrorCode::kShape, "guidance request images must be RGB");
    const CameraPose& cam = request.cameras[v];
    images.push_back({{"camera",
                       {{"azimuth", cam.azimuth_deg},
                        {"elevation", cam.elevation_deg},
                        {"distance", cam.distance},
                        {"fov_deg", cam.fov_deg}}},
                      {"rgb", encode_float_payload(img.pixels)},
                      {"height", img.height},
                      {"width", img.width}});
  }
  return json{{"mode", guidance_mode_name(request.mode)},
              {"prompt", request.prompt},
              {"negative_prompt", request.negative_prompt},
              {"timestep", request.timestep},
              {"cfg_scale", request.cfg_scale},
              {"images", images}}
      .dump();
}

GuidanceWireRequest decode_guidance_request(std::string_view text) {
  const json j = parse_body(text);
  GuidanceWireRequest out;
  try {
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "mv") out.mode = GuidanceMode::kMultiView;
    else if (mode == "sd") out.mode = GuidanceMode::kSingleView;
    else wire_error("unknown mode '" + mode + "'");
    out.prompt = j.at("prompt").get<std::string>();
    out.negative_prompt = j.at("negative_prompt").get<std::string>();
    out.timestep = j.at("timestep").get<int>();
    out.cfg_scale = j.at("cfg_scale").get<double>();
    for (const auto& item : j.at("images")) {
      const auto& cam = item.at("camera");
      CameraPose pose;
      pose.azimuth_deg = cam.at("azimuth").get<double>();
      pose.elevation_deg = cam.at("elevation").get<double>();
      pose.distance = cam.at("distance").get<double>();
      pose.fov_deg = cam.at("fov_deg").get<double>();
      pose.width = item.at("width").get<int>();
      pose.height = item.at("height").get<int>();
      if (pose.width < 1 || pose.height < 1) wire_error("image dimensions must be positive");
      out.images.push_back(decode_rgb(item, "rgb", pose.width, pose.height));
      out.cameras.push_back(pose);
    }
  } catch (const json::exception& e) {
    wire_error(std::string("bad guidance request: ") + e.what());
  }
  return out;
}

std::string encode_guidance_response(const std::vector<Image>& grads) {
  json list = json::array();
  for (const Image& g : grads) list.push_back(encode_float_payload(g.pixels));
  return json{{"grads", list}}.dump();
}

std::string encode_guidance_error(std::string_view message) {
  return json{{"error", message}}.dump();
}

std::vector<Image> decode_guidance_response(std::string_view text, std::span<const Image> like) {
  const json j = parse_body(text);
  if (j.is_object() && j.contains("error")) {
    wire_error("server error: " + (j.at("error").is_string() ? j.at("error").get<std::string>()
                                                             : j.at("error").dump()));
  }
  if (!j.is_object() || !j.contains("grads") || !j.at("grads").is_array()) {
    wire_error("response lacks a 'grads' array");
  }
  const auto& list = j.at("grads");
  if (list.size() != like.size()) {
    wire_error("expected " + std::to_string(like.size()) + " gradients, got " +
               std::to_string(list.size()));
  }
  std::vector<Image> out;
  out.reserve(like.size());
  for (std::size_t v = 0; v < like.size(); ++v) {
    if (!list[v].is_string()) wire_error("gradient entry is not a base64 string");
    Image g(like[v].width, like[v].height, like[v].channels);
    g.pixels = decode_float_payload(list[v].get<std::string>(), g.size());
    out.push_back(std::move(g));
  }
  return out;
}

HttpScoreProvider::HttpScoreProvider(std::string base_url, double timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
  while (base_url_.ends_with('/')) base_url_.pop_back();
  if (base_url_.empty()) fail(ErrorCode::kConfig, "provider URL is empty");
  if (!(timeout_seconds_ > 0.0)) fail(ErrorCode::kConfig, "provider timeout must be positive");
}

namespace {

httplib::Client make_client(const std::string& url, double timeout) {
  httplib::Client client(url);
  if (!client.is_valid()) wire_error("invalid provider URL '" + url + "'");
  const auto secs = static_cast<time_t>(timeout);
  const auto usecs = static_cast<time_t>((timeout - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  return client;
}

std::string checked_body(const httplib::Result& res, std::string_view path) {
  if (!res) {
    wire_error(std::string(path) + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    std::string detail = res->body;
    try {
      const json j = json::parse(res->body);
      if (j.contains("error")) detail = j.at("error").dump();
    } catch (const json::exception&) {
    }
    wire_error(std::string(path) + ": HTTP " + std::to_string(res->status) + " " + detail);
  }
  return res->body;
}

}  // namespace

NoiseSchedule HttpScoreProvider::fetch_schedule() {
  auto client = make_client(base_url_, timeout_seconds_);
  const std::string path(kSchedulePath);
  return decode_schedule(checked_body(client.Get(path), path));
}

ScoreResult HttpScoreProvider::score(const ScoreRequest& request) {
  auto client = make_client(base_url_, timeout_seconds_);
  const std::string path(kGuidancePath);
  const std::string body = encode_guidance_request(request);
  const std::string reply = checked_body(client.Post(path, body, "application/json"), path);
  ScoreResult result;
  result.kind = ScoreKind::kPixelGradient;
  result.values = decode_guidance_response(reply, request.images);
  return result;
}

}  // namespace splatgen
