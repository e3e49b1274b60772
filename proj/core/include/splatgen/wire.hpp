// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "splatgen/guidance.hpp"

namespace splatgen {

// JSON guidance protocol spoken with an external model server.
//
//   GET  /v1/schedule -> {"T": int, "alpha_bar": [float, ...]}
//   POST /v1/guidance <- {"mode": "sd"|"mv", "prompt", "negative_prompt",
//                         "timestep", "cfg_scale",
//                         "images": [{"camera": {"azimuth", "elevation",
//                                     "distance", "fov_deg"},
//                                     "rgb": base64 float32 HxWx3 LE,
//                                     "height", "width"}]}
//                     -> {"grads": [base64 float32 HxWx3 LE, ...]} | {"error"}
//
// The server returns final pixel-space SDS gradients; any latent encoding,
// noising and weighting happen on its side.

inline constexpr std::string_view kSchedulePath = "/v1/schedule";
inline constexpr std::string_view kGuidancePath = "/v1/guidance";
inline constexpr std::string_view kProviderUrlEnv = "SPLATGEN_PROVIDER_URL";

/// float32 little-endian, base64.
std::string encode_float_payload(const std::vector<double>& values);
std::vector<double> decode_float_payload(std::string_view base64, std::size_t expected_count);

std::string encode_schedule(const NoiseSchedule& schedule);
NoiseSchedule decode_schedule(std::string_view json);

/// A decoded /v1/guidance request, owning its images.
struct GuidanceWireRequest {
  GuidanceMode mode = GuidanceMode::kSingleView;
  std::string prompt;
  std::string negative_prompt;
  int timestep = 1;
  double cfg_scale = 1.0;
  std::vector<CameraPose> cameras;
  std::vector<Image> images;
};

std::string encode_guidance_request(const ScoreRequest& request);
GuidanceWireRequest decode_guidance_request(std::string_view json);

std::string encode_guidance_response(const std::vector<Image>& grads);
std::string encode_guidance_error(std::string_view message);
/// Validates count and shapes against `like`; a server-side error or a
/// malformed body throws kGuidanceUnavailable.
std::vector<Image> decode_guidance_response(std::string_view json, std::span<const Image> like);

/// ScoreProvider backed by a remote server speaking the protocol above.
class HttpScoreProvider final : public ScoreProvider {
 public:
  /// `base_url` like "http://127.0.0.1:8765".
  explicit HttpScoreProvider(std::string base_url, double timeout_seconds = 300.0);

  /// Handshake; kGuidanceUnavailable when the server is unreachable.
  NoiseSchedule fetch_schedule();

  ScoreResult score(const ScoreRequest& request) override;

 private:
  std::string base_url_;
  double timeout_seconds_;
};

}  // namespace splatgen
