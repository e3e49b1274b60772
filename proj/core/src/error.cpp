// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/error.hpp"

namespace splatgen {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid_parameter";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kRange: return "range";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kGuidanceUnavailable: return "guidance_unavailable";
    case ErrorCode::kDegenerateModel: return "degenerate_model";
    case ErrorCode::kInsufficientFrames: return "insufficient_frames";
    case ErrorCode::kInvalidFeature: return "invalid_feature";
    case ErrorCode::kNumerical: return "numerical";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace splatgen
