// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace splatgen {

enum class ErrorCode {
  kInvalidParameter,
  kShape,
  kRange,
  kConfig,
  kGuidanceUnavailable,
  kDegenerateModel,
  kInsufficientFrames,
  kInvalidFeature,
  kNumerical,
  kParse,
  kIo,
};

/// Stable snake_case identifier, used in machine-readable CLI errors.
std::string_view error_code_name(ErrorCode code);

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace splatgen
