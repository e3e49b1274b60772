// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "splatgen/trainer.hpp"

namespace splatgen {

/// Every accepted key, in serialization order.
std::vector<std::string> run_config_keys();

/// Applies `key=value` lines on top of `base`. Blank lines and lines starting
/// with '#' are ignored. Unknown or repeated keys and malformed values throw
/// kConfig with the offending line number.
TrainConfig parse_run_config(std::string_view text, const TrainConfig& base = {});

/// Sets a single field from its textual value (used for CLI overrides).
void set_run_config_value(TrainConfig& config, std::string_view key, std::string_view value);

/// One line per key; parse_run_config(serialize_run_config(c)) == c.
std::string serialize_run_config(const TrainConfig& config);

TrainConfig load_run_config(const std::filesystem::path& path, const TrainConfig& base = {});

}  // namespace splatgen
