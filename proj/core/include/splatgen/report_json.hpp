// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "splatgen/metrics.hpp"
#include "splatgen/trainer.hpp"

namespace splatgen {

std::string run_report_to_json(const RunReport& report, int indent = 2);
RunReport run_report_from_json(std::string_view text);
RunReport load_run_report(const std::filesystem::path& path);

std::string metric_report_to_json(const MetricReport& report, int indent = 2);
MetricReport metric_report_from_json(std::string_view text);
MetricReport load_metric_report(const std::filesystem::path& path);

/// Markdown table with one row per report, columns mirroring the
/// evaluation tables (Janus %, alignment %, R-Precision %, FID, IS, GPU-h).
std::string metric_reports_to_markdown(const std::vector<MetricReport>& reports);

/// Atomic writes (temp file + rename).
void save_run_report(const RunReport& report, const std::filesystem::path& path);
void save_metric_report(const MetricReport& report, const std::filesystem::path& path);
void save_markdown_report(const std::vector<MetricReport>& reports,
                          const std::filesystem::path& path);

}  // namespace splatgen
