// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/report_json.hpp"

#include <cstdio>

#include <json.hpp>

#include "file_util.hpp"
#include "splatgen/error.hpp"

namespace splatgen {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, std::string(what) + ": " + e.what());
  }
}

template <typename T>
T field(const json& j, const char* key, const char* what) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string(what) + ": field '" + key + "': " + e.what());
  }
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? json(*v) : json(nullptr);
}

std::optional<double> get_optional(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) fail(ErrorCode::kParse, std::string("metric report: field '") + key + "' is not a number");
  return it->get<double>();
}

std::string cell(const std::optional<double>& v, const char* fmt) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, *v);
  return buf;
}

}  // namespace

std::string run_report_to_json(const RunReport& report, int indent) {
  json steps = json::array();
  for (const auto& s : report.steps) {
    steps.push_back({{"step", s.step},
                     {"stage", s.stage},
                     {"sds_mv", s.sds_mv},
                     {"sds_sd", s.sds_sd},
                     {"sparsity", s.sparsity},
                     {"gaussians", s.gaussians},
                     {"skipped", s.skipped}});
  }
  const json j = {{"label", report.label},
                  {"prompt", report.prompt},
                  {"seed", report.seed},
                  {"stage1_steps", report.stage1_steps},
                  {"stage2_steps", report.stage2_steps},
                  {"stage_seconds", report.stage_seconds},
                  {"total_seconds", report.total_seconds},
                  {"gpu_hours", report.total_seconds / 3600.0},
                  {"skipped_steps", report.skipped_steps},
                  {"final_gaussians", report.final_gaussians},
                  {"steps", steps}};
  return j.dump(indent);
}

RunReport run_report_from_json(std::string_view text) {
  const json j = parse_json(text, "run report");
  constexpr const char* what = "run report";
  RunReport r;
  r.label = field<std::string>(j, "label", what);
  r.prompt = field<std::string>(j, "prompt", what);
  r.seed = field<std::uint64_t>(j, "seed", what);
  r.stage1_steps = field<int>(j, "stage1_steps", what);
  r.stage2_steps = field<int>(j, "stage2_steps", what);
  r.stage_seconds = field<std::array<double, 2>>(j, "stage_seconds", what);
  r.total_seconds = field<double>(j, "total_seconds", what);
  r.skipped_steps = field<int>(j, "skipped_steps", what);
  r.final_gaussians = field<std::size_t>(j, "final_gaussians", what);
  if (j.contains("steps")) {
    for (const auto& s : j.at("steps")) {
      StepRecord rec;
      rec.step = field<std::int64_t>(s, "step", what);
      rec.stage = field<int>(s, "stage", what);
      rec.sds_mv = field<double>(s, "sds_mv", what);
      rec.sds_sd = field<double>(s, "sds_sd", what);
      rec.sparsity = field<double>(s, "sparsity", what);
      rec.gaussians = field<std::size_t>(s, "gaussians", what);
      rec.skipped = field<bool>(s, "skipped", what);
      r.steps.push_back(rec);
    }
  }
  return r;
}

RunReport load_run_report(const std::filesystem::path& path) {
  return run_report_from_json(detail::read_file(path));
}

std::string metric_report_to_json(const MetricReport& report, int indent) {
  json j;
  j["label"] = report.label;
  put_optional(j, "janus_frequency_percent", report.janus_frequency_percent);
  put_optional(j, "good_alignment_percent", report.good_alignment_percent);
  put_optional(j, "r_precision_percent", report.r_precision_percent);
  put_optional(j, "fid", report.fid);
  if (report.inception_score) {
    j["inception_score"] = {{"mean", report.inception_score->mean},
                            {"std", report.inception_score->std}};
  } else {
    j["inception_score"] = nullptr;
  }
  put_optional(j, "gpu_hours", report.gpu_hours);
  return j.dump(indent);
}

MetricReport metric_report_from_json(std::string_view text) {
  const json j = parse_json(text, "metric report");
  MetricReport r;
  r.label = field<std::string>(j, "label", "metric report");
  r.janus_frequency_percent = get_optional(j, "janus_frequency_percent");
  r.good_alignment_percent = get_optional(j, "good_alignment_percent");
  r.r_precision_percent = get_optional(j, "r_precision_percent");
  r.fid = get_optional(j, "fid");
  if (const auto it = j.find("inception_score"); it != j.end() && !it->is_null()) {
    r.inception_score = InceptionScore{field<double>(*it, "mean", "metric report"),
                                       field<double>(*it, "std", "metric report")};
  }
  r.gpu_hours = get_optional(j, "gpu_hours");
  return r;
}

MetricReport load_metric_report(const std::filesystem::path& path) {
  return metric_report_from_json(detail::read_file(path));
}

std::string metric_reports_to_markdown(const std::vector<MetricReport>& reports) {
  std::string out =
      "| Method | Janus (%) | Good alignment (%) | R-Precision (%) | FID | IS | GPU-h |\n"
      "|---|---|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    std::string is = "-";
    if (r.inception_score) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f ± %.2f", r.inception_score->mean, r.inception_score->std);
      is = buf;
    }
    out += "| " + r.label + " | " + cell(r.janus_frequency_percent, "%.1f") + " | " +
           cell(r.good_alignment_percent, "%.1f") + " | " + cell(r.r_precision_percent, "%.1f") +
           " | " + cell(r.fid, "%.2f") + " | " + is + " | " + cell(r.gpu_hours, "%.2f") + " |\n";
  }
  return out;
}

void save_run_report(const RunReport& report, const std::filesystem::path& path) {
  detail::write_file_atomic(path, run_report_to_json(report) + "\n");
}

void save_metric_report(const MetricReport& report, const std::filesystem::path& path) {
  detail::write_file_atomic(path, metric_report_to_json(report) + "\n");
}

void save_markdown_report(const std::vector<MetricReport>& reports,
                          const std::filesystem::path& path) {
  detail::write_file_atomic(path, metric_reports_to_markdown(reports));
}

}  // namespace splatgen
