// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: generate, render, evaluate, export-report.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "splatgen/error.hpp"
#include "splatgen/feature_file.hpp"
#include "splatgen/metrics.hpp"
#include "splatgen/ply.hpp"
#include "splatgen/report_json.hpp"
#include "splatgen/run_config.hpp"
#include "splatgen/trainer.hpp"
#include "splatgen/turntable.hpp"
#include "splatgen/wire.hpp"

namespace {

using namespace splatgen;

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    line = trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

bool parse_int(const std::string& text, int& out) {
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

// Label CSV: "prompt_id,0|1" per line, optional header row.
std::vector<char> read_label_csv(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<char> labels;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto comma = lines[i].rfind(',');
    const std::string value = comma == std::string::npos ? "" : trim(lines[i].substr(comma + 1));
    if (value == "0" || value == "1") {
      labels.push_back(value == "1");
    } else if (i != 0) {
      fail(ErrorCode::kParse, path + ": line " + std::to_string(i + 1) + ": expected id,0|1");
    }
  }
  if (labels.empty()) fail(ErrorCode::kParse, path + ": no labels");
  return labels;
}

std::vector<int> read_indices(const std::string& path) {
  std::vector<int> out;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    int v = 0;
    if (!parse_int(lines[i], v)) {
      fail(ErrorCode::kParse, path + ": line " + std::to_string(i + 1) + ": expected an integer");
    }
    out.push_back(v);
  }
  return out;
}

void print_error(std::string_view code, std::string_view message) {
  const nlohmann::json j{{"error", {{"code", code}, {"message", message}}}};
  std::cerr << j.dump() << '\n';
}

struct GenerateArgs {
  std::string prompt;
  std::string negative_prompt;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string provider_url;
  std::string mock_target;
  std::optional<int> stage2_steps;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string report;
  int log_every = 0;
};

int run_generate(const GenerateArgs& a) {
  TrainConfig config = a.config_path.empty() ? TrainConfig{} : load_run_config(a.config_path);
  for (const auto& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) fail(ErrorCode::kConfig, "--set expects key=value, got '" + kv + "'");
    set_run_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (a.stage2_steps) config.stage2_steps = *a.stage2_steps;
  if (a.seed) config.seed = *a.seed;
  config.validate();

  Prompt prompt{a.prompt};
  prompt.negative_text = a.negative_prompt.empty() ? config.negative_prompt : a.negative_prompt;

  std::unique_ptr<ScoreProvider> provider;
  NoiseSchedule schedule =
      NoiseSchedule::linear(config.schedule_steps, config.beta_start, config.beta_end);
  GaussianCloud target;
  if (!a.mock_target.empty()) {
    target = load_ply(a.mock_target);
    target.validate();
    const Eigen::Vector3d bg = config.background_color();
    provider = std::make_unique<AnalyticDenoiser>(
        [&target, bg](const CameraPose& cam) { return render(target, cam, bg).rgb; });
  } else {
    if (a.provider_url.empty()) {
      fail(ErrorCode::kConfig, "no guidance source: pass --provider-url, set " +
                                   std::string(kProviderUrlEnv) + ", or use --mock-target");
    }
    auto http = std::make_unique<HttpScoreProvider>(a.provider_url);
    schedule = http->fetch_schedule();
    provider = std::move(http);
  }
  const Providers providers{{provider.get(), schedule}, GuidanceSource{provider.get(), schedule}};

  PipelineOptions options;
  if (a.log_every > 0) {
    options.on_step = [every = a.log_every](const StepRecord& r) {
      if (r.step % every != 0 && !r.skipped) return;
      const nlohmann::json j{{"step", r.step},       {"stage", r.stage},
                             {"sds_mv", r.sds_mv},   {"sds_sd", r.sds_sd},
                             {"sparsity", r.sparsity}, {"gaussians", r.gaussians},
                             {"skipped", r.skipped}};
      std::cerr << j.dump() << '\n';
    };
  }
  const PipelineResult result = run_pipeline(prompt, providers, config, options);
  save_ply(result.cloud, a.out);
  if (!a.report.empty()) save_run_report(result.report, a.report);
  return 0;
}

struct EvaluateArgs {
  std::string label = "model";
  std::vector<std::string> janus_features;
  std::string janus_labels;
  double rho = 1.5;
  int min_run = 2;
  std::string distance = "euclidean";
  std::string fid_a;
  std::string fid_b;
  std::string class_probs;
  int is_splits = 10;
  std::string render_embeddings;
  std::string prompt_embeddings;
  std::string true_index;
  std::string alignment_labels;
  std::vector<std::string> run_reports;
  std::string out;
};

int run_evaluate(const EvaluateArgs& a) {
  MetricReport report;
  report.label = a.label;
  if (!a.janus_labels.empty()) {
    report.janus_frequency_percent = janus_frequency(read_label_csv(a.janus_labels));
  } else if (!a.janus_features.empty()) {
    const FeatureDistance distance =
        a.distance == "cosine" ? FeatureDistance::kCosine : FeatureDistance::kEuclidean;
    std::vector<char> verdicts;
    for (const auto& path : a.janus_features) {
      verdicts.push_back(
          janus_detect(load_features(path, "detector"), a.rho, a.min_run, distance).has_janus);
    }
    report.janus_frequency_percent = janus_frequency(verdicts);
  }
  if (!a.alignment_labels.empty()) {
    report.good_alignment_percent = janus_frequency(read_label_csv(a.alignment_labels));
  }
  if (!a.render_embeddings.empty() || !a.prompt_embeddings.empty()) {
    if (a.render_embeddings.empty() || a.prompt_embeddings.empty()) {
      fail(ErrorCode::kConfig, "R-Precision needs both --render-embeddings and --prompt-embeddings");
    }
    const FeatureSet renders = load_features(a.render_embeddings, "render");
    const FeatureSet prompts = load_features(a.prompt_embeddings, "text");
    std::vector<int> truth;
    if (!a.true_index.empty()) {
      truth = read_indices(a.true_index);
    } else {
      if (renders.count() != prompts.count()) {
        fail(ErrorCode::kConfig, "without --true-index render i must match prompt i");
      }
      for (Eigen::Index i = 0; i < renders.count(); ++i) truth.push_back(static_cast<int>(i));
    }
    report.r_precision_percent = r_precision(renders, prompts, truth);
  }
  if (!a.fid_a.empty() || !a.fid_b.empty()) {
    if (a.fid_a.empty() || a.fid_b.empty()) fail(ErrorCode::kConfig, "FID needs --fid-a and --fid-b");
    report.fid = fid(load_features(a.fid_a, "realism"), load_features(a.fid_b, "realism"));
  }
  if (!a.class_probs.empty()) {
    report.inception_score = inception_score(load_features(a.class_probs, "classes").rows, a.is_splits);
  }
  if (!a.run_reports.empty()) {
    double hours = 0.0;
    for (const auto& path : a.run_reports) hours += gpu_hours(load_run_report(path));
    report.gpu_hours = hours / static_cast<double>(a.run_reports.size());
  }
  if (a.out.empty()) {
    std::cout << metric_report_to_json(report) << '\n';
  } else {
    save_metric_report(report, a.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-to-3D Gaussian splatting pipeline and evaluation tools", "splatgen"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Run the two-stage pipeline and write a PLY");
  generate->add_option("--prompt", gen.prompt, "Text prompt")->required();
  generate->add_option("--negative-prompt", gen.negative_prompt, "Override the negative prompt");
  generate->add_option("--config", gen.config_path, "key=value run config file")
      ->check(CLI::ExistingFile);
  generate->add_option("--set", gen.overrides, "Config override key=value (repeatable)");
  auto* url = generate->add_option("--provider-url", gen.provider_url, "Guidance server base URL")
                  ->envname(std::string(kProviderUrlEnv));
  auto* mock = generate->add_option("--mock-target", gen.mock_target,
                                    "Guide towards renders of this PLY (analytic denoiser)")
                   ->check(CLI::ExistingFile);
  mock->excludes(url);
  generate->add_option("--stage2-steps", gen.stage2_steps, "Override stage2_steps");
  generate->add_option("--seed", gen.seed, "Override the config seed");
  generate->add_option("--out", gen.out, "Output PLY")->required();
  generate->add_option("--report", gen.report, "Output run report JSON");
  generate->add_option("--log-every", gen.log_every, "Log a JSON step record to stderr every N steps");

  std::string ply, out_dir;
  int frames = 120, resolution = 256;
  auto* render_cmd = app.add_subcommand("render", "Render a white-background turntable");
  render_cmd->add_option("ply", ply, "Input PLY")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--out", out_dir, "Output directory")->required();
  render_cmd->add_option("--frames", frames, "Evenly spaced azimuths")->capture_default_str();
  render_cmd->add_option("--resolution", resolution, "Square image size")->capture_default_str();
  render_cmd->add_option("--seed", seed, "Accepted for uniformity; rendering is deterministic");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Compute metrics from feature files and labels");
  evaluate->add_option("--label", ev.label, "Row label")->capture_default_str();
  evaluate->add_option("--janus-features", ev.janus_features,
                       "Per-model turntable feature files (frame order = azimuth order)");
  evaluate->add_option("--janus-labels", ev.janus_labels,
                       "Manual Janus labels CSV; overrides the detector");
  evaluate->add_option("--rho", ev.rho, "Janus threshold factor")->capture_default_str();
  evaluate->add_option("--min-run", ev.min_run, "Shortest flagged run")->capture_default_str();
  evaluate->add_option("--distance", ev.distance, "Janus feature distance")
      ->check(CLI::IsMember({"euclidean", "cosine"}))
      ->capture_default_str();
  evaluate->add_option("--fid-a", ev.fid_a, "Realism features of the generated renders");
  evaluate->add_option("--fid-b", ev.fid_b, "Realism features of the reference images");
  evaluate->add_option("--class-probs", ev.class_probs, "Per-render class distributions");
  evaluate->add_option("--is-splits", ev.is_splits, "Inception Score splits")->capture_default_str();
  evaluate->add_option("--render-embeddings", ev.render_embeddings, "Image embeddings");
  evaluate->add_option("--prompt-embeddings", ev.prompt_embeddings, "Text embeddings");
  evaluate->add_option("--true-index", ev.true_index, "True prompt index per render, one per line");
  evaluate->add_option("--alignment-labels", ev.alignment_labels, "Human alignment labels CSV");
  evaluate->add_option("--run-report", ev.run_reports, "Run reports for GPU-hours (averaged)");
  evaluate->add_option("--out", ev.out, "Output metric report JSON (default stdout)");
  evaluate->add_option("--seed", seed, "Accepted for uniformity; evaluation is deterministic");

  std::vector<std::string> inputs;
  std::string markdown_out;
  auto* export_cmd = app.add_subcommand("export-report", "Merge metric reports into a table");
  export_cmd->add_option("reports", inputs, "Metric report JSON files")->required();
  export_cmd->add_option("--out", markdown_out, "Output markdown (default stdout)");
  export_cmd->add_option("--seed", seed, "Accepted for uniformity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*render_cmd) {
      render_turntable(load_ply(ply), out_dir, frames, resolution);
      return 0;
    }
    if (*evaluate) return run_evaluate(ev);
    if (*export_cmd) {
      std::vector<MetricReport> reports;
      for (const auto& path : inputs) reports.push_back(load_metric_report(path));
      if (markdown_out.empty()) {
        std::cout << metric_reports_to_markdown(reports);
      } else {
        save_markdown_report(reports, markdown_out);
      }
      return 0;
    }
  } catch (const Error& e) {
    print_error(error_code_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
