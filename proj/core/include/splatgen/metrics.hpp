// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace splatgen {

struct RunReport;

/// K feature vectors of dimension D stored as rows.
struct FeatureSet {
  Eigen::MatrixXd rows;
  std::string source;  // e.g. "detector", "realism", "text", "render"

  Eigen::Index count() const { return rows.rows(); }
  Eigen::Index dim() const { return rows.cols(); }
};

enum class FeatureDistance { kEuclidean, kCosine };

struct JanusVerdict {
  bool has_janus = false;
  std::vector<char> similar_mask;      // one entry per frame; frame 0 is the reference
  std::vector<std::pair<int, int>> runs;  // flagged repeats, 0-based inclusive [start, end]
};

/// Flags frames closer to frame 0 than rho * (dist_2 + dist_K) and reports
/// runs of at least `min_run` similar frames that are not cyclically
/// connected to the reference frame. Frames must be ordered by azimuth.
/// Throws kInsufficientFrames for K < 3, kInvalidParameter for rho <= 0.
JanusVerdict janus_detect(const FeatureSet& features, double rho = 1.5, int min_run = 2,
                          FeatureDistance distance = FeatureDistance::kEuclidean);

/// 100 * (#true) / (#labels); throws kInvalidParameter on an empty list.
double janus_frequency(std::span<const char> labels);

/// Per-render hit mask: the true prompt has the highest cosine similarity,
/// ties going to the lower prompt index.
std::vector<char> r_precision_hits(const FeatureSet& render_embeddings,
                                   const FeatureSet& prompt_embeddings,
                                   std::span<const int> true_index);

/// 100 * hits / renders (R = 1).
double r_precision(const FeatureSet& render_embeddings, const FeatureSet& prompt_embeddings,
                   std::span<const int> true_index);

/// Frechet distance between Gaussian fits (unbiased covariance) of two sets.
double fid(const FeatureSet& a, const FeatureSet& b);

struct InceptionScore {
  double mean = 0.0;
  double std = 0.0;
};

/// exp(mean KL(p(y|x) || p(y))) per split; mean and population std over
/// splits. Rows of `class_probs` are per-render class distributions.
InceptionScore inception_score(const Eigen::MatrixXd& class_probs, int splits = 10);

/// Wall-clock hours of one pipeline run.
double gpu_hours(const RunReport& report);

/// Columns of the evaluation tables; unset entries were not computed.
struct MetricReport {
  std::string label;
  std::optional<double> janus_frequency_percent;
  std::optional<double> good_alignment_percent;
  std::optional<double> r_precision_percent;
  std::optional<double> fid;
  std::optional<InceptionScore> inception_score;
  std::optional<double> gpu_hours;
};

}  // namespace splatgen
