// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "splatgen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "splatgen/error.hpp"
#include "splatgen/trainer.hpp"

namespace splatgen {

namespace {

void require_finite(const FeatureSet& set, const char* what) {
  if (!set.rows.allFinite()) {
    fail(ErrorCode::kInvalidFeature, std::string(what) + " contains non-finite values");
  }
}

}  // namespace

JanusVerdict janus_detect(const FeatureSet& features, double rho, int min_run,
                          FeatureDistance distance) {
  const Eigen::Index k = features.count();
  if (k < 3) {
    fail(ErrorCode::kInsufficientFrames,
         "janus_detect needs at least 3 frames, got " + std::to_string(k));
  }
  if (!(rho > 0.0)) fail(ErrorCode::kInvalidParameter, "rho must be positive");
  if (min_run < 1) fail(ErrorCode::kInvalidParameter, "min_run must be at least 1");
  require_finite(features, "janus features");

  const Eigen::RowVectorXd ref = features.rows.row(0);
  std::vector<double> dist(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::RowVectorXd f = features.rows.row(i);
    if (distance == FeatureDistance::kEuclidean) {
      dist[static_cast<std::size_t>(i)] = (f - ref).norm();
    } else {
      const double denom = f.norm() * ref.norm();
      if (denom == 0.0) fail(ErrorCode::kInvalidFeature, "zero-norm feature under cosine distance");
      dist[static_cast<std::size_t>(i)] = 1.0 - f.dot(ref) / denom;
    }
  }
  const double tau = rho * (dist[1] + dist[static_cast<std::size_t>(k - 1)]);

  JanusVerdict verdict;
  verdict.similar_mask.resize(static_cast<std::size_t>(k));
  verdict.similar_mask[0] = 1;  // the reference frame
  for (std::size_t i = 1; i < dist.size(); ++i) verdict.similar_mask[i] = dist[i] < tau;

  const auto& mask = verdict.similar_mask;
  const int n = static_cast<int>(k);
  int i = 0;
  while (i < n) {
    if (!mask[static_cast<std::size_t>(i)]) {
      ++i;
      continue;
    }
    int end = i;
    while (end + 1 < n && mask[static_cast<std::size_t>(end + 1)]) ++end;
    // Runs touching frame 0 directly or through the wrap-around are the
    // legitimate head/tail block.
    const bool head_or_tail = i == 0 || end == n - 1;
    if (!head_or_tail && end - i + 1 >= min_run) verdict.runs.emplace_back(i, end);
    i = end + 1;
  }
  verdict.has_janus = !verdict.runs.empty();
  return verdict;
}

double janus_frequency(std::span<const char> labels) {
  if (labels.empty()) fail(ErrorCode::kInvalidParameter, "janus_frequency needs labels");
  const auto hits = std::count_if(labels.begin(), labels.end(), [](char c) { return c != 0; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(labels.size());
}

std::vector<char> r_precision_hits(const FeatureSet& render_embeddings,
                                   const FeatureSet& prompt_embeddings,
                                   std::span<const int> true_index) {
  const Eigen::Index renders = render_embeddings.count();
  const Eigen::Index prompts = prompt_embeddings.count();
  if (render_embeddings.dim() != prompt_embeddings.dim()) {
    fail(ErrorCode::kShape, "render and prompt embeddings differ in dimension");
  }
  if (prompts < 2) fail(ErrorCode::kInvalidParameter, "r_precision needs at least 2 prompts");
  if (static_cast<Eigen::Index>(true_index.size()) != renders) {
    fail(ErrorCode::kShape, "one true prompt index is required per render");
  }
  require_finite(render_embeddings, "render embeddings");
  require_finite(prompt_embeddings, "prompt embeddings");

  const Eigen::VectorXd prompt_norms = prompt_embeddings.rows.rowwise().norm();
  if ((prompt_norms.array() == 0.0).any()) {
    fail(ErrorCode::kInvalidFeature, "zero-norm prompt embedding");
  }
  std::vector<char> hits(static_cast<std::size_t>(renders), 0);
  for (Eigen::Index r = 0; r < renders; ++r) {
    const int truth = true_index[static_cast<std::size_t>(r)];
    if (truth < 0 || truth >= prompts) fail(ErrorCode::kRange, "true prompt index out of range");
    const double rnorm = render_embeddings.rows.row(r).norm();
    if (rnorm == 0.0) fail(ErrorCode::kInvalidFeature, "zero-norm render embedding");
    Eigen::Index best = 0;
    double best_sim = -2.0;
    for (Eigen::Index p = 0; p < prompts; ++p) {
      const double sim = render_embeddings.rows.row(r).dot(prompt_embeddings.rows.row(p)) /
                         (rnorm * prompt_norms[p]);
      if (sim > best_sim) {  // strict: ties keep the lower index
        best_sim = sim;
        best = p;
      }
    }
    hits[static_cast<std::size_t>(r)] = best == truth;
  }
  return hits;
}

double r_precision(const FeatureSet& render_embeddings, const FeatureSet& prompt_embeddings,
                   std::span<const int> true_index) {
  const auto hits = r_precision_hits(render_embeddings, prompt_embeddings, true_index);
  if (hits.empty()) fail(ErrorCode::kInvalidParameter, "r_precision needs at least one render");
  return janus_frequency(hits);  // same percentage arithmetic
}

namespace {

struct GaussianFit {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

GaussianFit fit_gaussian(const Eigen::MatrixXd& rows) {
  GaussianFit fit;
  fit.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - fit.mean.transpose();
  fit.cov = centered.transpose() * centered / static_cast<double>(rows.rows() - 1);
  return fit;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) fail(ErrorCode::kNumerical, "eigendecomposition failed");
  const Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double fid(const FeatureSet& a, const FeatureSet& b) {
  if (a.dim() != b.dim()) fail(ErrorCode::kShape, "fid: feature dimensions differ");
  if (a.count() < 2 || b.count() < 2) {
    fail(ErrorCode::kInvalidParameter, "fid needs at least 2 rows per set");
  }
  require_finite(a, "fid set A");
  require_finite(b, "fid set B");
  const GaussianFit fa = fit_gaussian(a.rows);
  const GaussianFit fb = fit_gaussian(b.rows);

  // Tr((S_a S_b)^1/2) = sum sqrt(eig(S_a^1/2 S_b S_a^1/2)).
  const Eigen::MatrixXd sa = psd_sqrt(fa.cov);
  Eigen::MatrixXd inner = sa * fb.cov * sa;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) fail(ErrorCode::kNumerical, "eigendecomposition failed");
  double trace_sqrt = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double lambda = eig.eigenvalues()[i];
    if (lambda < -1e-6) {
      fail(ErrorCode::kNumerical,
           "covariance product has eigenvalue " + std::to_string(lambda) + " below -1e-6");
    }
    trace_sqrt += std::sqrt(std::max(lambda, 0.0));
  }
  const double value = (fa.mean - fb.mean).squaredNorm() + fa.cov.trace() + fb.cov.trace() -
                       2.0 * trace_sqrt;
  if (!std::isfinite(value)) fail(ErrorCode::kNumerical, "fid is not finite");
  return std::max(value, 0.0);
}

InceptionScore inception_score(const Eigen::MatrixXd& class_probs, int splits) {
  const Eigen::Index rows = class_probs.rows();
  const Eigen::Index classes = class_probs.cols();
  if (classes < 2) fail(ErrorCode::kInvalidParameter, "inception_score needs at least 2 classes");
  if (splits < 1 || splits > rows) {
    fail(ErrorCode::kInvalidParameter, "splits must lie in [1, rows]");
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto row = class_probs.row(r);
    if (!row.allFinite() || (row.array() < 0.0).any() || std::abs(row.sum() - 1.0) > 1e-6) {
      fail(ErrorCode::kInvalidFeature,
           "row " + std::to_string(r) + " is not a probability distribution");
    }
  }

  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(splits));
  for (int s = 0; s < splits; ++s) {
    const Eigen::Index begin = rows * s / splits;
    const Eigen::Index end = rows * (s + 1) / splits;
    const auto part = class_probs.middleRows(begin, end - begin);
    const Eigen::RowVectorXd marginal = part.colwise().mean();
    double kl_sum = 0.0;
    for (Eigen::Index r = 0; r < part.rows(); ++r) {
      for (Eigen::Index c = 0; c < classes; ++c) {
        const double p = part(r, c);
        if (p > 0.0) kl_sum += p * (std::log(p) - std::log(marginal[c]));
      }
    }
    scores.push_back(std::exp(kl_sum / static_cast<double>(part.rows())));
  }
  InceptionScore out;
  for (double v : scores) out.mean += v;
  out.mean /= static_cast<double>(scores.size());
  for (double v : scores) out.std += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(out.std / static_cast<double>(scores.size()));
  return out;
}

double gpu_hours(const RunReport& report) {
  if (report.total_seconds < 0.0 || report.stage_seconds[0] < 0.0 ||
      report.stage_seconds[1] < 0.0) {
    fail(ErrorCode::kInvalidParameter, "run report durations must be non-negative");
  }
  return report.total_seconds / 3600.0;
}

}  // namespace splatgen
