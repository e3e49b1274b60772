// Copyright 2026 The splatgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "splatgen/error.hpp"
#include "splatgen/feature_file.hpp"
#include "splatgen/ply.hpp"
#include "splatgen/report_json.hpp"
#include "splatgen/run_config.hpp"

namespace splatgen {
namespace {

namespace fs = std::filesystem;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

// Float32-representable cloud so a round trip is bit-exact.
GaussianCloud f32_cloud(std::mt19937_64& rng, int n, int degree) {
  testing::SceneOptions opt;
  opt.gaussians = n;
  opt.sh_degree = degree;
  GaussianCloud c = testing::random_scene(rng, opt);
  auto f = [](double& v) { v = static_cast<float>(v); };
  for (auto& p : c.positions) p = p.cast<float>().cast<double>();
  for (auto& q : c.rotations) q = q.cast<float>().cast<double>();
  for (auto& s : c.log_scales) s = s.cast<float>().cast<double>();
  for (double& o : c.opacity_logits) f(o);
  for (double& v : c.sh_coeffs) f(v);
  return c;
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("splatgen_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

using Ply = TempDir;

TEST(PlyCodec, HeaderLayout) {
  GaussianCloud c(1);
  const std::vector<double> sh(12, 0.0);
  c.push_back(Eigen::Vector3d::Zero(), Quaternion(1, 0, 0, 0), Eigen::Vector3d::Zero(), 0.0, sh);
  const std::string bytes = encode_ply(c);
  std::string expected =
      "ply\nformat binary_little_endian 1.0\nelement vertex 1\n"
      "property float x\nproperty float y\nproperty float z\n"
      "property float f_dc_0\nproperty float f_dc_1\nproperty float f_dc_2\n";
  for (int k = 0; k < 9; ++k) expected += "property float f_rest_" + std::to_string(k) + "\n";
  expected +=
      "property float opacity\nproperty float scale_0\nproperty float scale_1\n"
      "property float scale_2\nproperty float rot_0\nproperty float rot_1\n"
      "property float rot_2\nproperty float rot_3\nend_header\n";
  ASSERT_EQ(bytes.substr(0, expected.size()), expected);
  EXPECT_EQ(bytes.size(), expected.size() + 4 * 23);
}

TEST(PlyCodec, RestCoefficientsAreChannelMajor) {
  GaussianCloud c(1);
  std::vector<double> sh(12);
  for (int k = 0; k < 4; ++k) {
    for (int ch = 0; ch < 3; ++ch) sh[static_cast<std::size_t>(3 * k + ch)] = 10 * k + ch;
  }
  c.push_back(Eigen::Vector3d::Zero(), Quaternion(1, 0, 0, 0), Eigen::Vector3d::Zero(), 0.0, sh);
  const std::string bytes = encode_ply(c);
  const std::size_t body = bytes.find("end_header\n") + 11;
  auto value = [&](int index) {
    float f;
    std::memcpy(&f, bytes.data() + body + 4 * index, 4);
    return f;
  };
  // f_dc_0..2 then f_rest: red bands 1..3, green bands 1..3, blue bands 1..3.
  EXPECT_EQ(value(3), 0.0f);
  EXPECT_EQ(value(4), 1.0f);
  EXPECT_EQ(value(6), 10.0f);
  EXPECT_EQ(value(7), 20.0f);
  EXPECT_EQ(value(8), 30.0f);
  EXPECT_EQ(value(9), 11.0f);
  EXPECT_EQ(value(12), 12.0f);
  EXPECT_EQ(value(14), 32.0f);
}

TEST_F(Ply, RoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  for (int degree = 0; degree <= 3; ++degree) {
    const GaussianCloud c = f32_cloud(rng, 100, degree);
    const fs::path path = dir_ / ("cloud" + std::to_string(degree) + ".ply");
    save_ply(c, path);
    EXPECT_EQ(load_ply(path), c);
    EXPECT_EQ(encode_ply(load_ply(path)), encode_ply(c));
  }
}

TEST(PlyCodec, EmptyCloud) {
  const std::string bytes = encode_ply(GaussianCloud{});
  EXPECT_NE(bytes.find("element vertex 0\n"), std::string::npos);
  EXPECT_TRUE(decode_ply(bytes).empty());
}

TEST(PlyCodec, RejectsShuffledProperties) {
  std::mt19937_64 rng(2);
  std::string bytes = encode_ply(f32_cloud(rng, 3, 0));
  const auto x = bytes.find("property float x\nproperty float y\n");
  ASSERT_NE(x, std::string::npos);
  bytes.replace(x, 34, "property float y\nproperty float x\n");
  EXPECT_EQ(code_of([&] { decode_ply(bytes); }), ErrorCode::kParse);
}

TEST(PlyCodec, RejectsTruncationAndTrailingBytes) {
  std::mt19937_64 rng(3);
  const std::string bytes = encode_ply(f32_cloud(rng, 5, 1));
  EXPECT_EQ(code_of([&] { decode_ply(bytes.substr(0, bytes.size() - 1)); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([&] { decode_ply(bytes + "x"); }), ErrorCode::kParse);
}

TEST(PlyCodec, NanReportsByteOffset) {
  std::mt19937_64 rng(4);
  std::string bytes = encode_ply(f32_cloud(rng, 2, 0));
  const std::size_t body = bytes.find("end_header\n") + 11;
  const float nan = std::nanf("");
  const std::size_t offset = body + 14 * 4 + 2 * 4;  // second vertex, z
  std::memcpy(bytes.data() + offset, &nan, 4);
  const std::string msg = message_of([&] { decode_ply(bytes); });
  EXPECT_NE(msg.find(std::to_string(offset)), std::string::npos) << msg;
}

TEST(PlyCodec, EveryHeaderByteMutationIsRejected) {
  std::mt19937_64 rng(5);
  const std::string bytes = encode_ply(f32_cloud(rng, 4, 2));
  const std::size_t header = bytes.find("end_header\n") + 11;
  for (std::size_t i = 0; i < header; ++i) {
    std::string m = bytes;
    m[i] = static_cast<char>(m[i] ^ 0x20);
    EXPECT_THROW(decode_ply(m), Error) << "byte " << i;
  }
}

TEST_F(Ply, MissingFileIsIoError) {
  EXPECT_EQ(code_of([&] { load_ply(dir_ / "absent.ply"); }), ErrorCode::kIo);
}

using Features = TempDir;

TEST_F(Features, RoundTripAndLayout) {
  FeatureSet f;
  f.rows.resize(3, 2);
  f.rows << 1, 2, 3, 4, 5, 6.5;
  const std::string bytes = encode_features(f);
  ASSERT_EQ(bytes.size(), 12u + 4 * 6);
  EXPECT_EQ(bytes.substr(0, 4), "FTV1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 3);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2);
  float last;
  std::memcpy(&last, bytes.data() + 12 + 20, 4);
  EXPECT_EQ(last, 6.5f);

  save_features(f, dir_ / "f.ftv");
  const FeatureSet back = load_features(dir_ / "f.ftv", "render");
  EXPECT_EQ(back.rows, f.rows);
  EXPECT_EQ(back.source, "render");
}

TEST(FeatureCodec, StrictParsing) {
  FeatureSet f;
  f.rows = Eigen::MatrixXd::Ones(2, 3);
  const std::string bytes = encode_features(f);
  EXPECT_EQ(code_of([&] { decode_features(bytes.substr(0, bytes.size() - 4)); }),
            ErrorCode::kParse);
  EXPECT_EQ(code_of([&] { decode_features(bytes + "abcd"); }), ErrorCode::kParse);
  std::string zero_rows = bytes;
  zero_rows[4] = 0;
  EXPECT_EQ(code_of([&] { decode_features(zero_rows); }), ErrorCode::kParse);
  std::string nan = bytes;
  const float q = std::nanf("");
  std::memcpy(nan.data() + 16, &q, 4);
  EXPECT_EQ(code_of([&] { decode_features(nan); }), ErrorCode::kInvalidFeature);
  for (std::size_t i = 0; i < 12; ++i) {
    std::string m = bytes;
    m[i] = static_cast<char>(m[i] ^ 0x01);
    EXPECT_THROW(decode_features(m), Error) << "byte " << i;
  }
}

TEST(RunConfig, SerializeParseIdentity) {
  TrainConfig c;
  EXPECT_EQ(parse_run_config(serialize_run_config(c)), c);
  c.stage2_steps = 0;
  c.cfg_scale = 7.25;
  c.lr_position = 1.0 / 3.0;
  c.seed = 18446744073709551615ull;
  c.densify_in_stage2 = false;
  c.negative_prompt = "blurry, dark";
  c.background = {1.0, 0.5, 0.0};
  EXPECT_EQ(parse_run_config(serialize_run_config(c)), c);
  EXPECT_EQ(run_config_keys().size(), 51u);
}

TEST(RunConfig, CommentsBlankLinesAndBase) {
  TrainConfig base;
  base.seed = 9;
  const TrainConfig c = parse_run_config("# tuned\n\nstage1_steps=10\nweight_sd=0\n", base);
  EXPECT_EQ(c.stage1_steps, 10);
  EXPECT_EQ(c.weight_sd, 0.0);
  EXPECT_EQ(c.seed, 9u);
}

TEST(RunConfig, StrictKeysAndValues) {
  EXPECT_EQ(code_of([] { parse_run_config("stage1_step=10\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_run_config("seed=1\nseed=2\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_run_config("seed=abc\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_run_config("cfg_scale=1.5x\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_run_config("densify_in_stage2=maybe\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_run_config("background=1,2\n"); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { parse_run_config("no equals sign\n"); }), ErrorCode::kConfig);
  const std::string msg = message_of([] { parse_run_config("seed=1\n\nbogus=3\n"); });
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(RunConfig, SingleValueOverride) {
  TrainConfig c;
  set_run_config_value(c, "stage2_steps", "0");
  set_run_config_value(c, "background", "1,1,1");
  EXPECT_EQ(c.stage2_steps, 0);
  EXPECT_EQ(c.background, (std::array<double, 3>{1, 1, 1}));
  EXPECT_EQ(code_of([&] { set_run_config_value(c, "nope", "1"); }), ErrorCode::kConfig);
}

TEST(ReportJson, RunReportRoundTrip) {
  RunReport r;
  r.label = "full-model";
  r.prompt = "a \"quoted\" corgi";
  r.seed = 42;
  r.stage1_steps = 2;
  r.stage2_steps = 1;
  r.stage_seconds = {1200.5, 599.5};
  r.total_seconds = 1800.0;
  r.skipped_steps = 1;
  r.final_gaussians = 321;
  r.steps.push_back({1, 1, 0.25, 0.0, 0.1, 200, false});
  r.steps.push_back({2, 1, 0.0, 0.0, 0.0, 200, true});
  r.steps.push_back({3, 2, 0.125, 0.5, 0.05, 210, false});
  const std::string text = run_report_to_json(r);
  EXPECT_NE(text.find("\"gpu_hours\": 0.5"), std::string::npos) << text;
  const RunReport back = run_report_from_json(text);
  EXPECT_EQ(back.label, r.label);
  EXPECT_EQ(back.prompt, r.prompt);
  EXPECT_EQ(back.stage_seconds, r.stage_seconds);
  EXPECT_EQ(back.total_seconds, r.total_seconds);
  EXPECT_EQ(back.final_gaussians, r.final_gaussians);
  ASSERT_EQ(back.steps.size(), 3u);
  EXPECT_TRUE(back.steps[1].skipped);
  EXPECT_EQ(back.steps[2].sds_sd, 0.5);
  EXPECT_EQ(back.steps[2].stage, 2);
  EXPECT_EQ(code_of([] { run_report_from_json("{\"label\": 3}"); }), ErrorCode::kParse);
}

TEST(ReportJson, MetricReportRoundTripAndNulls) {
  MetricReport m;
  m.label = "ours";
  m.janus_frequency_percent = 6.0;
  m.fid = 0.0;
  m.inception_score = InceptionScore{9.5, 0.25};
  const std::string text = metric_report_to_json(m);
  EXPECT_NE(text.find("\"r_precision_percent\": null"), std::string::npos) << text;
  const MetricReport back = metric_report_from_json(text);
  EXPECT_EQ(back.label, "ours");
  EXPECT_EQ(back.janus_frequency_percent, 6.0);
  EXPECT_FALSE(back.r_precision_percent.has_value());
  EXPECT_FALSE(back.gpu_hours.has_value());
  ASSERT_TRUE(back.inception_score.has_value());
  EXPECT_EQ(back.inception_score->mean, 9.5);
  EXPECT_EQ(back.inception_score->std, 0.25);
}

TEST(ReportJson, MarkdownTable) {
  MetricReport a;
  a.label = "ours";
  a.janus_frequency_percent = 6.0;
  a.gpu_hours = 0.5;
  MetricReport b;
  b.label = "first stage";
  b.fid = 12.25;
  const std::string md = metric_reports_to_markdown({a, b});
  EXPECT_EQ(md.rfind("| Method | Janus (%) | Good alignment (%) | R-Precision (%) | FID | IS | GPU-h |",
                     0),
            0u)
      << md;
  EXPECT_NE(md.find("| ours |"), std::string::npos);
  EXPECT_NE(md.find("| first stage |"), std::string::npos);
  EXPECT_NE(md.find("12.25"), std::string::npos);
}

}  // namespace
}  // namespace splatgen
