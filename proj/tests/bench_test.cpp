// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "json.hpp"
#include "vsr/bench.hpp"
#include "vsr/error.hpp"

namespace vsr {
namespace {

TEST(ConvFlops, LiteralProduct) {
  EXPECT_EQ(conv_flops(1, 1, 1, 1, 1), 1);
  EXPECT_EQ(conv_flops(1, 4, 4, 3, 1), 144);
  EXPECT_EQ(conv_flops(1, 5, 5, 3, 1), 225);
  EXPECT_EQ(conv_flops(3, 7, 5, 3, 2), 3 * 7 * 5 * 9 * 2);
  EXPECT_THROW(conv_flops(0, 1, 1, 1, 1), ConfigError);
}

struct ReferenceRow {
  int n;
  double lut, latency, max_tflops;
};
constexpr ReferenceRow kRows[] = {
    {4, 827, 6, 2.839}, {5, 2682, 10, 0.821}, {6, 4242, 12, 0.623}, {7, 10214, 16, 0.264}, {8, 16499, 17, 0.201},
};

TEST(FpgaEstimate, LutBudgetIsConsistentAcrossRows) {
  // Budget implied by each reference row: MAX * lut * latency / (FLOPs * f).
  for (const ReferenceRow& r : kRows) {
    const double implied = r.max_tflops * 1e12 * r.lut * r.latency / (r.n * r.n * 9.0 * 300e6);
    EXPECT_NEAR(implied / 326080.0, 1.0, 0.005) << r.n << "x" << r.n;
  }
}

TEST(FpgaEstimate, ReproducesTable) {
  const FpgaProfile p = winoconv_profile();
  EXPECT_EQ(p.lut_total, 326080);
  EXPECT_EQ(p.frequency_hz, 300e6);
  for (const ReferenceRow& r : kRows) {
    const double oracle = 326080.0 / r.lut * (r.n * r.n * 9.0) * 300e6 / r.latency;
    EXPECT_DOUBLE_EQ(fpga_max_flops(p, r.n), oracle);
    EXPECT_NEAR(fpga_max_flops(p, r.n) / (r.max_tflops * 1e12), 1.0, 0.005) << r.n;
  }
  EXPECT_THROW(fpga_max_flops(p, 9), InputError);
  FpgaProfile bad = p;
  bad.lut_total = 0;
  EXPECT_THROW(fpga_max_flops(bad, 4), ConfigError);
}

TEST(FpgaEstimate, TheoreticalFps) {
  EXPECT_NEAR(theoretical_fps(2.839e12, 28.55e9) / 99.44, 1.0, 0.001);
  EXPECT_NEAR(theoretical_fps(2.839e12, 64.06e9) / 44.32, 1.0, 0.001);
  EXPECT_NEAR(theoretical_fps(2.839e12, 257.01e9) / 11.05, 1.0, 0.001);
  EXPECT_THROW(theoretical_fps(1e12, 0.0), ConfigError);
}

TEST(TimePipeline, FieldsAndInvariants) {
  const VsrModel m = build_model(Arch::control_a, WeightInit::random_seeded, 3);
  BenchConfig cfg;
  cfg.width = 24;
  cfg.height = 16;
  cfg.frames = 4;
  cfg.warmup = 2;
  const BenchResult a = time_pipeline(m, cfg);
  const BenchResult b = time_pipeline(m, cfg);
  EXPECT_EQ(a.arch, "control-a");
  EXPECT_EQ(a.backend, "gemm");
  EXPECT_EQ(a.frames, 4);
  EXPECT_EQ(a.warmup, 2);
  EXPECT_EQ(a.scale, 3);
  EXPECT_FALSE(a.fused);
  EXPECT_GT(a.wall_seconds, 0.0);
  EXPECT_NEAR(a.fps, a.frames / a.wall_seconds, 1e-9 * a.fps);
  EXPECT_EQ(a.macs_per_frame, m.flops(16, 24).macs);
  EXPECT_EQ(a.flops_per_frame, m.flops(16, 24).flops());
  EXPECT_EQ(a.macs_per_frame, b.macs_per_frame);
  EXPECT_EQ(a.simd, b.simd);
  EXPECT_EQ(a.threads, b.threads);

  cfg.frames = 0;
  EXPECT_THROW(time_pipeline(m, cfg), ConfigError);
  cfg.frames = 1;
  cfg.width = 0;
  EXPECT_THROW(time_pipeline(m, cfg), ConfigError);
}

TEST(TimePipeline, RecurrentAndFused) {
  const VsrModel m = build_model(Arch::egvsr, WeightInit::random_seeded, 4);
  BenchConfig cfg;
  cfg.width = 12;
  cfg.height = 10;
  cfg.frames = 2;
  cfg.warmup = 1;
  cfg.fused = true;
  const BenchResult r = time_pipeline(m, cfg);
  EXPECT_TRUE(r.fused);
  EXPECT_EQ(r.scale, 4);
  EXPECT_EQ(r.arch, "egvsr");
  EXPECT_GT(r.fps, 0.0);
}

BenchResult sample_bench() {
  BenchResult r;
  r.arch = "egvsr";
  r.width = 320;
  r.height = 180;
  r.scale = 4;
  r.backend = "gemm";
  r.simd = "avx2";
  r.frames = 30;
  r.warmup = 5;
  r.wall_seconds = 12.5;
  r.fps = 2.4;
  r.mean_frame_ms = 416.66666666666669;
  r.median_frame_ms = 410.0;
  r.macs_per_frame = 53287833600;
  r.flops_per_frame = 106685050880;
  return r;
}

std::vector<std::string> data_lines(const std::string& doc) {
  std::vector<std::string> out;
  std::istringstream is(doc);
  for (std::string l; std::getline(is, l);)
    if (!l.empty() && l[0] != '#') out.push_back(l);
  return out;
}

TEST(Report, CsvSingleRow) {
  Report r;
  r.bench.push_back(sample_bench());
  r.metadata = default_report_metadata();
  const std::string csv = emit_report(r, ReportFormat::csv);
  const auto lines = data_lines(csv);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_TRUE(lines[0].starts_with("arch,width,height,scale,backend,fused"));
  EXPECT_TRUE(lines[1].starts_with("egvsr,320,180,4,gemm,false,avx2,1,30,5,12.5,2.4,"));
  EXPECT_NE(csv.find("# flow.window: 7"), std::string::npos);
}

TEST(Report, DeterministicAndTwoSections) {
  Report r;
  r.bench.push_back(sample_bench());
  r.metrics.push_back({"psnr", 31.5, 30, 33, Orientation::higher_better});
  r.metrics.push_back({"tof", 0.25, 0.1, 0.4, Orientation::lower_better});
  r.metadata = default_report_metadata();
  const std::string j1 = emit_report(r, ReportFormat::json);
  EXPECT_EQ(j1, emit_report(r, ReportFormat::json));
  EXPECT_EQ(emit_report(r, ReportFormat::csv), emit_report(r, ReportFormat::csv));

  const auto doc = nlohmann::ordered_json::parse(j1);
  EXPECT_TRUE(doc.contains("bench"));
  EXPECT_TRUE(doc.contains("metrics"));
  EXPECT_EQ(doc["metadata"]["lp.proxy"], "random conv features 8/16/32, seed 0x5eed");

  const Report back = parse_report_json(j1);
  ASSERT_EQ(back.metrics.size(), 2u);
  EXPECT_EQ(back.metrics[0].name, "psnr");
  EXPECT_EQ(back.metrics[0].orientation, Orientation::higher_better);
  EXPECT_EQ(back.metrics[1].value, 0.25);
  ASSERT_EQ(back.bench.size(), 1u);
  EXPECT_EQ(back.bench[0].macs_per_frame, 53287833600);
  EXPECT_EQ(emit_report(back, ReportFormat::json), j1);
}

TEST(Report, EmptyRejectedAndFormats) {
  EXPECT_THROW(emit_report(Report{}, ReportFormat::json), InputError);
  EXPECT_THROW(emit_report(Report{}, ReportFormat::csv), InputError);
  EXPECT_EQ(parse_report_format("csv"), ReportFormat::csv);
  EXPECT_THROW(parse_report_format("xml"), ConfigError);
  EXPECT_THROW(parse_report_json("{ not json"), ParseError);
}

}  // namespace
}  // namespace vsr
