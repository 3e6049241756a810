// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vsr/conv.hpp"
#include "vsr/metrics.hpp"
#include "vsr/pipeline.hpp"

namespace vsr {

/// C_i * H_i * W_i * K^2 * C_o, taken literally.
std::int64_t conv_flops(std::int64_t ci, std::int64_t hi, std::int64_t wi, std::int64_t k,
                        std::int64_t co);

struct FpgaKernelRow {
  int input_size = 0;         // n for an n x n input tile
  std::int64_t lut_wino = 0;  // LUTs of one Winograd convolution unit
  std::int64_t latency = 0;   // cycles
};

/// Device budget plus per-kernel synthesis rows for the throughput estimate.
struct FpgaProfile {
  std::int64_t lut_total = 0;
  double frequency_hz = 0.0;
  std::vector<FpgaKernelRow> rows;

  void validate() const;
  const FpgaKernelRow& row(int input_size) const;
};

inline constexpr std::int64_t kDefaultLutTotal = 326080;
inline constexpr double kDefaultFrequencyHz = 300e6;

/// LUT-based Winograd 3x3 units synthesized for 4x4 ... 8x8 inputs.
FpgaProfile winoconv_profile(std::int64_t lut_total = kDefaultLutTotal,
                             double frequency_hz = kDefaultFrequencyHz);

/// lut_total / lut_wino * conv_flops(1, n, n, 3, 1) * frequency / latency, in ops/s.
double fpga_max_flops(const FpgaProfile& profile, int input_size);

double theoretical_fps(double max_flops, double flops_per_frame);

struct BenchConfig {
  int width = 320;   // LR input size
  int height = 180;
  int frames = 30;
  int warmup = 5;
  ConvBackend backend = ConvBackend::gemm;
  bool fused = false;
};

struct BenchResult {
  std::string arch;
  int width = 0;
  int height = 0;
  int scale = 0;
  std::string backend;
  bool fused = false;
  std::string simd;
  int threads = 1;
  int frames = 0;
  int warmup = 0;
  double wall_seconds = 0.0;
  double fps = 0.0;
  double mean_frame_ms = 0.0;
  double median_frame_ms = 0.0;
  std::int64_t macs_per_frame = 0;
  std::int64_t flops_per_frame = 0;
};

/// Times frame-by-frame upscaling of a synthetic sequence after `warmup`
/// untimed frames. With `fused`, batch norms are folded before timing.
BenchResult time_pipeline(const VsrModel& model, const BenchConfig& cfg);

struct Report {
  std::vector<BenchResult> bench;
  std::vector<MetricRecord> metrics;
  std::map<std::string, std::string> metadata;
};

enum class ReportFormat { json, csv };

ReportFormat parse_report_format(std::string_view text);

/// Metadata describing every convention behind the numbers.
std::map<std::string, std::string> default_report_metadata();

/// Deterministic serialization; throws InputError for an empty report.
std::string emit_report(const Report& report, ReportFormat format);

/// Reads the metrics section of a JSON report.
Report parse_report_json(const std::string& text);

}  // namespace vsr
