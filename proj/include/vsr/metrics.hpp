// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vsr/tensor.hpp"

namespace vsr {

/// Frames are (1, c, h, w) with values in [0, 1].
using FrameSequence = std::vector<Tensor>;

/// ITU-R BT.601 luma of an RGB frame; single-channel frames pass through.
Tensor luma(const Tensor& frame);

inline constexpr double kPsnrCapDb = 100.0;

/// 10 log10(1 / MSE) on luma, capped at kPsnrCapDb for identical frames.
double psnr(const Tensor& a, const Tensor& b);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double range = 1.0;
};

/// Mean SSIM over every full Gaussian window position, on luma.
double ssim(const Tensor& a, const Tensor& b, const SsimParams& p = {});

/// Pyramidal Lucas-Kanade settings.
struct FlowParams {
  int levels = 3;
  int window = 7;
  int iterations = 5;
  double min_eigenvalue = 1e-7;

  /// Largest displacement component (pixels) the pyramid can represent.
  int search_range() const noexcept;
};

struct FlowResult {
  Tensor flow;              // (1, 2, h, w): x then y displacement, a(p) ~ b(p + flow(p))
  bool degenerate = false;  // a constant input produced an all-zero field
};

FlowResult dense_flow(const Tensor& a, const Tensor& b, const FlowParams& p = {});

/// Frame-to-frame perceptual distance: LP(a, a) = 0, symmetric, non-negative.
class PerceptualDistance {
 public:
  virtual ~PerceptualDistance() = default;
  virtual double operator()(const Tensor& a, const Tensor& b) const = 0;
  virtual std::string id() const = 0;
};

/// Distance between channel-normalized feature maps of a fixed random
/// three-stage conv extractor (8/16/32 channels, ReLU, 2x pooling between
/// stages). Weights depend only on the seed.
class FeatureProxyDistance final : public PerceptualDistance {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x5eedULL;

  explicit FeatureProxyDistance(std::uint64_t seed = kDefaultSeed);
  ~FeatureProxyDistance() override;

  double operator()(const Tensor& a, const Tensor& b) const override;
  std::string id() const override;

 private:
  struct Impl;
  std::uint64_t seed_;
  std::unique_ptr<Impl> impl_;
};

/// Mean over frame pairs of the mean per-pixel L1 distance between the
/// generated and reference motion fields.
double tof(const FrameSequence& gen, const FrameSequence& ref, const FlowParams& p = {});

/// Mean over frame pairs of |LP(gen[t-1], gen[t]) - LP(ref[t-1], ref[t])|.
double tlp(const FrameSequence& gen, const FrameSequence& ref, const PerceptualDistance& lp);

enum class Orientation { lower_better, higher_better };

std::string_view name(Orientation o) noexcept;
/// psnr and ssim are higher-better; everything else (lpips, tof, tlp) lower-better.
Orientation default_orientation(std::string_view metric) noexcept;

struct MetricRecord {
  std::string name;
  double value = 0.0;
  double min = 0.0;
  double max = 0.0;
  Orientation orientation = Orientation::lower_better;
};

struct Normalized {
  double value = 0.0;
  bool degenerate = false;  // min == max; value forced to 0
};

/// (M - min) / (max - min); higher-better metrics are negated first so 0 is always best.
Normalized normalize_metric(const MetricRecord& rec);

struct ScoreWeights {
  std::vector<double> lambda;

  static ScoreWeights equal(std::size_t n);
  void validate() const;  // non-negative, sum to 1 within 1e-9
};

/// 1 - sum(lambda_i * normalized_i).
double quality_score(std::span<const MetricRecord> records, const ScoreWeights& w);

/// Sets min/max of every record to the range of their values.
void set_range(std::span<MetricRecord> same_metric);

}  // namespace vsr
