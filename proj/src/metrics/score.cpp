// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "vsr/error.hpp"
#include "vsr/metrics.hpp"

namespace vsr {

std::string_view name(Orientation o) noexcept {
  return o == Orientation::higher_better ? "higher-better" : "lower-better";
}

Orientation default_orientation(std::string_view metric) noexcept {
  return (metric == "psnr" || metric == "ssim") ? Orientation::higher_better
                                                : Orientation::lower_better;
}

Normalized normalize_metric(const MetricRecord& rec) {
  if (!(rec.max > rec.min)) return {0.0, true};
  const double span = rec.max - rec.min;
  const double v = rec.orientation == Orientation::lower_better ? (rec.value - rec.min) / span
                                                                : (rec.max - rec.value) / span;
  return {std::clamp(v, 0.0, 1.0), false};
}

ScoreWeights ScoreWeights::equal(std::size_t n) {
  if (n == 0) throw ConfigError("score weights need at least one metric");
  return {std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

void ScoreWeights::validate() const {
  double sum = 0.0;
  for (double l : lambda) {
    if (!(l >= 0.0)) throw ConfigError("score weights must be non-negative");
    sum += l;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("score weights sum to " + std::to_string(sum) + ", expected 1");
  }
}

double quality_score(std::span<const MetricRecord> records, const ScoreWeights& w) {
  if (records.size() != w.lambda.size()) {
    throw ConfigError("quality_score: " + std::to_string(records.size()) + " metrics but " +
                      std::to_string(w.lambda.size()) + " weights");
  }
  w.validate();
  double penalty = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i)
    penalty += w.lambda[i] * normalize_metric(records[i]).value;
  return 1.0 - penalty;
}

void set_range(std::span<MetricRecord> same_metric) {
  if (same_metric.empty()) return;
  const auto [lo, hi] = std::minmax_element(
      same_metric.begin(), same_metric.end(),
      [](const MetricRecord& a, const MetricRecord& b) { return a.value < b.value; });
  const double mn = lo->value, mx = hi->value;
  for (MetricRecord& r : same_metric) {
    r.min = mn;
    r.max = mx;
  }
}

}  // namespace vsr
