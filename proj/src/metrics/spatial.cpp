// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <string>
#include <vector>

#include "vsr/error.hpp"
#include "vsr/metrics.hpp"

namespace vsr {

Tensor luma(const Tensor& frame) {
  const Shape& s = frame.shape();
  if (s.c == 1) return frame;
  if (s.c != 3) throw ShapeError("luma expects 1 or 3 channels, got " + to_string(s));
  Tensor out({s.n, 1, s.h, s.w});
  for (int n = 0; n < s.n; ++n) {
    const auto r = frame.channel(n, 0);
    const auto g = frame.channel(n, 1);
    const auto b = frame.channel(n, 2);
    auto y = out.channel(n, 0);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = 0.299f * r[i] + 0.587f * g[i] + 0.114f * b[i];
  }
  return out;
}

namespace {

void require_same(const Tensor& a, const Tensor& b, const char* who) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(who) + ": " + to_string(a.shape()) + " vs " +
                     to_string(b.shape()));
  }
}

}  // namespace

double psnr(const Tensor& a, const Tensor& b) {
  require_same(a, b, "psnr");
  const Tensor ya = luma(a);
  const Tensor yb = luma(b);
  double se = 0.0;
  for (std::size_t i = 0; i < ya.size(); ++i) {
    const double d = static_cast<double>(ya.data()[i]) - yb.data()[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(ya.size());
  if (mse == 0.0) return kPsnrCapDb;
  return std::min(kPsnrCapDb, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Tensor& a, const Tensor& b, const SsimParams& p) {
  require_same(a, b, "ssim");
  const Shape& s = a.shape();
  if (s.h < p.window || s.w < p.window) {
    throw ShapeError("ssim: frame " + to_string(s) + " smaller than the " +
                     std::to_string(p.window) + "x" + std::to_string(p.window) + " window");
  }
  const Tensor ya = luma(a);
  const Tensor yb = luma(b);

  std::vector<double> g(p.window);
  double gsum = 0.0;
  const double mid = (p.window - 1) / 2.0;
  for (int i = 0; i < p.window; ++i) {
    g[i] = std::exp(-((i - mid) * (i - mid)) / (2.0 * p.sigma * p.sigma));
    gsum += g[i];
  }
  for (double& v : g) v /= gsum;

  const double c1 = (p.k1 * p.range) * (p.k1 * p.range);
  const double c2 = (p.k2 * p.range) * (p.k2 * p.range);
  const int oh = s.h - p.window + 1;
  const int ow = s.w - p.window + 1;

  double total = 0.0;
  std::size_t count = 0;
  for (int n = 0; n < s.n; ++n) {
    const auto x = ya.channel(n, 0);
    const auto y = yb.channel(n, 0);
    // Separable filtering of x, y, x^2, y^2, xy: horizontal pass first.
    std::vector<double> h(static_cast<std::size_t>(5) * s.h * ow);
    auto hidx = [&](int q, int r, int c) { return (static_cast<std::size_t>(q) * s.h + r) * ow + c; };
    for (int r = 0; r < s.h; ++r)
      for (int c = 0; c < ow; ++c) {
        double m[5] = {0, 0, 0, 0, 0};
        for (int k = 0; k < p.window; ++k) {
          const std::size_t i = static_cast<std::size_t>(r) * s.w + c + k;
          const double xv = x[i], yv = y[i];
          m[0] += g[k] * xv;
          m[1] += g[k] * yv;
          m[2] += g[k] * (xv * xv);
          m[3] += g[k] * (yv * yv);
          m[4] += g[k] * (xv * yv);
        }
        for (int q = 0; q < 5; ++q) h[hidx(q, r, c)] = m[q];
      }
    for (int r = 0; r < oh; ++r)
      for (int c = 0; c < ow; ++c) {
        double m[5] = {0, 0, 0, 0, 0};
        for (int k = 0; k < p.window; ++k)
          for (int q = 0; q < 5; ++q) m[q] += g[k] * h[hidx(q, r + k, c)];
        const double mx = m[0], my = m[1];
        const double vx = m[2] - mx * mx;
        const double vy = m[3] - my * my;
        const double cov = m[4] - mx * my;
        // Operand order keeps ssim(a, b) == ssim(b, a) bit for bit.
        total += ((2 * (mx * my) + c1) * (2 * cov + c2)) /
                 ((mx * mx + my * my + c1) * (vx + vy + c2));
        ++count;
      }
  }
  return total / static_cast<double>(count);
}

}  // namespace vsr
