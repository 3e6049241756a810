// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Coarse-to-fine Lucas-Kanade. At each pyramid level the structure tensor of
// the first image is accumulated over a square window, and the flow is
// refined by solving G d = -sum(grad(a) * (warp(b) - a)) per pixel.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "vsr/error.hpp"
#include "vsr/metrics.hpp"

namespace vsr {
namespace {

struct Plane {
  int h = 0;
  int w = 0;
  std::vector<float> v;

  float at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

Plane downsample(const Plane& p) {
  Plane out{(p.h + 1) / 2, (p.w + 1) / 2, {}};
  out.v.resize(static_cast<std::size_t>(out.h) * out.w);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x) {
      const int y0 = 2 * y, x0 = 2 * x;
      const int y1 = std::min(y0 + 1, p.h - 1), x1 = std::min(x0 + 1, p.w - 1);
      out.v[static_cast<std::size_t>(y) * out.w + x] =
          0.25f * (p.at(y0, x0) + p.at(y0, x1) + p.at(y1, x0) + p.at(y1, x1));
    }
  return out;
}

// Windowed sums via a summed-area table; windows are clipped at the border.
class BoxSum {
 public:
  BoxSum(const std::vector<double>& src, int h, int w) : h_(h), w_(w), t_((h + 1) * static_cast<std::size_t>(w + 1), 0.0) {
    for (int y = 0; y < h; ++y) {
      double row = 0.0;
      for (int x = 0; x < w; ++x) {
        row += src[static_cast<std::size_t>(y) * w + x];
        t_[idx(y + 1, x + 1)] = t_[idx(y, x + 1)] + row;
      }
    }
  }
  double sum(int y, int x, int r) const {
    const int y0 = std::max(0, y - r), y1 = std::min(h_, y + r + 1);
    const int x0 = std::max(0, x - r), x1 = std::min(w_, x + r + 1);
    return t_[idx(y1, x1)] - t_[idx(y0, x1)] - t_[idx(y1, x0)] + t_[idx(y0, x0)];
  }

 private:
  std::size_t idx(int y, int x) const { return static_cast<std::size_t>(y) * (w_ + 1) + x; }
  int h_, w_;
  std::vector<double> t_;
};

Plane to_plane(const Tensor& frame) {
  const Tensor y = luma(frame);
  const Shape& s = y.shape();
  if (s.n != 1) throw ShapeError("dense_flow expects single frames, got " + to_string(s));
  return {s.h, s.w, y.values()};
}

}  // namespace

int FlowParams::search_range() const noexcept {
  // Coarsest level reaches window/2; each finer level doubles it and adds window/2.
  const int half = window / 2;
  int range = 0;
  for (int l = 0; l < levels; ++l) range = 2 * range + half;
  return range;
}

FlowResult dense_flow(const Tensor& a, const Tensor& b, const FlowParams& p) {
  if (a.shape() != b.shape()) {
    throw ShapeError("dense_flow: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
  if (p.levels < 1 || p.window < 3 || p.window % 2 == 0 || p.iterations < 1) {
    throw ConfigError("dense_flow: need levels >= 1, odd window >= 3, iterations >= 1");
  }
  const Plane pa = to_plane(a);
  const Plane pb = to_plane(b);
  const int h = pa.h, w = pa.w;

  FlowResult result;
  result.flow = Tensor({1, 2, h, w});
  auto flat = [](const Plane& q) {
    const auto [lo, hi] = std::minmax_element(q.v.begin(), q.v.end());
    return *hi - *lo == 0.0f;
  };
  if (flat(pa) || flat(pb)) {
    result.degenerate = true;
    return result;
  }

  std::vector<Plane> pyr_a{pa}, pyr_b{pb};
  for (int l = 1; l < p.levels; ++l) {
    if (pyr_a.back().h < 2 * p.window || pyr_a.back().w < 2 * p.window) break;
    pyr_a.push_back(downsample(pyr_a.back()));
    pyr_b.push_back(downsample(pyr_b.back()));
  }
  const int levels = static_cast<int>(pyr_a.size());
  const int half = p.window / 2;
  // Flow limit per level, coarsest first.
  std::vector<float> limit(levels);
  for (int l = levels - 1, range = 0; l >= 0; --l) {
    range = 2 * range + half;
    limit[l] = static_cast<float>(range);
  }

  std::vector<float> u, v;  // flow at the current level
  int cur_h = 0, cur_w = 0;
  for (int l = levels - 1; l >= 0; --l) {
    const Plane& A = pyr_a[l];
    const Plane& B = pyr_b[l];
    const std::size_t n = static_cast<std::size_t>(A.h) * A.w;

    std::vector<float> nu(n, 0.0f), nv(n, 0.0f);
    if (!u.empty()) {
      // Upsample the coarser estimate; displacements double with resolution.
      const Tensor cu({1, 1, cur_h, cur_w}, u);
      const Tensor cv({1, 1, cur_h, cur_w}, v);
      for (int y = 0; y < A.h; ++y)
        for (int x = 0; x < A.w; ++x) {
          const float sy = (y + 0.5f) / 2.0f - 0.5f;
          const float sx = (x + 0.5f) / 2.0f - 0.5f;
          const std::size_t i = static_cast<std::size_t>(y) * A.w + x;
          nu[i] = 2.0f * sample_bilinear(cu.data(), cur_h, cur_w, sy, sx);
          nv[i] = 2.0f * sample_bilinear(cv.data(), cur_h, cur_w, sy, sx);
        }
    }
    u = std::move(nu);
    v = std::move(nv);
    cur_h = A.h;
    cur_w = A.w;

    std::vector<double> ix(n), iy(n), ixx(n), iyy(n), ixy(n);
    for (int y = 0; y < A.h; ++y)
      for (int x = 0; x < A.w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * A.w + x;
        const int xl = std::max(0, x - 1), xr = std::min(A.w - 1, x + 1);
        const int yu = std::max(0, y - 1), yd = std::min(A.h - 1, y + 1);
        ix[i] = (static_cast<double>(A.at(y, xr)) - A.at(y, xl)) / std::max(1, xr - xl);
        iy[i] = (static_cast<double>(A.at(yd, x)) - A.at(yu, x)) / std::max(1, yd - yu);
        ixx[i] = ix[i] * ix[i];
        iyy[i] = iy[i] * iy[i];
        ixy[i] = ix[i] * iy[i];
      }
    const BoxSum sxx(ixx, A.h, A.w), syy(iyy, A.h, A.w), sxy(ixy, A.h, A.w);

    std::vector<double> xt(n), yt(n);
    for (int it = 0; it < p.iterations; ++it) {
      for (int y = 0; y < A.h; ++y)
        for (int x = 0; x < A.w; ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * A.w + x;
          const double diff =
              static_cast<double>(sample_bilinear(B.v, B.h, B.w, y + v[i], x + u[i])) - A.v[i];
          xt[i] = ix[i] * diff;
          yt[i] = iy[i] * diff;
        }
      const BoxSum sxt(xt, A.h, A.w), syt(yt, A.h, A.w);
      for (int y = 0; y < A.h; ++y)
        for (int x = 0; x < A.w; ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * A.w + x;
          const double gxx = sxx.sum(y, x, half), gyy = syy.sum(y, x, half);
          const double gxy = sxy.sum(y, x, half);
          const double tr = gxx + gyy;
          const double det = gxx * gyy - gxy * gxy;
          const double min_eig = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * det)));
          if (min_eig < p.min_eigenvalue) continue;
          const double bx = -sxt.sum(y, x, half);
          const double by = -syt.sum(y, x, half);
          const double du = (gyy * bx - gxy * by) / det;
          const double dv = (gxx * by - gxy * bx) / det;
          u[i] = std::clamp(static_cast<float>(u[i] + du), -limit[l], limit[l]);
          v[i] = std::clamp(static_cast<float>(v[i] + dv), -limit[l], limit[l]);
        }
    }
  }

  std::copy(u.begin(), u.end(), result.flow.channel(0, 0).begin());
  std::copy(v.begin(), v.end(), result.flow.channel(0, 1).begin());
  return result;
}

}  // namespace vsr
