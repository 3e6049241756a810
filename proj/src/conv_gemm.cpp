// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstring>
#include <string>

#include "vsr/conv.hpp"
#include "vsr/error.hpp"
#include "vsr/parallel.hpp"
#include "vsr/simd/kernels.hpp"

namespace vsr {
namespace {

// Rows [oy_begin, oy_end) of the column matrix for batch item n, written to dst.
void im2col_rows(const Tensor& x, int n, int k, int stride, int pad, int oy_begin, int oy_end,
                 int ow, float* dst) {
  const Shape& in = x.shape();
  const int cols = in.c * k * k;
  for (int oy = oy_begin; oy < oy_end; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      float* row = dst + (static_cast<std::size_t>(oy - oy_begin) * ow + ox) * cols;
      for (int ic = 0; ic < in.c; ++ic) {
        const auto src = x.channel(n, ic);
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy * stride - pad + ky;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox * stride - pad + kx;
            const bool inside = iy >= 0 && iy < in.h && ix >= 0 && ix < in.w;
            *row++ = inside ? src[static_cast<std::size_t>(iy) * in.w + ix] : 0.0f;
          }
        }
      }
    }
  }
}

// Keeps the per-tile column buffer around 1 MiB.
constexpr std::size_t kColBudget = std::size_t{1} << 18;
constexpr int kGemmRowGrain = 96;

}  // namespace

ColMatrix im2col(const Tensor& x, int k, int stride, int pad, int batch) {
  ConvKernel geom;
  geom.weights = Tensor({1, x.shape().c, k, k});
  geom.bias = {0.0f};
  geom.stride = stride;
  geom.pad = pad;
  const Shape out = conv_output_shape(x.shape(), geom);
  if (batch < 0 || batch >= x.shape().n) throw ShapeError("im2col: batch index out of range");
  ColMatrix col;
  col.rows = out.h * out.w;
  col.cols = x.shape().c * k * k;
  col.data.resize(static_cast<std::size_t>(col.rows) * col.cols);
  im2col_rows(x, batch, k, stride, pad, 0, out.h, out.w, col.data.data());
  return col;
}

Matrix filter_matrix(const ConvKernel& kern) {
  kern.validate();
  const int kk = kern.c_in() * kern.k() * kern.k();
  Matrix m(kk, kern.c_out());
  const auto w = kern.weights.data();
  for (int o = 0; o < kern.c_out(); ++o)
    for (int r = 0; r < kk; ++r) m.at(r, o) = w[static_cast<std::size_t>(o) * kk + r];
  return m;
}

void gemm_accumulate(int m, int n, int k, const float* a, int lda, const float* b, int ldb,
                     float* c, int ldc) {
  const auto& kt = simd::active();
  parallel_for(0, m, kGemmRowGrain, [&](int lo, int hi) {
    kt.gemm(hi - lo, n, k, a + static_cast<std::size_t>(lo) * lda, lda, b, ldb,
            c + static_cast<std::size_t>(lo) * ldc, ldc);
  });
}

Matrix gemm(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) {
    throw ShapeError("gemm: inner dimensions " + std::to_string(a.cols) + " and " +
                     std::to_string(b.rows) + " differ");
  }
  Matrix c(a.rows, b.cols);
  gemm_accumulate(a.rows, b.cols, a.cols, a.data.data(), a.cols, b.data.data(), b.cols,
                  c.data.data(), c.cols);
  return c;
}

Tensor conv2d_gemm(const Tensor& x, const ConvKernel& kern) {
  const Shape out_shape = conv_output_shape(x.shape(), kern);
  const int k = kern.k();
  const int cols = x.shape().c * k * k;
  const int oh = out_shape.h;
  const int ow = out_shape.w;
  const int c_out = out_shape.c;
  const Matrix filters = filter_matrix(kern);
  Tensor out(out_shape);

  const int tile_rows = std::clamp(
      static_cast<int>(kColBudget / (static_cast<std::size_t>(ow) * cols)), 1, oh);
  std::vector<float> col(static_cast<std::size_t>(tile_rows) * ow * cols);
  std::vector<float> prod(static_cast<std::size_t>(tile_rows) * ow * c_out);

  for (int n = 0; n < out_shape.n; ++n) {
    for (int oy0 = 0; oy0 < oh; oy0 += tile_rows) {
      const int oy1 = std::min(oh, oy0 + tile_rows);
      const int m = (oy1 - oy0) * ow;
      im2col_rows(x, n, k, kern.stride, kern.pad, oy0, oy1, ow, col.data());
      // Seed each row with the bias so accumulation order matches conv2d_naive.
      for (int r = 0; r < m; ++r)
        std::memcpy(prod.data() + static_cast<std::size_t>(r) * c_out, kern.bias.data(),
                    c_out * sizeof(float));
      gemm_accumulate(m, c_out, cols, col.data(), cols, filters.data.data(), c_out, prod.data(),
                      c_out);
      // col2im: rows are output positions, so the inverse is a transpose into planes.
      for (int oc = 0; oc < c_out; ++oc) {
        float* dst = out.channel(n, oc).data() + static_cast<std::size_t>(oy0) * ow;
        for (int r = 0; r < m; ++r) dst[r] = prod[static_cast<std::size_t>(r) * c_out + oc];
      }
    }
  }
  return out;
}

}  // namespace vsr
