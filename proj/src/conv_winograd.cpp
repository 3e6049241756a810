// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

// F(2x2, 3x3) minimal filtering:
//   Y = A^T [ (G g G^T) .* (B^T d B) ] A
// with
//   B^T = | 1  0 -1  0 |   G = | 1    0    0   |   A^T = | 1  1  1  0 |
//         | 0  1  1  0 |       | 1/2  1/2  1/2 |         | 0  1 -1 -1 |
//         | 0 -1  1  0 |       | 1/2 -1/2  1/2 |
//         | 0  1  0 -1 |       | 0    0    1   |
//
// The 16 element-wise products are batched over channels: for every transform
// coordinate xi, M[xi] (c_out x tiles) = U[xi] (c_out x c_in) * V[xi] (c_in x tiles).

#include <algorithm>
#include <string>

#include "vsr/conv.hpp"
#include "vsr/error.hpp"

namespace vsr {
namespace {

void filter_transform(const float g[9], float u[16]) {
  float t[4][3];
  for (int c = 0; c < 3; ++c) {
    const float g0 = g[c], g1 = g[3 + c], g2 = g[6 + c];
    t[0][c] = g0;
    t[1][c] = 0.5f * (g0 + g1 + g2);
    t[2][c] = 0.5f * (g0 - g1 + g2);
    t[3][c] = g2;
  }
  for (int r = 0; r < 4; ++r) {
    const float g0 = t[r][0], g1 = t[r][1], g2 = t[r][2];
    u[r * 4 + 0] = g0;
    u[r * 4 + 1] = 0.5f * (g0 + g1 + g2);
    u[r * 4 + 2] = 0.5f * (g0 - g1 + g2);
    u[r * 4 + 3] = g2;
  }
}

void input_transform(const float d[16], float v[16]) {
  float t[16];
  for (int c = 0; c < 4; ++c) {
    const float d0 = d[c], d1 = d[4 + c], d2 = d[8 + c], d3 = d[12 + c];
    t[c] = d0 - d2;
    t[4 + c] = d1 + d2;
    t[8 + c] = d2 - d1;
    t[12 + c] = d1 - d3;
  }
  for (int r = 0; r < 4; ++r) {
    const float* row = t + r * 4;
    v[r * 4 + 0] = row[0] - row[2];
    v[r * 4 + 1] = row[1] + row[2];
    v[r * 4 + 2] = row[2] - row[1];
    v[r * 4 + 3] = row[1] - row[3];
  }
}

void output_transform(const float m[16], float y[4]) {
  float t[2][4];
  for (int c = 0; c < 4; ++c) {
    t[0][c] = m[c] + m[4 + c] + m[8 + c];
    t[1][c] = m[4 + c] - m[8 + c] - m[12 + c];
  }
  for (int r = 0; r < 2; ++r) {
    y[r * 2 + 0] = t[r][0] + t[r][1] + t[r][2];
    y[r * 2 + 1] = t[r][1] - t[r][2] - t[r][3];
  }
}

// Bounds the 16 x channels x tiles scratch buffers to ~16 MiB each.
constexpr std::size_t kScratchBudget = std::size_t{1} << 22;

}  // namespace

bool winograd_applicable(const ConvKernel& kern) noexcept {
  return kern.k() == 3 && kern.stride == 1;
}

Tensor conv2d_winograd(const Tensor& x, const ConvKernel& kern, BackendLog* log) {
  if (!winograd_applicable(kern)) {
    if (log != nullptr) {
      log->note("winograd: k=" + std::to_string(kern.k()) + " stride=" +
                std::to_string(kern.stride) + " unsupported, using gemm");
    }
    return conv2d_gemm(x, kern);
  }
  const Shape out_shape = conv_output_shape(x.shape(), kern);
  const Shape& in = x.shape();
  const int c_in = in.c;
  const int c_out = out_shape.c;
  const int p = kern.pad;
  const int oh = out_shape.h;
  const int ow = out_shape.w;
  const int tiles_y = (oh + 1) / 2;
  const int tiles_x = (ow + 1) / 2;

  // U[xi][oc][ic]
  std::vector<float> u(static_cast<std::size_t>(16) * c_out * c_in);
  for (int oc = 0; oc < c_out; ++oc)
    for (int ic = 0; ic < c_in; ++ic) {
      float g[9];
      for (int i = 0; i < 9; ++i) g[i] = kern.weight(oc, ic, i / 3, i % 3);
      float t[16];
      filter_transform(g, t);
      for (int xi = 0; xi < 16; ++xi)
        u[(static_cast<std::size_t>(xi) * c_out + oc) * c_in + ic] = t[xi];
    }

  const int widest = std::max(c_in, c_out);
  const int band = std::clamp(
      static_cast<int>(kScratchBudget / (static_cast<std::size_t>(16) * widest * tiles_x)), 1,
      tiles_y);
  const std::size_t max_tiles = static_cast<std::size_t>(band) * tiles_x;
  std::vector<float> v(16 * c_in * max_tiles);
  std::vector<float> m(16 * c_out * max_tiles);

  Tensor out(out_shape);
  for (int n = 0; n < in.n; ++n) {
    for (int ty0 = 0; ty0 < tiles_y; ty0 += band) {
      const int ty1 = std::min(tiles_y, ty0 + band);
      const int tiles = (ty1 - ty0) * tiles_x;

      // V[xi][ic][tile]; out-of-range samples (padding and ragged edges) are zero.
      for (int ic = 0; ic < c_in; ++ic) {
        const auto src = x.channel(n, ic);
        for (int ty = ty0; ty < ty1; ++ty)
          for (int tx = 0; tx < tiles_x; ++tx) {
            float d[16];
            for (int i = 0; i < 4; ++i) {
              const int iy = 2 * ty - p + i;
              for (int j = 0; j < 4; ++j) {
                const int ix = 2 * tx - p + j;
                d[i * 4 + j] = (iy >= 0 && iy < in.h && ix >= 0 && ix < in.w)
                                   ? src[static_cast<std::size_t>(iy) * in.w + ix]
                                   : 0.0f;
              }
            }
            float t[16];
            input_transform(d, t);
            const int tile = (ty - ty0) * tiles_x + tx;
            for (int xi = 0; xi < 16; ++xi)
              v[(static_cast<std::size_t>(xi) * c_in + ic) * tiles + tile] = t[xi];
          }
      }

      std::fill(m.begin(), m.begin() + static_cast<std::ptrdiff_t>(16 * c_out * tiles), 0.0f);
      for (int xi = 0; xi < 16; ++xi) {
        gemm_accumulate(c_out, tiles, c_in, u.data() + static_cast<std::size_t>(xi) * c_out * c_in,
                        c_in, v.data() + static_cast<std::size_t>(xi) * c_in * tiles, tiles,
                        m.data() + static_cast<std::size_t>(xi) * c_out * tiles, tiles);
      }

      for (int oc = 0; oc < c_out; ++oc) {
        auto dst = out.channel(n, oc);
        const float b = kern.bias[oc];
        for (int ty = ty0; ty < ty1; ++ty)
          for (int tx = 0; tx < tiles_x; ++tx) {
            const int tile = (ty - ty0) * tiles_x + tx;
            float mt[16];
            for (int xi = 0; xi < 16; ++xi)
              mt[xi] = m[(static_cast<std::size_t>(xi) * c_out + oc) * tiles + tile];
            float y[4];
            output_transform(mt, y);
            for (int i = 0; i < 2; ++i) {
              const int oy = 2 * ty + i;
              if (oy >= oh) break;
              for (int j = 0; j < 2; ++j) {
                const int ox = 2 * tx + j;
                if (ox >= ow) break;
                dst[static_cast<std::size_t>(oy) * ow + ox] = y[i * 2 + j] + b;
              }
            }
          }
      }
    }
  }
  return out;
}

}  // namespace vsr
