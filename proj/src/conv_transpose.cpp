// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>

#include "vsr/conv.hpp"
#include "vsr/error.hpp"

namespace vsr {

// Output length is (h-1)*s - 2p + k + op; solving for h*s gives 2p - op = k - s.
TransposeGeometry transpose_geometry(int k, int scale) {
  if (scale < 1 || k < scale) {
    throw ShapeError("transposed conv needs kernel >= scale, got k=" + std::to_string(k) +
                     " scale=" + std::to_string(scale));
  }
  const int excess = k - scale;
  TransposeGeometry g;
  g.pad = (excess + 1) / 2;
  g.output_padding = 2 * g.pad - excess;
  if (g.output_padding >= scale) {
    throw ShapeError("transposed conv k=" + std::to_string(k) + " cannot produce an exact x" +
                     std::to_string(scale) + " output");
  }
  return g;
}

ConvKernel transpose_kernel(int c_out, int c_in, int k, int scale) {
  return ConvKernel::zeros(c_out, c_in, k, scale, transpose_geometry(k, scale).pad);
}

Tensor conv_transpose2d(const Tensor& x, const ConvKernel& kern, int scale) {
  kern.validate();
  const int k = kern.k();
  const TransposeGeometry geom = transpose_geometry(k, scale);
  if (kern.stride != scale || kern.pad != geom.pad) {
    throw ShapeError("transposed conv kernel geometry (stride " + std::to_string(kern.stride) +
                     ", pad " + std::to_string(kern.pad) + ") inconsistent with x" +
                     std::to_string(scale));
  }
  const Shape& in = x.shape();
  if (in.c != kern.c_in()) {
    throw ShapeError("transposed conv expects " + std::to_string(kern.c_in()) +
                     " input channels, got " + std::to_string(in.c));
  }
  const int oh = in.h * scale;
  const int ow = in.w * scale;
  const int p = geom.pad;
  Tensor out({in.n, kern.c_out(), oh, ow});

  for (int n = 0; n < in.n; ++n)
    for (int oc = 0; oc < kern.c_out(); ++oc) {
      auto dst = out.channel(n, oc);
      std::fill(dst.begin(), dst.end(), kern.bias[oc]);
      for (int ic = 0; ic < in.c; ++ic) {
        const auto src = x.channel(n, ic);
        for (int ky = 0; ky < k; ++ky)
          for (int kx = 0; kx < k; ++kx) {
            const float wv = kern.weight(oc, ic, ky, kx);
            for (int iy = 0; iy < in.h; ++iy) {
              const int y = iy * scale - p + ky;
              if (y < 0 || y >= oh) continue;
              float* drow = dst.data() + static_cast<std::size_t>(y) * ow;
              const float* srow = src.data() + static_cast<std::size_t>(iy) * in.w;
              for (int ix = 0; ix < in.w; ++ix) {
                const int xx = ix * scale - p + kx;
                if (xx < 0 || xx >= ow) continue;
                drow[xx] += wv * srow[ix];
              }
            }
          }
      }
    }
  return out;
}

}  // namespace vsr
