// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "vsr/conv.hpp"
#include "vsr/tensor.hpp"

namespace vsr::testing {

inline Tensor random_tensor(Shape s, std::mt19937_64& rng, float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> u(lo, hi);
  Tensor t(s);
  for (float& v : t.data()) v = u(rng);
  return t;
}

inline ConvKernel random_kernel(int c_out, int c_in, int k, int stride, int pad,
                                std::mt19937_64& rng) {
  ConvKernel kern = ConvKernel::zeros(c_out, c_in, k, stride, pad);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (float& v : kern.weights.data()) v = u(rng);
  for (float& v : kern.bias) v = u(rng);
  return kern;
}

// Per-output-pixel dot product in double, with explicit bounds tests.
inline Tensor conv_oracle(const Tensor& x, const ConvKernel& kern) {
  const Shape& s = x.shape();
  const int k = kern.k(), st = kern.stride, p = kern.pad;
  const int oh = (s.h + 2 * p - k) / st + 1;
  const int ow = (s.w + 2 * p - k) / st + 1;
  Tensor out({s.n, kern.c_out(), oh, ow});
  for (int n = 0; n < s.n; ++n)
    for (int o = 0; o < kern.c_out(); ++o)
      for (int y = 0; y < oh; ++y)
        for (int xo = 0; xo < ow; ++xo) {
          double acc = kern.bias[o];
          for (int i = 0; i < s.c; ++i)
            for (int ky = 0; ky < k; ++ky)
              for (int kx = 0; kx < k; ++kx) {
                const int iy = y * st - p + ky, ix = xo * st - p + kx;
                if (iy < 0 || ix < 0 || iy >= s.h || ix >= s.w) continue;
                acc += static_cast<double>(x.at(n, i, iy, ix)) * kern.weight(o, i, ky, kx);
              }
          out.at(n, o, y, xo) = static_cast<float>(acc);
        }
  return out;
}

inline double inner(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a.data()[i]) * b.data()[i];
  return s;
}

}  // namespace vsr::testing
