// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "vsr/conv.hpp"
#include "vsr/error.hpp"
#include "vsr/parallel.hpp"
#include "vsr/simd/kernels.hpp"

namespace vsr {

ConvKernel ConvKernel::zeros(int c_out, int c_in, int k, int stride, int pad) {
  ConvKernel kern;
  kern.weights = Tensor({c_out, c_in, k, k});
  kern.bias.assign(c_out, 0.0f);
  kern.stride = stride;
  kern.pad = pad;
  kern.validate();
  return kern;
}

void ConvKernel::validate() const {
  const Shape& s = weights.shape();
  if (weights.empty() || s.h != s.w) {
    throw ShapeError("conv kernel weights must be (c_out, c_in, k, k), got " + to_string(s));
  }
  if (stride < 1 || pad < 0) throw ShapeError("conv kernel needs stride >= 1 and pad >= 0");
  if (static_cast<int>(bias.size()) != s.n) {
    throw ShapeError("conv bias has " + std::to_string(bias.size()) + " entries for " +
                     std::to_string(s.n) + " output channels");
  }
}

Matrix::Matrix(int r, int c, float fill) : rows(r), cols(c) {
  if (r < 1 || c < 1) throw ShapeError("matrix dimensions must be >= 1");
  data.assign(static_cast<std::size_t>(r) * c, fill);
}

Matrix::Matrix(int r, int c, std::vector<float> values) : rows(r), cols(c), data(std::move(values)) {
  if (r < 1 || c < 1 || data.size() != static_cast<std::size_t>(r) * c) {
    throw ShapeError("matrix value count does not match " + std::to_string(r) + "x" +
                     std::to_string(c));
  }
}

std::string_view name(ConvBackend backend) noexcept {
  switch (backend) {
    case ConvBackend::naive:
      return "naive";
    case ConvBackend::gemm:
      return "gemm";
    case ConvBackend::winograd:
      return "winograd";
  }
  return "unknown";
}

ConvBackend parse_backend(std::string_view text) {
  for (ConvBackend b : {ConvBackend::naive, ConvBackend::gemm, ConvBackend::winograd})
    if (text == name(b)) return b;
  throw ConfigError("unknown convolution backend '" + std::string(text) +
                    "' (expected naive, gemm or winograd)");
}

Shape conv_output_shape(const Shape& in, const ConvKernel& kern) {
  kern.validate();
  if (in.c != kern.c_in()) {
    throw ShapeError("conv expects " + std::to_string(kern.c_in()) + " input channels, got " +
                     std::to_string(in.c));
  }
  const int oh = (in.h + 2 * kern.pad - kern.k()) / kern.stride + 1;
  const int ow = (in.w + 2 * kern.pad - kern.k()) / kern.stride + 1;
  if (in.h + 2 * kern.pad < kern.k() || in.w + 2 * kern.pad < kern.k() || oh < 1 || ow < 1) {
    throw ShapeError("conv input " + to_string(in) + " smaller than kernel " +
                     std::to_string(kern.k()));
  }
  return {in.n, kern.c_out(), oh, ow};
}

Tensor conv2d_naive(const Tensor& x, const ConvKernel& kern) {
  const Shape out_shape = conv_output_shape(x.shape(), kern);
  const Shape& in = x.shape();
  const int k = kern.k();
  const int s = kern.stride;
  const int p = kern.pad;
  const int oh = out_shape.h;
  const int ow = out_shape.w;
  Tensor out(out_shape);

  // Loop order n, oc, ic, ky, kx, oy, ox keeps each element's accumulation
  // order identical to the textbook per-pixel dot product, one fused
  // multiply-add per tap.
  const simd::KernelTable& kt = simd::active();
  for (int n = 0; n < in.n; ++n) {
    for (int oc = 0; oc < out_shape.c; ++oc) {
      auto dst = out.channel(n, oc);
      std::fill(dst.begin(), dst.end(), kern.bias[oc]);
      for (int ic = 0; ic < in.c; ++ic) {
        const auto src = x.channel(n, ic);
        for (int ky = 0; ky < k; ++ky) {
          for (int kx = 0; kx < k; ++kx) {
            const float wv = kern.weight(oc, ic, ky, kx);
            // valid ox: 0 <= ox*s - p + kx < in.w
            int ox_lo = 0;
            while (ox_lo < ow && ox_lo * s - p + kx < 0) ++ox_lo;
            int ox_hi = ow;
            while (ox_hi > ox_lo && (ox_hi - 1) * s - p + kx >= in.w) --ox_hi;
            for (int oy = 0; oy < oh; ++oy) {
              const int iy = oy * s - p + ky;
              if (iy < 0 || iy >= in.h) continue;
              const float* srow = src.data() + static_cast<std::size_t>(iy) * in.w;
              float* drow = dst.data() + static_cast<std::size_t>(oy) * ow;
              if (ox_hi > ox_lo) {
                kt.axpy(wv, srow + ox_lo * s - p + kx, static_cast<std::size_t>(s), drow + ox_lo,
                        static_cast<std::size_t>(ox_hi - ox_lo));
              }
            }
          }
        }
      }
    }
  }
  return out;
}

std::string_view name(ActivationKind kind) noexcept {
  switch (kind) {
    case ActivationKind::relu:
      return "relu";
    case ActivationKind::leaky_relu:
      return "leaky_relu";
    case ActivationKind::tanh:
      return "tanh";
  }
  return "unknown";
}

Tensor activation(const Tensor& x, const Activation& act) {
  Tensor out(x.shape());
  const float* src = x.data().data();
  float* dst = out.data().data();
  const std::size_t n = x.size();
  switch (act.kind) {
    case ActivationKind::relu:
      simd::active().relu(src, dst, n);
      break;
    case ActivationKind::leaky_relu:
      simd::active().leaky_relu(src, dst, n, act.alpha);
      break;
    case ActivationKind::tanh:
      for (std::size_t i = 0; i < n; ++i) dst[i] = act.scale * std::tanh(src[i]);
      break;
  }
  return out;
}

Tensor maxpool2(const Tensor& x) {
  const Shape& s = x.shape();
  const int oh = (s.h + 1) / 2;
  const int ow = (s.w + 1) / 2;
  Tensor out({s.n, s.c, oh, ow});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const auto src = x.channel(n, c);
      auto dst = out.channel(n, c);
      for (int y = 0; y < oh; ++y) {
        const int y0 = 2 * y;
        const int y1 = std::min(y0 + 1, s.h - 1);
        for (int xx = 0; xx < ow; ++xx) {
          const int x0 = 2 * xx;
          const int x1 = std::min(x0 + 1, s.w - 1);
          dst[static_cast<std::size_t>(y) * ow + xx] =
              std::max({src[y0 * s.w + x0], src[y0 * s.w + x1], src[y1 * s.w + x0],
                        src[y1 * s.w + x1]});
        }
      }
    }
  return out;
}

Tensor conv2d(const Tensor& x, const ConvKernel& kern, ConvBackend backend, BackendLog* log) {
  switch (backend) {
    case ConvBackend::naive:
      return conv2d_naive(x, kern);
    case ConvBackend::gemm:
      return conv2d_gemm(x, kern);
    case ConvBackend::winograd:
      return conv2d_winograd(x, kern, log);
  }
  throw ConfigError("unknown convolution backend");
}

}  // namespace vsr
