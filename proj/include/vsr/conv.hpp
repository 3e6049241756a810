// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vsr/tensor.hpp"

namespace vsr {

/// Convolution filter bank. `weights` is (c_out, c_in, k, k).
struct ConvKernel {
  Tensor weights;
  std::vector<float> bias;
  int stride = 1;
  int pad = 0;

  static ConvKernel zeros(int c_out, int c_in, int k, int stride = 1, int pad = 0);

  int c_out() const noexcept { return weights.shape().n; }
  int c_in() const noexcept { return weights.shape().c; }
  int k() const noexcept { return weights.shape().h; }
  float weight(int o, int i, int ky, int kx) const noexcept { return weights.at(o, i, ky, kx); }

  // Throws ShapeError on a non-square filter, bad stride/pad or bias length.
  void validate() const;
};

/// im2col result: one row per output position, c_in*k*k columns ordered (channel, ky, kx).
struct ColMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;

  float at(int r, int c) const noexcept {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
};

/// Dense row-major matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;

  Matrix() = default;
  Matrix(int r, int c, float fill = 0.0f);
  Matrix(int r, int c, std::vector<float> values);

  float at(int r, int c) const noexcept { return data[static_cast<std::size_t>(r) * cols + c]; }
  float& at(int r, int c) noexcept { return data[static_cast<std::size_t>(r) * cols + c]; }
};

enum class ConvBackend { naive, gemm, winograd };

std::string_view name(ConvBackend backend) noexcept;
ConvBackend parse_backend(std::string_view text);

/// Records backend substitutions (e.g. Winograd falling back to GEMM).
struct BackendLog {
  std::vector<std::string> entries;
  void note(std::string message) { entries.push_back(std::move(message)); }
};

Shape conv_output_shape(const Shape& in, const ConvKernel& kern);

/// Direct sliding-window cross-correlation plus bias. Each output element
/// accumulates bias first, then input channels in order, then ky, kx.
Tensor conv2d_naive(const Tensor& x, const ConvKernel& kern);

/// Receptive fields of batch item `batch`, zones enumerated row-major.
ColMatrix im2col(const Tensor& x, int k, int stride, int pad, int batch = 0);

/// Each filter straightened into one column: (c_in*k*k) x c_out.
Matrix filter_matrix(const ConvKernel& kern);

Matrix gemm(const Matrix& a, const Matrix& b);

/// C[m x n] += A[m x k] * B[k x n] through the active SIMD kernels, split
/// across num_threads() workers by row blocks.
void gemm_accumulate(int m, int n, int k, const float* a, int lda, const float* b, int ldb,
                     float* c, int ldc);

/// im2col + GEMM; the product (rows = output positions) is reshaped back to NCHW.
Tensor conv2d_gemm(const Tensor& x, const ConvKernel& kern);

/// Winograd F(2x2, 3x3) needs k == 3 and stride 1.
bool winograd_applicable(const ConvKernel& kern) noexcept;

inline constexpr int kWinogradTileMultiplies = 16;  // 4x4 element-wise stage
inline constexpr int kDirectTileMultiplies = 36;    // 2x2 outputs x 9 taps

/// Winograd F(2x2, 3x3). Unsupported geometry is computed with conv2d_gemm
/// and the substitution recorded in `log` when given.
Tensor conv2d_winograd(const Tensor& x, const ConvKernel& kern, BackendLog* log = nullptr);

Tensor conv2d(const Tensor& x, const ConvKernel& kern, ConvBackend backend,
              BackendLog* log = nullptr);

struct TransposeGeometry {
  int pad = 0;
  int output_padding = 0;
};

/// Padding that makes a k x k transposed convolution with stride `scale` produce exactly scale*h.
TransposeGeometry transpose_geometry(int k, int scale);

/// Kernel with stride and pad set for conv_transpose2d at `scale`.
ConvKernel transpose_kernel(int c_out, int c_in, int k, int scale);

/// Transposed convolution; weights are (c_out, c_in, k, k) of the upsampling op.
/// Output is (n, c_out, h*scale, w*scale).
Tensor conv_transpose2d(const Tensor& x, const ConvKernel& kern, int scale);

/// 2x2/stride-2 max pooling. Odd sizes keep the trailing row/column as a clipped window.
Tensor maxpool2(const Tensor& x);

enum class ActivationKind { relu, leaky_relu, tanh };

struct Activation {
  ActivationKind kind = ActivationKind::relu;
  float alpha = 0.2f;  // leaky_relu slope
  float scale = 1.0f;  // tanh output multiplier

  static Activation relu() { return {ActivationKind::relu}; }
  static Activation leaky(float a = 0.2f) { return {ActivationKind::leaky_relu, a}; }
  static Activation tanh(float s = 1.0f) { return {ActivationKind::tanh, 0.2f, s}; }
};

std::string_view name(ActivationKind kind) noexcept;

Tensor activation(const Tensor& x, const Activation& act);

}  // namespace vsr
