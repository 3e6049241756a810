// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

// AArch64 only; NEON is part of the baseline ISA there.

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

#include "vsr/simd/kernels.hpp"

namespace vsr::simd {
namespace {

void gemm(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
          int ldc) {
  for (int i = 0; i < m; ++i) {
    float* crow = c + static_cast<std::size_t>(i) * ldc;
    const float* arow = a + static_cast<std::size_t>(i) * lda;
    int j = 0;
    for (; j + 8 <= n; j += 8) {
      float32x4_t acc0 = vld1q_f32(crow + j);
      float32x4_t acc1 = vld1q_f32(crow + j + 4);
      for (int p = 0; p < k; ++p) {
        const float* brow = b + static_cast<std::size_t>(p) * ldb + j;
        acc0 = vfmaq_n_f32(acc0, vld1q_f32(brow), arow[p]);
        acc1 = vfmaq_n_f32(acc1, vld1q_f32(brow + 4), arow[p]);
      }
      vst1q_f32(crow + j, acc0);
      vst1q_f32(crow + j + 4, acc1);
    }
    for (; j < n; ++j) {
      float acc = crow[j];
      for (int p = 0; p < k; ++p) acc = std::fma(arow[p], b[static_cast<std::size_t>(p) * ldb + j], acc);
      crow[j] = acc;
    }
  }
}

void relu(const float* x, float* y, std::size_t n) {
  const float32x4_t zero = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t v = vld1q_f32(x + i);
    vst1q_f32(y + i, vbslq_f32(vcgtq_f32(v, zero), v, zero));
  }
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void leaky_relu(const float* x, float* y, std::size_t n, float alpha) {
  const float32x4_t zero = vdupq_n_f32(0.0f);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t v = vld1q_f32(x + i);
    vst1q_f32(y + i, vbslq_f32(vcgeq_f32(v, zero), v, vmulq_n_f32(v, alpha)));
  }
  for (; i < n; ++i) y[i] = x[i] >= 0.0f ? x[i] : alpha * x[i];
}

void add(const float* a, const float* b, float* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_f32(y + i, vaddq_f32(vld1q_f32(a + i), vld1q_f32(b + i)));
  for (; i < n; ++i) y[i] = a[i] + b[i];
}

void axpy(float a, const float* x, std::size_t incx, float* y, std::size_t n) {
  const float32x4_t va = vdupq_n_f32(a);
  std::size_t i = 0;
  if (incx == 1) {
    for (; i + 4 <= n; i += 4) vst1q_f32(y + i, vfmaq_f32(vld1q_f32(y + i), va, vld1q_f32(x + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i * incx], y[i]);
}

constexpr KernelTable kNeon{Isa::neon, gemm, relu, leaky_relu, add, axpy};

}  // namespace

const KernelTable* neon_table_unchecked() noexcept { return &kNeon; }

}  // namespace vsr::simd
