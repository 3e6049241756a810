// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

// Built with -mavx2 -mfma. Nothing here may run before cpu_supports(Isa::avx2).

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "vsr/simd/kernels.hpp"

namespace vsr::simd {
namespace {

constexpr int kMr = 6;
constexpr int kNr = 16;
constexpr int kKc = 256;
constexpr int kMc = 96;

alignas(32) constexpr std::int32_t kMaskSource[16] = {-1, -1, -1, -1, -1, -1, -1, -1,
                                                      0,  0,  0,  0,  0,  0,  0,  0};

inline __m256i lane_mask(int count) {
  count = std::clamp(count, 0, 8);
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(kMaskSource + 8 - count));
}

// acc[r] over one 16-wide packed panel; nc < 16 means masked edge columns.
template <int MR>
void micro_kernel(int k, const float* a, int lda, const float* bp, float* c, int ldc, int nc) {
  __m256 acc0[MR];
  __m256 acc1[MR];
  const __m256i m0 = lane_mask(nc);
  const __m256i m1 = lane_mask(nc - 8);
  const bool full = nc == kNr;
#pragma GCC unroll 6
  for (int r = 0; r < MR; ++r) {
    float* cr = c + static_cast<std::size_t>(r) * ldc;
    if (full) {
      acc0[r] = _mm256_loadu_ps(cr);
      acc1[r] = _mm256_loadu_ps(cr + 8);
    } else {
      acc0[r] = _mm256_maskload_ps(cr, m0);
      acc1[r] = _mm256_maskload_ps(cr + 8, m1);
    }
  }
  for (int p = 0; p < k; ++p) {
    const __m256 b0 = _mm256_load_ps(bp + p * kNr);
    const __m256 b1 = _mm256_load_ps(bp + p * kNr + 8);
  #pragma GCC unroll 6
  for (int r = 0; r < MR; ++r) {
      const __m256 av = _mm256_broadcast_ss(a + static_cast<std::size_t>(r) * lda + p);
      acc0[r] = _mm256_fmadd_ps(av, b0, acc0[r]);
      acc1[r] = _mm256_fmadd_ps(av, b1, acc1[r]);
    }
  }
#pragma GCC unroll 6
  for (int r = 0; r < MR; ++r) {
    float* cr = c + static_cast<std::size_t>(r) * ldc;
    if (full) {
      _mm256_storeu_ps(cr, acc0[r]);
      _mm256_storeu_ps(cr + 8, acc1[r]);
    } else {
      _mm256_maskstore_ps(cr, m0, acc0[r]);
      _mm256_maskstore_ps(cr + 8, m1, acc1[r]);
    }
  }
}

using MicroFn = void (*)(int, const float*, int, const float*, float*, int, int);
constexpr MicroFn kMicro[kMr + 1] = {nullptr,         micro_kernel<1>, micro_kernel<2>,
                                     micro_kernel<3>, micro_kernel<4>, micro_kernel<5>,
                                     micro_kernel<6>};

struct AlignedFree {
  void operator()(float* p) const noexcept { _mm_free(p); }
};

void gemm(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
          int ldc) {
  if (m <= 0 || n <= 0 || k <= 0) return;
  const int panels = (n + kNr - 1) / kNr;
  const std::size_t pack_len = static_cast<std::size_t>(panels) * kKc * kNr;
  float* packed = static_cast<float*>(_mm_malloc(pack_len * sizeof(float), 32));
  std::unique_ptr<float, AlignedFree> guard(packed);

  for (int k0 = 0; k0 < k; k0 += kKc) {
    const int kc = std::min(kKc, k - k0);
    // Pack B[k0:k0+kc, :] into zero-padded 16-column panels.
    for (int pnl = 0; pnl < panels; ++pnl) {
      float* dst = packed + static_cast<std::size_t>(pnl) * kKc * kNr;
      const int j0 = pnl * kNr;
      const int nc = std::min(kNr, n - j0);
      for (int p = 0; p < kc; ++p) {
        const float* src = b + static_cast<std::size_t>(k0 + p) * ldb + j0;
        float* row = dst + p * kNr;
        int j = 0;
        for (; j < nc; ++j) row[j] = src[j];
        for (; j < kNr; ++j) row[j] = 0.0f;
      }
    }
    for (int i0 = 0; i0 < m; i0 += kMc) {
      const int mc = std::min(kMc, m - i0);
      for (int pnl = 0; pnl < panels; ++pnl) {
        const int j0 = pnl * kNr;
        const int nc = std::min(kNr, n - j0);
        const float* bp = packed + static_cast<std::size_t>(pnl) * kKc * kNr;
        for (int i = 0; i < mc; i += kMr) {
          const int mr = std::min(kMr, mc - i);
          const std::size_t row = static_cast<std::size_t>(i0 + i);
          kMicro[mr](kc, a + row * lda + k0, lda, bp, c + row * ldc + j0, ldc, nc);
        }
      }
    }
  }
}

void relu(const float* x, float* y, std::size_t n) {
  const __m256 zero = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
  for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void leaky_relu(const float* x, float* y, std::size_t n, float alpha) {
  const __m256 zero = _mm256_setzero_ps();
  const __m256 va = _mm256_set1_ps(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256 v = _mm256_loadu_ps(x + i);
    const __m256 keep = _mm256_cmp_ps(v, zero, _CMP_GE_OQ);
    _mm256_storeu_ps(y + i, _mm256_blendv_ps(_mm256_mul_ps(v, va), v, keep));
  }
  for (; i < n; ++i) y[i] = x[i] >= 0.0f ? x[i] : alpha * x[i];
}

void add(const float* a, const float* b, float* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
  for (; i < n; ++i) y[i] = a[i] + b[i];
}

void axpy(float a, const float* x, std::size_t incx, float* y, std::size_t n) {
  const __m256 va = _mm256_set1_ps(a);
  std::size_t i = 0;
  if (incx == 1) {
    for (; i + 8 <= n; i += 8)
      _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i * incx], y[i]);
}

constexpr KernelTable kAvx2{Isa::avx2, gemm, relu, leaky_relu, add, axpy};

}  // namespace

const KernelTable* avx2_table_unchecked() noexcept { return &kAvx2; }

}  // namespace vsr::simd
