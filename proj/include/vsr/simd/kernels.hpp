// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace vsr::simd {

enum class Isa { scalar, avx2, neon };

std::string_view name(Isa isa) noexcept;

// Inner loops shared by the convolution backends and the graph executor.
//
// Every variant must produce bit-identical results to the scalar table: gemm
// accumulates each output element with one fused multiply-add per k, in
// increasing k order, starting from the value already stored in C. axpy is
// fused per element in the same way.
struct KernelTable {
  Isa isa;

  // C[m x n] += A[m x k] * B[k x n]; all row-major with explicit leading dims.
  void (*gemm)(int m, int n, int k, const float* a, int lda, const float* b, int ldb, float* c,
               int ldc);

  void (*relu)(const float* x, float* y, std::size_t n);
  void (*leaky_relu)(const float* x, float* y, std::size_t n, float alpha);
  void (*add)(const float* a, const float* b, float* y, std::size_t n);

  // y[i] = fma(a, x[i * incx], y[i]) for i < n; incx >= 1.
  void (*axpy)(float a, const float* x, std::size_t incx, float* y, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

// Null when the ISA is not compiled in or the running CPU lacks it.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

bool cpu_supports(Isa isa) noexcept;
const KernelTable* table(Isa isa) noexcept;
std::vector<Isa> available_isas();

// Selected once from the CPU, overridable with VSR_SIMD=scalar|avx2|neon.
const KernelTable& active() noexcept;

// Throws ConfigError if the ISA cannot run here.
void set_active(Isa isa);

}  // namespace vsr::simd
