// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "vsr/error.hpp"
#include "vsr/simd/kernels.hpp"

namespace vsr::simd {

#if defined(VSR_HAVE_AVX2)
const KernelTable* avx2_table_unchecked() noexcept;
#endif
#if defined(VSR_HAVE_NEON)
const KernelTable* neon_table_unchecked() noexcept;
#endif

std::string_view name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool cpu_supports(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(VSR_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(VSR_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* avx2_kernels() noexcept {
#if defined(VSR_HAVE_AVX2)
  if (cpu_supports(Isa::avx2)) return avx2_table_unchecked();
#endif
  return nullptr;
}

const KernelTable* neon_kernels() noexcept {
#if defined(VSR_HAVE_NEON)
  return neon_table_unchecked();
#else
  return nullptr;
#endif
}

const KernelTable* table(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return &scalar_kernels();
    case Isa::avx2:
      return avx2_kernels();
    case Isa::neon:
      return neon_kernels();
  }
  return nullptr;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
    if (table(isa) != nullptr) out.push_back(isa);
  return out;
}

namespace {

const KernelTable* detect() noexcept {
  if (const char* env = std::getenv("VSR_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == name(isa)) {
        if (const KernelTable* t = table(isa)) return t;
      }
    }
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  if (const KernelTable* t = neon_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> current{detect()};
  return current;
}

}  // namespace

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

void set_active(Isa isa) {
  const KernelTable* t = table(isa);
  if (t == nullptr) {
    throw ConfigError("SIMD variant '" + std::string(name(isa)) + "' is not available on this CPU");
  }
  slot().store(t, std::memory_order_release);
}

}  // namespace vsr::simd
