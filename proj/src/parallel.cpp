// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vsr/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace vsr {
namespace {
std::atomic<int> g_threads{1};
}

void set_num_threads(int n) { g_threads.store(std::max(1, n)); }
int num_threads() noexcept { return g_threads.load(); }

void parallel_for(int begin, int end, int grain, const std::function<void(int, int)>& fn) {
  if (end <= begin) return;
  grain = std::max(1, grain);
  const int chunks = (end - begin + grain - 1) / grain;
  const int workers = std::min(num_threads(), chunks);
  if (workers <= 1) {
    for (int lo = begin; lo < end; lo += grain) fn(lo, std::min(end, lo + grain));
    return;
  }

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto run = [&] {
    for (int idx = next.fetch_add(1); idx < chunks; idx = next.fetch_add(1)) {
      const int lo = begin + idx * grain;
      try {
        fn(lo, std::min(end, lo + grain));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (int i = 1; i < workers; ++i) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace vsr
