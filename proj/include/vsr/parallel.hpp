// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

namespace vsr {

// Worker count used by gemm and the convolution backends. Defaults to 1.
// Results never depend on this value: work is split so that each output
// element is produced by exactly one worker in a fixed order.
void set_num_threads(int n);
int num_threads() noexcept;

// Calls fn(lo, hi) over [begin, end) in chunks of `grain`, spread across workers.
void parallel_for(int begin, int end, int grain, const std::function<void(int, int)>& fn);

}  // namespace vsr
