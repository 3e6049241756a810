// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vsr/pipeline.hpp"

namespace vsr {

struct InspectRow {
  std::string graph;  // "fnet" or "srnet"
  int index = 0;
  std::string name;
  std::string kind;
  std::string detail;
  std::int64_t params = 0;
  std::optional<Shape> output;
  std::optional<FlopCount> cost;
};

struct InspectSummary {
  std::vector<InspectRow> rows;
  std::int64_t total_params = 0;
  std::optional<FlopCount> total_cost;
};

/// Per-layer table; shapes and FLOPs are filled when an LR size is given.
InspectSummary inspect(const VsrModel& model, std::optional<std::pair<int, int>> size_hw = {});

std::string format_inspect(const VsrModel& model, const InspectSummary& s);

}  // namespace vsr
