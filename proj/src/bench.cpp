// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include "vsr/bench.hpp"
#include "vsr/error.hpp"
#include "vsr/parallel.hpp"
#include "vsr/simd/kernels.hpp"

namespace vsr {
namespace {

Tensor synthetic_frame(int channels, int h, int w, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Tensor t({1, channels, h, w});
  for (float& v : t.data()) v = u(rng);
  return t;
}

}  // namespace

BenchResult time_pipeline(const VsrModel& model, const BenchConfig& cfg) {
  if (cfg.frames < 1) throw ConfigError("bench: at least one timed frame is required");
  if (cfg.warmup < 0) throw ConfigError("bench: warm-up count must be non-negative");
  if (cfg.width < 1 || cfg.height < 1) throw ConfigError("bench: frame size must be positive");

  const VsrModel m = cfg.fused ? model.fused() : model;
  const int channels = m.recurrent() ? 3 : m.srnet.input_channels()[0];
  ForwardOptions opts;
  opts.backend = cfg.backend;

  std::mt19937_64 rng(0xbe7c4ULL);
  const int total = cfg.warmup + cfg.frames;
  std::vector<Tensor> frames;
  frames.reserve(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) frames.push_back(synthetic_frame(channels, cfg.height, cfg.width, rng));

  // Shape problems surface here, before anything is timed.
  try {
    const Shape in{1, m.srnet.input_channels()[0], cfg.height, cfg.width};
    (void)infer_shapes(m.srnet, std::span<const Shape>(&in, 1));
  } catch (const ShapeError& e) {
    throw ShapeError(std::string("bench: model does not accept the input size: ") + e.what());
  }

  using clock = std::chrono::steady_clock;
  std::vector<double> frame_s;
  frame_s.reserve(static_cast<std::size_t>(cfg.frames));
  std::optional<RecurrentState> state;
  for (int i = 0; i < total; ++i) {
    const auto t0 = clock::now();
    if (m.recurrent()) {
      if (!state) state = RecurrentState::initial(frames[i], m.scale);
      StepResult r = vsr_step(frames[i], *state, *m.fnet, m.srnet, m.scale, opts);
      state = std::move(r.state);
    } else {
      (void)graph_forward(m.srnet, std::span<const Tensor>(&frames[i], 1), opts);
    }
    const auto t1 = clock::now();
    if (i >= cfg.warmup) frame_s.push_back(std::chrono::duration<double>(t1 - t0).count());
  }

  BenchResult r;
  r.arch = std::string(name(m.arch));
  r.width = cfg.width;
  r.height = cfg.height;
  r.scale = m.scale;
  r.backend = std::string(name(cfg.backend));
  r.fused = cfg.fused;
  r.simd = std::string(simd::name(simd::active().isa));
  r.threads = num_threads();
  r.frames = cfg.frames;
  r.warmup = cfg.warmup;
  r.wall_seconds = std::accumulate(frame_s.begin(), frame_s.end(), 0.0);
  r.fps = r.wall_seconds > 0.0 ? cfg.frames / r.wall_seconds : 0.0;
  r.mean_frame_ms = 1e3 * r.wall_seconds / cfg.frames;
  std::vector<double> sorted = frame_s;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  r.median_frame_ms =
      1e3 * (sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]));
  const FlopCount f = m.flops(cfg.height, cfg.width);
  r.macs_per_frame = f.macs;
  r.flops_per_frame = f.flops();
  return r;
}

}  // namespace vsr
