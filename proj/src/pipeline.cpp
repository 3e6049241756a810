// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>

#include "vsr/error.hpp"
#include "vsr/pipeline.hpp"

namespace vsr {
namespace {

// The flow network pools three times; inputs are edge-extended to a multiple of 8.
constexpr int kFlowAlign = 8;

Tensor extend_edges(const Tensor& t, int h, int w) {
  const Shape& s = t.shape();
  Tensor out({s.n, s.c, h, w});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const auto src = t.channel(n, c);
      auto dst = out.channel(n, c);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          dst[static_cast<std::size_t>(y) * w + x] =
              src[static_cast<std::size_t>(std::min(y, s.h - 1)) * s.w + std::min(x, s.w - 1)];
    }
  return out;
}

Tensor estimate_flow(const NetworkGraph& fnet, const Tensor& pair, const ForwardOptions& o) {
  const Shape& s = pair.shape();
  const int h = (s.h + kFlowAlign - 1) / kFlowAlign * kFlowAlign;
  const int w = (s.w + kFlowAlign - 1) / kFlowAlign * kFlowAlign;
  if (h == s.h && w == s.w) return graph_forward(fnet, std::span<const Tensor>(&pair, 1), o);
  const Tensor ext = extend_edges(pair, h, w);
  return crop(graph_forward(fnet, std::span<const Tensor>(&ext, 1), o), 0, 0, s.h, s.w);
}

}  // namespace

Tensor warp(const Tensor& frame, const Tensor& flow) {
  const Shape& s = frame.shape();
  const Shape& f = flow.shape();
  if (f.c != 2 || f.n != s.n || f.h != s.h || f.w != s.w) {
    throw ShapeError("warp: flow " + to_string(f) + " does not match frame " + to_string(s));
  }
  Tensor out(s);
  for (int n = 0; n < s.n; ++n) {
    const auto fx = flow.channel(n, 0);
    const auto fy = flow.channel(n, 1);
    for (int c = 0; c < s.c; ++c) {
      const auto src = frame.channel(n, c);
      auto dst = out.channel(n, c);
      for (int y = 0; y < s.h; ++y)
        for (int x = 0; x < s.w; ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * s.w + x;
          dst[i] = sample_bilinear(src, s.h, s.w, static_cast<float>(y) + fy[i],
                                   static_cast<float>(x) + fx[i]);
        }
    }
  }
  return out;
}

RecurrentState RecurrentState::initial(const Tensor& first_lr, int scale) {
  const Shape& s = first_lr.shape();
  return {first_lr, Tensor({s.n, s.c, s.h * scale, s.w * scale})};
}

StepResult vsr_step(const Tensor& lr_t, const RecurrentState& state, const NetworkGraph& fnet,
                    const NetworkGraph& srnet, int scale, const ForwardOptions& opts) {
  const Shape& s = lr_t.shape();
  const Shape& hr = state.prev_hr.shape();
  if (state.prev_lr.shape() != s) {
    throw ShapeError("vsr_step: previous LR frame " + to_string(state.prev_lr.shape()) +
                     " differs from current " + to_string(s));
  }
  if (hr.n != s.n || hr.c != s.c || hr.h != s.h * scale || hr.w != s.w * scale) {
    throw ShapeError("vsr_step: previous HR frame " + to_string(hr) + " is not x" +
                     std::to_string(scale) + " of " + to_string(s));
  }
  try {
    ForwardOptions o = opts;
    o.output.reset();
    const Tensor pair = concat_channels(lr_t, state.prev_lr);
    Tensor flow = estimate_flow(fnet, pair, o);

    // Displacements are in pixels of their own grid, so they scale with resolution.
    Tensor flow_hr = bilinear_resize(flow, scale);
    for (float& v : flow_hr.data()) v *= static_cast<float>(scale);
    const Tensor warped = warp(state.prev_hr, flow_hr);

    const Tensor sr_in = concat_channels(lr_t, space_to_depth(warped, scale));
    Tensor hr_t = graph_forward(srnet, std::span<const Tensor>(&sr_in, 1), o);
    return {hr_t, RecurrentState{lr_t, hr_t}, std::move(flow)};
  } catch (const ShapeError& e) {
    throw ShapeError(std::string("vsr_step: ") + e.what());
  }
}

std::vector<Tensor> vsr_run(std::span<const Tensor> frames, const NetworkGraph& fnet,
                            const NetworkGraph& srnet, int scale, const ForwardOptions& opts) {
  if (frames.empty()) throw InputError("vsr_run: empty frame sequence");
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].shape() != frames[0].shape()) {
      throw InputError("vsr_run: frame " + std::to_string(i) + " has shape " +
                       to_string(frames[i].shape()) + ", expected " +
                       to_string(frames[0].shape()));
    }
  }
  std::vector<Tensor> out;
  out.reserve(frames.size());
  RecurrentState state = RecurrentState::initial(frames[0], scale);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    try {
      StepResult r = vsr_step(frames[i], state, fnet, srnet, scale, opts);
      out.push_back(std::move(r.hr));
      state = std::move(r.state);
    } catch (const ShapeError& e) {
      throw ShapeError("frame " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Tensor> upscale_sequence(const VsrModel& model, std::span<const Tensor> frames,
                                     const ForwardOptions& opts) {
  if (model.recurrent()) return vsr_run(frames, *model.fnet, model.srnet, model.scale, opts);
  if (frames.empty()) throw InputError("upscale: empty frame sequence");

  std::vector<Tensor> out;
  const int in_c = model.srnet.input_channels()[0];
  for (const Tensor& f : frames) {
    const Shape& s = f.shape();
    if (s.c == in_c) {
      out.push_back(graph_forward(model.srnet, std::span<const Tensor>(&f, 1), opts));
      continue;
    }
    if (in_c != 1) throw ShapeError("upscale: model expects " + std::to_string(in_c) + " channels");
    Tensor hr;
    for (int c = 0; c < s.c; ++c) {
      Tensor plane({s.n, 1, s.h, s.w});
      for (int n = 0; n < s.n; ++n) {
        const auto src = f.channel(n, c);
        std::copy(src.begin(), src.end(), plane.channel(n, 0).begin());
      }
      Tensor up = graph_forward(model.srnet, std::span<const Tensor>(&plane, 1), opts);
      hr = c == 0 ? std::move(up) : concat_channels(hr, up);
    }
    out.push_back(std::move(hr));
  }
  return out;
}

}  // namespace vsr
