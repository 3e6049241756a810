// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vsr/graph.hpp"

namespace vsr {

/// Flow estimator: three {conv, lrelu, conv, lrelu, maxpool} encoder units,
/// three {conv, lrelu, conv, lrelu, bilinear x2} decoder units, then a
/// conv-lrelu-conv head with tanh scaled to +-max_flow pixels.
struct FNetConfig {
  std::array<int, 3> encoder{32, 64, 128};
  std::array<int, 3> decoder{256, 128, 64};
  int head_width = 32;
  float leaky_alpha = 0.2f;
  float max_flow = 24.0f;
  bool batch_norm = true;  // frozen BN after every conv, foldable by fuse_conv_bn

  void validate() const;
};

/// Super-resolving trunk: input conv + ReLU, residual blocks
/// {conv, relu, conv} + skip, then conv to 3*s^2 channels, pixel shuffle,
/// ReLU and a 3 -> 3 refinement conv.
struct SRNetConfig {
  int blocks = 10;
  int width = 64;
  int scale = 4;

  void validate() const;
};

NetworkGraph build_fnet(const FNetConfig& cfg = {});
NetworkGraph build_srnet(const SRNetConfig& cfg = {});

/// Name of the SRNet value holding the trunk output (after the last residual block).
inline constexpr std::string_view kTrunkOutput = "trunk.out";
/// Name of the SRNet value after the input conv + ReLU.
inline constexpr std::string_view kTrunkInput = "input.relu";

enum class ControlVariant { A, B, C };

/// x3 single-channel ESPCN-style backbone with one of three upsampling heads:
/// A resize-conv (bilinear x3 + 1x1 conv), B 5x5 transposed conv,
/// C 1x1 conv to 9 channels + pixel shuffle.
NetworkGraph build_control_srnet(ControlVariant variant);

/// output(x, y) = bilinear sample of frame at (x + flow_x, y + flow_y), border clamped.
/// flow channel 0 is the x displacement, channel 1 the y displacement.
Tensor warp(const Tensor& frame, const Tensor& flow);

struct RecurrentState {
  Tensor prev_lr;
  Tensor prev_hr;

  /// prev_lr = first frame, prev_hr = zeros at s x resolution.
  static RecurrentState initial(const Tensor& first_lr, int scale);
};

struct StepResult {
  Tensor hr;
  RecurrentState state;
  Tensor flow;  // LR-resolution flow from the flow network
};

StepResult vsr_step(const Tensor& lr_t, const RecurrentState& state, const NetworkGraph& fnet,
                    const NetworkGraph& srnet, int scale, const ForwardOptions& opts = {});

std::vector<Tensor> vsr_run(std::span<const Tensor> frames, const NetworkGraph& fnet,
                            const NetworkGraph& srnet, int scale,
                            const ForwardOptions& opts = {});

enum class Arch { egvsr, control_a, control_b, control_c };

std::string_view name(Arch arch) noexcept;
Arch parse_arch(std::string_view text);

/// A deployable model: the recurrent generator (fnet + srnet) or a single
/// control network in `srnet`.
struct VsrModel {
  Arch arch = Arch::egvsr;
  int scale = 4;
  std::optional<NetworkGraph> fnet;
  NetworkGraph srnet;

  bool recurrent() const noexcept { return fnet.has_value(); }
  std::int64_t params() const;
  /// Per-frame cost at LR size h x w (flow network at the 8-aligned size it runs on;
  /// control networks per single-channel pass).
  FlopCount flops(int h, int w) const;
  VsrModel fused() const;
};

/// Residual branches' second conv is scaled by 0.1 under random init so
/// activations stay bounded through the trunk.
VsrModel build_model(Arch arch, WeightInit init, std::uint64_t seed);

/// Upscales an RGB sequence. Recurrent models run vsr_run; control models
/// (single-channel) are applied to each color channel of each frame.
std::vector<Tensor> upscale_sequence(const VsrModel& model, std::span<const Tensor> frames,
                                     const ForwardOptions& opts = {});

}  // namespace vsr
