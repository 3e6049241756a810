// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "vsr/error.hpp"
#include "vsr/pipeline.hpp"

namespace vsr {

void FNetConfig::validate() const {
  for (int c : encoder)
    if (c < 1) throw ConfigError("FNet encoder widths must be >= 1");
  for (int c : decoder)
    if (c < 1) throw ConfigError("FNet decoder widths must be >= 1");
  if (head_width < 1) throw ConfigError("FNet head width must be >= 1");
  if (!(max_flow > 0.0f)) throw ConfigError("FNet max flow must be positive");
  if (!(leaky_alpha >= 0.0f)) throw ConfigError("FNet leaky slope must be non-negative");
}

void SRNetConfig::validate() const {
  if (blocks < 1) throw ConfigError("SRNet needs at least one residual block");
  if (width < 1) throw ConfigError("SRNet width must be >= 1");
  if (scale < 1) throw ConfigError("SRNet upscale factor must be a positive integer");
}

NetworkGraph build_fnet(const FNetConfig& cfg) {
  cfg.validate();
  NetworkGraph g({6});
  ValueId x = g.input(0);
  const Activation lrelu = Activation::leaky(cfg.leaky_alpha);

  auto conv_unit = [&](ValueId in, const std::string& prefix, int width) {
    ValueId v = in;
    for (int j = 1; j <= 2; ++j) {
      const std::string p = prefix + ".conv" + std::to_string(j);
      v = g.conv(v, p, width, 3);
      if (cfg.batch_norm) v = g.batch_norm(v, p + ".bn");
      v = g.act(v, p + ".lrelu", lrelu);
    }
    return v;
  };

  for (int i = 0; i < 3; ++i) {
    const std::string p = "enc" + std::to_string(i + 1);
    x = conv_unit(x, p, cfg.encoder[i]);
    x = g.maxpool(x, p + ".pool");
  }
  for (int i = 0; i < 3; ++i) {
    const std::string p = "dec" + std::to_string(i + 1);
    x = conv_unit(x, p, cfg.decoder[i]);
    x = g.bilinear_up(x, p + ".up", 2.0);
  }
  x = g.conv(x, "head.conv1", cfg.head_width, 3);
  x = g.act(x, "head.lrelu", lrelu);
  x = g.conv(x, "head.conv2", 2, 3);
  g.act(x, "head.flow", Activation::tanh(cfg.max_flow));
  return g;
}

NetworkGraph build_srnet(const SRNetConfig& cfg) {
  cfg.validate();
  const int s = cfg.scale;
  NetworkGraph g({3 + 3 * s * s});
  ValueId x = g.conv(g.input(0), "input.conv", cfg.width, 3);
  x = g.act(x, std::string(kTrunkInput), Activation::relu());
  for (int b = 0; b < cfg.blocks; ++b) {
    const std::string p = "block" + std::to_string(b + 1);
    ValueId r = g.conv(x, p + ".conv_a", cfg.width, 3);
    r = g.act(r, p + ".relu", Activation::relu());
    r = g.conv(r, p + ".conv_b", cfg.width, 3);
    x = g.residual_add(x, r, b + 1 == cfg.blocks ? std::string(kTrunkOutput) : p + ".add");
  }
  x = g.conv(x, "output.expand", 3 * s * s, 3);
  x = g.pixel_shuffle(x, "output.shuffle", s);
  x = g.act(x, "output.relu", Activation::relu());
  g.conv(x, "output.conv", 3, 3);
  return g;
}

NetworkGraph build_control_srnet(ControlVariant variant) {
  constexpr int kScale = 3;
  NetworkGraph g({1});
  ValueId x = g.conv(g.input(0), "backbone.conv1", 64, 5);
  x = g.act(x, "backbone.tanh1", Activation::tanh());
  x = g.conv(x, "backbone.conv2", 32, 3);
  x = g.act(x, "backbone.tanh2", Activation::tanh());
  x = g.conv(x, "backbone.conv3", 32, 3);
  x = g.act(x, "backbone.tanh3", Activation::tanh());
  switch (variant) {
    case ControlVariant::A:
      x = g.resize(x, "upsample.interp", kScale);
      g.conv(x, "upsample.conv", 1, 1);
      break;
    case ControlVariant::B:
      g.conv_transpose(x, "upsample.deconv", 1, 5, kScale);
      break;
    case ControlVariant::C:
      x = g.conv(x, "upsample.conv", kScale * kScale, 1);
      g.pixel_shuffle(x, "upsample.shuffle", kScale);
      break;
  }
  return g;
}

std::string_view name(Arch arch) noexcept {
  switch (arch) {
    case Arch::egvsr:
      return "egvsr";
    case Arch::control_a:
      return "control-a";
    case Arch::control_b:
      return "control-b";
    case Arch::control_c:
      return "control-c";
  }
  return "unknown";
}

Arch parse_arch(std::string_view text) {
  for (Arch a : {Arch::egvsr, Arch::control_a, Arch::control_b, Arch::control_c})
    if (text == name(a)) return a;
  throw ConfigError("unknown architecture '" + std::string(text) +
                    "' (expected egvsr, control-a, control-b or control-c)");
}

std::int64_t VsrModel::params() const {
  return count_params(srnet) + (fnet ? count_params(*fnet) : 0);
}

FlopCount VsrModel::flops(int h, int w) const {
  FlopCount total;
  if (fnet) {
    const auto align = [](int v) { return (v + 7) / 8 * 8; };
    total += count_flops(*fnet, Shape{1, 6, align(h), align(w)});
    total += count_flops(srnet, Shape{1, srnet.input_channels()[0], h, w});
  } else {
    total += count_flops(srnet, Shape{1, 1, h, w});
  }
  return total;
}

VsrModel VsrModel::fused() const {
  VsrModel out;
  out.arch = arch;
  out.scale = scale;
  if (fnet) out.fnet = fuse_conv_bn(*fnet);
  out.srnet = fuse_conv_bn(srnet);
  return out;
}

namespace {

void damp_residual_branches(NetworkGraph& g) {
  for (int i = 0; i < g.num_layers(); ++i) {
    Layer& l = g.layer(i);
    if (l.name.ends_with(".conv_b")) {
      for (float& w : l.kernel()->weights.data()) w *= 0.1f;
    }
  }
}

}  // namespace

VsrModel build_model(Arch arch, WeightInit init, std::uint64_t seed) {
  VsrModel m;
  m.arch = arch;
  switch (arch) {
    case Arch::egvsr:
      m.scale = 4;
      m.fnet = build_fnet();
      m.srnet = build_srnet();
      initialize(*m.fnet, init, seed);
      initialize(m.srnet, init, seed + 1);
      damp_residual_branches(m.srnet);
      break;
    case Arch::control_a:
    case Arch::control_b:
    case Arch::control_c:
      m.scale = 3;
      m.srnet = build_control_srnet(arch == Arch::control_a   ? ControlVariant::A
                                    : arch == Arch::control_b ? ControlVariant::B
                                                              : ControlVariant::C);
      initialize(m.srnet, init, seed);
      break;
  }
  return m;
}

}  // namespace vsr
