// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vsr/graph.hpp"

namespace vsr {

std::int64_t layer_params(const Layer& layer) {
  if (const ConvKernel* k = layer.kernel()) {
    return static_cast<std::int64_t>(k->weights.size() + k->bias.size());
  }
  if (const auto* bn = std::get_if<BatchNormParams>(&layer.params)) {
    return 4 * static_cast<std::int64_t>(bn->channels());
  }
  return 0;
}

std::int64_t count_params(const NetworkGraph& g) {
  std::int64_t total = 0;
  for (const Layer& l : g.layers()) total += layer_params(l);
  return total;
}

std::vector<FlopCount> layer_flops(const NetworkGraph& g, std::span<const Shape> inputs) {
  const std::vector<Shape> shapes = infer_shapes(g, inputs);
  std::vector<FlopCount> out(g.num_layers());
  for (int i = 0; i < g.num_layers(); ++i) {
    const Layer& l = g.layer(i);
    const Shape& in = shapes[l.inputs[0]];
    const Shape& o = shapes[g.layer_value(i)];
    const auto outputs = static_cast<std::int64_t>(o.numel());
    switch (l.kind) {
      case LayerKind::conv2d: {
        const ConvKernel& k = *l.kernel();
        out[i].macs = static_cast<std::int64_t>(in.n) * in.c * o.h * o.w * k.k() * k.k() * o.c;
        break;
      }
      case LayerKind::conv_transpose2d: {
        const ConvKernel& k = *l.kernel();
        out[i].macs = static_cast<std::int64_t>(in.n) * in.c * in.h * in.w * k.k() * k.k() * o.c;
        break;
      }
      case LayerKind::batch_norm:
      case LayerKind::activation:
      case LayerKind::maxpool2:
      case LayerKind::bilinear_up:
      case LayerKind::interpolation_resize:
      case LayerKind::residual_add:
        out[i].elementwise = outputs;
        break;
      case LayerKind::pixel_shuffle:
      case LayerKind::space_to_depth:
      case LayerKind::concat:
        break;
    }
  }
  return out;
}

FlopCount count_flops(const NetworkGraph& g, std::span<const Shape> inputs) {
  FlopCount total;
  for (const FlopCount& f : layer_flops(g, inputs)) total += f;
  return total;
}

FlopCount count_flops(const NetworkGraph& g, const Shape& input) {
  return count_flops(g, std::span<const Shape>(&input, 1));
}

}  // namespace vsr
