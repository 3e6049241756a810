// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <string>

#include "vsr/error.hpp"
#include "vsr/graph.hpp"

namespace vsr {

ConvKernel bn_to_1x1(const BatchNormParams& p) {
  p.validate();
  const int c = p.channels();
  ConvKernel k = ConvKernel::zeros(c, c, 1);
  for (int i = 0; i < c; ++i) {
    const float scale = p.gamma[i] / std::sqrt(p.var[i] + p.eps);
    k.weights.at(i, i, 0, 0) = scale;
    k.bias[i] = p.beta[i] - p.mean[i] * scale;
  }
  return k;
}

namespace {

ConvKernel fold(const ConvKernel& conv, const BatchNormParams& bn) {
  ConvKernel out = conv;
  const std::size_t per_filter = static_cast<std::size_t>(conv.c_in()) * conv.k() * conv.k();
  auto w = out.weights.data();
  for (int o = 0; o < conv.c_out(); ++o) {
    const float scale = bn.gamma[o] / std::sqrt(bn.var[o] + bn.eps);
    for (std::size_t i = 0; i < per_filter; ++i) w[o * per_filter + i] *= scale;
    out.bias[o] = (conv.bias[o] - bn.mean[o]) * scale + bn.beta[o];
  }
  return out;
}

}  // namespace

NetworkGraph fuse_conv_bn(const NetworkGraph& g) {
  std::vector<int> consumers(g.num_values(), 0);
  for (const Layer& l : g.layers())
    for (ValueId v : l.inputs) ++consumers[v];

  for (const Layer& l : g.layers()) {
    if (const auto* bn = std::get_if<BatchNormParams>(&l.params); bn && !bn->frozen) {
      throw ConfigError("layer '" + l.name +
                        "': batch norm still tracks batch statistics; freeze it before fusing");
    }
  }

  // fused_into[i] = index of the batch norm folded into conv layer i.
  std::vector<int> fused_into(g.num_layers(), -1);
  std::vector<bool> absorbed(g.num_layers(), false);
  for (int i = 0; i < g.num_layers(); ++i) {
    const Layer& l = g.layer(i);
    if (l.kind != LayerKind::batch_norm) continue;
    const int src = g.producer(l.inputs[0]);
    if (src < 0 || g.layer(src).kind != LayerKind::conv2d) continue;
    if (consumers[l.inputs[0]] != 1 || l.inputs[0] == g.output()) continue;
    fused_into[src] = i;
    absorbed[i] = true;
  }

  NetworkGraph out(g.input_channels());
  std::vector<ValueId> remap(g.num_values(), -1);
  for (int i = 0; i < g.num_inputs(); ++i) remap[i] = i;

  for (int i = 0; i < g.num_layers(); ++i) {
    const Layer& l = g.layer(i);
    const ValueId old_v = g.layer_value(i);
    if (absorbed[i]) {
      remap[old_v] = remap[l.inputs[0]];
      continue;
    }
    Layer copy = l;
    for (ValueId& v : copy.inputs) v = remap[v];
    if (fused_into[i] >= 0) {
      const auto& bn = std::get<BatchNormParams>(g.layer(fused_into[i]).params);
      copy.params = ConvParams{fold(std::get<ConvParams>(l.params).kernel, bn)};
    } else if (l.kind == LayerKind::batch_norm) {
      copy.kind = LayerKind::conv2d;
      copy.params = ConvParams{bn_to_1x1(std::get<BatchNormParams>(l.params))};
    }
    remap[old_v] = out.add_layer(std::move(copy));
  }
  out.set_output(remap[g.output()]);
  return out;
}

}  // namespace vsr
