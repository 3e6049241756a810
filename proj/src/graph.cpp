// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vsr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "vsr/error.hpp"

namespace vsr {

std::string_view name(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::conv2d:
      return "conv2d";
    case LayerKind::conv_transpose2d:
      return "conv_transpose2d";
    case LayerKind::batch_norm:
      return "batch_norm";
    case LayerKind::activation:
      return "activation";
    case LayerKind::maxpool2:
      return "maxpool2";
    case LayerKind::bilinear_up:
      return "bilinear_up";
    case LayerKind::pixel_shuffle:
      return "pixel_shuffle";
    case LayerKind::space_to_depth:
      return "space_to_depth";
    case LayerKind::concat:
      return "concat";
    case LayerKind::residual_add:
      return "residual_add";
    case LayerKind::interpolation_resize:
      return "interpolation_resize";
  }
  return "unknown";
}

BatchNormParams BatchNormParams::identity(int channels, float eps) {
  BatchNormParams p;
  p.gamma.assign(channels, 1.0f);
  p.beta.assign(channels, 0.0f);
  p.mean.assign(channels, 0.0f);
  p.var.assign(channels, 1.0f);
  p.eps = eps;
  return p;
}

void BatchNormParams::validate() const {
  const std::size_t c = gamma.size();
  if (c == 0 || beta.size() != c || mean.size() != c || var.size() != c) {
    throw ShapeError("batch norm parameter arrays must share a non-zero length");
  }
  if (!(eps >= 0.0f)) throw ConfigError("batch norm eps must be non-negative");
  if (std::any_of(var.begin(), var.end(), [](float v) { return !(v >= 0.0f); })) {
    throw ConfigError("batch norm variance must be non-negative");
  }
}

const ConvKernel* Layer::kernel() const noexcept {
  if (const auto* c = std::get_if<ConvParams>(&params)) return &c->kernel;
  if (const auto* t = std::get_if<ConvTransposeParams>(&params)) return &t->kernel;
  return nullptr;
}

ConvKernel* Layer::kernel() noexcept {
  return const_cast<ConvKernel*>(std::as_const(*this).kernel());
}

NetworkGraph::NetworkGraph(std::vector<int> input_channels)
    : input_channels_(std::move(input_channels)) {
  if (input_channels_.empty()) throw ConfigError("graph needs at least one input");
  for (int c : input_channels_) {
    if (c < 1) throw ConfigError("graph input channel count must be >= 1");
  }
  value_channels_ = input_channels_;
}

ValueId NetworkGraph::input(int i) const {
  if (i < 0 || i >= num_inputs()) throw ConfigError("graph input index out of range");
  return i;
}

namespace {

template <typename P>
const P& params_as(const Layer& l) {
  const P* p = std::get_if<P>(&l.params);
  if (p == nullptr) throw ConfigError("layer '" + l.name + "' has parameters of the wrong kind");
  return *p;
}

}  // namespace

void NetworkGraph::check_value(ValueId v, const std::string& who) const {
  if (v < 0 || v >= num_values()) {
    throw ConfigError("layer '" + who + "' references unknown value " + std::to_string(v));
  }
}

int NetworkGraph::channels(ValueId v) const {
  if (v < 0 || v >= num_values()) throw ConfigError("unknown value id " + std::to_string(v));
  return value_channels_[v];
}

ValueId NetworkGraph::value_of(std::string_view layer_name) const {
  for (int i = 0; i < num_layers(); ++i)
    if (layers_[i].name == layer_name) return layer_value(i);
  throw ConfigError("no layer named '" + std::string(layer_name) + "'");
}

ValueId NetworkGraph::output() const {
  if (output_) return *output_;
  if (layers_.empty()) return num_inputs() > 0 ? 0 : -1;
  return layer_value(num_layers() - 1);
}

void NetworkGraph::set_output(ValueId v) {
  check_value(v, "<output>");
  output_ = v;
}

ValueId NetworkGraph::add_layer(Layer layer) {
  if (num_inputs() == 0) throw ConfigError("graph has no inputs");
  const std::string& who = layer.name;
  if (who.empty()) throw ConfigError("layer names must be non-empty");
  for (const Layer& l : layers_)
    if (l.name == who) throw ConfigError("duplicate layer name '" + who + "'");

  const std::size_t want_inputs =
      (layer.kind == LayerKind::concat || layer.kind == LayerKind::residual_add) ? 2 : 1;
  if (layer.inputs.size() != want_inputs) {
    throw ConfigError("layer '" + who + "' (" + std::string(name(layer.kind)) + ") takes " +
                      std::to_string(want_inputs) + " input(s)");
  }
  for (ValueId v : layer.inputs) check_value(v, who);
  const int in_c = value_channels_[layer.inputs[0]];

  auto fail = [&who](const std::string& msg) {
    throw ShapeError("layer '" + who + "': " + msg);
  };

  int out_c = in_c;
  switch (layer.kind) {
    case LayerKind::conv2d: {
      const ConvKernel& k = params_as<ConvParams>(layer).kernel;
      k.validate();
      if (k.c_in() != in_c) {
        fail("expects " + std::to_string(k.c_in()) + " input channels, producer gives " +
             std::to_string(in_c));
      }
      out_c = k.c_out();
      break;
    }
    case LayerKind::conv_transpose2d: {
      const auto& p = params_as<ConvTransposeParams>(layer);
      p.kernel.validate();
      const TransposeGeometry geom = transpose_geometry(p.kernel.k(), p.scale);
      if (p.kernel.stride != p.scale || p.kernel.pad != geom.pad) {
        fail("transposed kernel stride/pad inconsistent with scale");
      }
      if (p.kernel.c_in() != in_c) fail("input channel mismatch");
      out_c = p.kernel.c_out();
      break;
    }
    case LayerKind::batch_norm: {
      const auto& p = params_as<BatchNormParams>(layer);
      p.validate();
      if (p.channels() != in_c) fail("batch norm has " + std::to_string(p.channels()) + " channels, input has " + std::to_string(in_c));
      break;
    }
    case LayerKind::activation:
      params_as<Activation>(layer);
      break;
    case LayerKind::maxpool2:
      break;
    case LayerKind::bilinear_up:
    case LayerKind::interpolation_resize:
      if (!(params_as<ResizeParams>(layer).scale > 0.0)) fail("scale must be positive");
      break;
    case LayerKind::pixel_shuffle: {
      const int r = params_as<BlockParams>(layer).block;
      if (r < 1 || in_c % (r * r) != 0) fail("channels not divisible by r^2");
      out_c = in_c / (r * r);
      break;
    }
    case LayerKind::space_to_depth: {
      const int r = params_as<BlockParams>(layer).block;
      if (r < 1) fail("block must be >= 1");
      out_c = in_c * r * r;
      break;
    }
    case LayerKind::concat:
      out_c = in_c + value_channels_[layer.inputs[1]];
      break;
    case LayerKind::residual_add:
      if (value_channels_[layer.inputs[1]] != in_c) fail("residual operands differ in channels");
      break;
    default:
      throw ConfigError("layer '" + who + "' has unknown kind");
  }

  layers_.push_back(std::move(layer));
  value_channels_.push_back(out_c);
  return layer_value(num_layers() - 1);
}

ValueId NetworkGraph::conv(ValueId in, std::string nm, int c_out, int k, int stride, int pad) {
  const int c_in = channels(in);
  Layer l{LayerKind::conv2d, std::move(nm), {in},
          ConvParams{ConvKernel::zeros(c_out, c_in, k, stride, pad < 0 ? k / 2 : pad)}};
  return add_layer(std::move(l));
}

ValueId NetworkGraph::conv_transpose(ValueId in, std::string nm, int c_out, int k, int scale) {
  Layer l{LayerKind::conv_transpose2d, std::move(nm), {in},
          ConvTransposeParams{transpose_kernel(c_out, channels(in), k, scale), scale}};
  return add_layer(std::move(l));
}

ValueId NetworkGraph::batch_norm(ValueId in, std::string nm) {
  return add_layer({LayerKind::batch_norm, std::move(nm), {in},
                    BatchNormParams::identity(channels(in))});
}

ValueId NetworkGraph::act(ValueId in, std::string nm, Activation a) {
  return add_layer({LayerKind::activation, std::move(nm), {in}, a});
}

ValueId NetworkGraph::maxpool(ValueId in, std::string nm) {
  return add_layer({LayerKind::maxpool2, std::move(nm), {in}, NoParams{}});
}

ValueId NetworkGraph::bilinear_up(ValueId in, std::string nm, double scale) {
  return add_layer({LayerKind::bilinear_up, std::move(nm), {in}, ResizeParams{scale}});
}

ValueId NetworkGraph::resize(ValueId in, std::string nm, double scale) {
  return add_layer({LayerKind::interpolation_resize, std::move(nm), {in}, ResizeParams{scale}});
}

ValueId NetworkGraph::pixel_shuffle(ValueId in, std::string nm, int r) {
  return add_layer({LayerKind::pixel_shuffle, std::move(nm), {in}, BlockParams{r}});
}

ValueId NetworkGraph::space_to_depth(ValueId in, std::string nm, int r) {
  return add_layer({LayerKind::space_to_depth, std::move(nm), {in}, BlockParams{r}});
}

ValueId NetworkGraph::concat(ValueId a, ValueId b, std::string nm) {
  return add_layer({LayerKind::concat, std::move(nm), {a, b}, NoParams{}});
}

ValueId NetworkGraph::residual_add(ValueId a, ValueId b, std::string nm) {
  return add_layer({LayerKind::residual_add, std::move(nm), {a, b}, NoParams{}});
}

namespace {

Shape layer_output_shape(const Layer& l, std::span<const Shape> in) {
  const Shape& s = in[0];
  switch (l.kind) {
    case LayerKind::conv2d:
      return conv_output_shape(s, std::get<ConvParams>(l.params).kernel);
    case LayerKind::conv_transpose2d: {
      const auto& p = std::get<ConvTransposeParams>(l.params);
      if (s.c != p.kernel.c_in()) throw ShapeError("input channel mismatch");
      return {s.n, p.kernel.c_out(), s.h * p.scale, s.w * p.scale};
    }
    case LayerKind::batch_norm:
      if (s.c != std::get<BatchNormParams>(l.params).channels()) throw ShapeError("channel mismatch");
      return s;
    case LayerKind::activation:
      return s;
    case LayerKind::maxpool2:
      return {s.n, s.c, (s.h + 1) / 2, (s.w + 1) / 2};
    case LayerKind::bilinear_up:
    case LayerKind::interpolation_resize: {
      const double sc = std::get<ResizeParams>(l.params).scale;
      const Shape out{s.n, s.c, static_cast<int>(std::lround(s.h * sc)),
                      static_cast<int>(std::lround(s.w * sc))};
      if (!out.valid()) throw ShapeError("resize output would be empty");
      return out;
    }
    case LayerKind::pixel_shuffle: {
      const int r = std::get<BlockParams>(l.params).block;
      if (s.c % (r * r) != 0) throw ShapeError("channels not divisible by r^2");
      return {s.n, s.c / (r * r), s.h * r, s.w * r};
    }
    case LayerKind::space_to_depth: {
      const int r = std::get<BlockParams>(l.params).block;
      if (s.h % r != 0 || s.w % r != 0) {
        throw ShapeError(to_string(s) + " not divisible by block " + std::to_string(r));
      }
      return {s.n, s.c * r * r, s.h / r, s.w / r};
    }
    case LayerKind::concat:
      if (s.n != in[1].n || s.h != in[1].h || s.w != in[1].w) {
        throw ShapeError("concat operands " + to_string(s) + " and " + to_string(in[1]) +
                         " differ spatially");
      }
      return {s.n, s.c + in[1].c, s.h, s.w};
    case LayerKind::residual_add:
      if (s != in[1]) {
        throw ShapeError("residual operands " + to_string(s) + " and " + to_string(in[1]) +
                         " differ");
      }
      return s;
  }
  throw ShapeError("unknown layer kind");
}

std::string where(const Layer& l, int index) {
  return "layer '" + l.name + "' (#" + std::to_string(index) + ", " + std::string(name(l.kind)) +
         "): ";
}

}  // namespace

std::vector<Shape> infer_shapes(const NetworkGraph& g, std::span<const Shape> inputs) {
  if (static_cast<int>(inputs.size()) != g.num_inputs()) {
    throw ShapeError("graph takes " + std::to_string(g.num_inputs()) + " inputs, got " +
                     std::to_string(inputs.size()));
  }
  std::vector<Shape> shapes(inputs.begin(), inputs.end());
  for (int i = 0; i < g.num_inputs(); ++i) {
    if (!shapes[i].valid()) throw ShapeError("graph input " + std::to_string(i) + " has an empty shape");
    if (shapes[i].c != g.input_channels()[i]) {
      throw ShapeError("graph input " + std::to_string(i) + " needs " +
                       std::to_string(g.input_channels()[i]) + " channels, got " +
                       std::to_string(shapes[i].c));
    }
  }
  shapes.reserve(g.num_values());
  for (int i = 0; i < g.num_layers(); ++i) {
    const Layer& l = g.layer(i);
    std::vector<Shape> in;
    for (ValueId v : l.inputs) in.push_back(shapes[v]);
    try {
      shapes.push_back(layer_output_shape(l, in));
    } catch (const ShapeError& e) {
      throw ShapeError(where(l, i) + e.what());
    }
  }
  return shapes;
}

Tensor batchnorm_forward(const Tensor& x, const BatchNormParams& p) {
  p.validate();
  const Shape& s = x.shape();
  if (s.c != p.channels()) {
    throw ShapeError("batch norm has " + std::to_string(p.channels()) + " channels, input " +
                     to_string(s));
  }
  Tensor out(s);
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const float denom = std::sqrt(p.var[c] + p.eps);
      const auto src = x.channel(n, c);
      auto dst = out.channel(n, c);
      for (std::size_t i = 0; i < src.size(); ++i)
        dst[i] = p.gamma[c] * (src[i] - p.mean[c]) / denom + p.beta[c];
    }
  return out;
}

namespace {

Tensor run_layer(const Layer& l, std::span<const Tensor* const> in, const ForwardOptions& opts) {
  const Tensor& x = *in[0];
  switch (l.kind) {
    case LayerKind::conv2d:
      return conv2d(x, std::get<ConvParams>(l.params).kernel, opts.backend, opts.log);
    case LayerKind::conv_transpose2d: {
      const auto& p = std::get<ConvTransposeParams>(l.params);
      return conv_transpose2d(x, p.kernel, p.scale);
    }
    case LayerKind::batch_norm:
      return batchnorm_forward(x, std::get<BatchNormParams>(l.params));
    case LayerKind::activation:
      return activation(x, std::get<Activation>(l.params));
    case LayerKind::maxpool2:
      return maxpool2(x);
    case LayerKind::bilinear_up:
    case LayerKind::interpolation_resize:
      return bilinear_resize(x, std::get<ResizeParams>(l.params).scale);
    case LayerKind::pixel_shuffle:
      return pixel_shuffle(x, std::get<BlockParams>(l.params).block);
    case LayerKind::space_to_depth:
      return space_to_depth(x, std::get<BlockParams>(l.params).block);
    case LayerKind::concat:
      return concat_channels(x, *in[1]);
    case LayerKind::residual_add:
      return add(x, *in[1]);
  }
  throw ShapeError("unknown layer kind");
}

}  // namespace

Tensor graph_forward(const NetworkGraph& g, std::span<const Tensor> inputs,
                     const ForwardOptions& opts) {
  std::vector<Shape> in_shapes;
  for (const Tensor& t : inputs) in_shapes.push_back(t.shape());
  infer_shapes(g, in_shapes);

  const ValueId target = opts.output.value_or(g.output());
  if (target < 0 || target >= g.num_values()) throw ConfigError("forward target out of range");
  if (target < g.num_inputs()) return inputs[target];

  // Drop intermediates after their last consumer.
  std::vector<int> last_use(g.num_values(), -1);
  for (int i = 0; i < g.num_layers(); ++i)
    for (ValueId v : g.layer(i).inputs) last_use[v] = i;

  std::vector<Tensor> values(g.num_values());
  const int stop = g.producer(target);
  for (int i = 0; i <= stop; ++i) {
    const Layer& l = g.layer(i);
    std::vector<const Tensor*> in;
    for (ValueId v : l.inputs) in.push_back(v < g.num_inputs() ? &inputs[v] : &values[v]);
    try {
      values[g.layer_value(i)] = run_layer(l, in, opts);
    } catch (const ShapeError& e) {
      throw ShapeError(where(l, i) + e.what());
    }
    for (ValueId v : l.inputs) {
      if (v >= g.num_inputs() && last_use[v] == i && v != target) values[v] = Tensor();
    }
  }
  return std::move(values[target]);
}

Tensor graph_forward(const NetworkGraph& g, std::span<const Tensor> inputs, ConvBackend backend) {
  ForwardOptions opts;
  opts.backend = backend;
  return graph_forward(g, inputs, opts);
}

namespace {

// 24 random mantissa bits; stable across standard libraries.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  float operator()(float lo, float hi) {
    const float u = static_cast<float>(rng_() >> 40) * (1.0f / 16777216.0f);
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

void initialize(NetworkGraph& g, WeightInit init, std::uint64_t seed) {
  Uniform uni(seed);
  for (int i = 0; i < g.num_layers(); ++i) {
    Layer& l = g.layer(i);
    if (ConvKernel* k = l.kernel()) {
      const int fan_in = k->c_in() * k->k() * k->k();
      const float a = std::sqrt(3.0f / static_cast<float>(fan_in));
      for (float& w : k->weights.data()) w = init == WeightInit::zeros ? 0.0f : uni(-a, a);
      for (float& b : k->bias) b = init == WeightInit::zeros ? 0.0f : uni(-0.01f, 0.01f);
    } else if (auto* bn = std::get_if<BatchNormParams>(&l.params)) {
      if (init == WeightInit::zeros) {
        *bn = BatchNormParams::identity(bn->channels(), bn->eps);
        continue;
      }
      for (int c = 0; c < bn->channels(); ++c) {
        bn->gamma[c] = uni(0.5f, 1.5f);
        bn->beta[c] = uni(-0.1f, 0.1f);
        bn->mean[c] = uni(-0.1f, 0.1f);
        bn->var[c] = uni(0.5f, 1.5f);
      }
    }
  }
}

}  // namespace vsr
