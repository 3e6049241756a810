// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vsr/conv.hpp"
#include "vsr/tensor.hpp"

namespace vsr {

// Stable numeric ids; they are part of the model file format.
enum class LayerKind : std::uint8_t {
  conv2d = 1,
  conv_transpose2d = 2,
  batch_norm = 3,
  activation = 4,
  maxpool2 = 5,
  bilinear_up = 6,
  pixel_shuffle = 7,
  space_to_depth = 8,
  concat = 9,
  residual_add = 10,
  interpolation_resize = 11,
};

std::string_view name(LayerKind kind) noexcept;

/// Inference-mode batch normalization statistics. `frozen` is false for
/// layers still tracking batch statistics; those cannot be folded.
struct BatchNormParams {
  std::vector<float> gamma;
  std::vector<float> beta;
  std::vector<float> mean;
  std::vector<float> var;
  float eps = 1e-5f;
  bool frozen = true;

  static BatchNormParams identity(int channels, float eps = 1e-5f);
  int channels() const noexcept { return static_cast<int>(gamma.size()); }
  void validate() const;
};

struct NoParams {};
struct ConvParams {
  ConvKernel kernel;
};
struct ConvTransposeParams {
  ConvKernel kernel;
  int scale = 1;
};
struct ResizeParams {
  double scale = 2.0;
};
struct BlockParams {
  int block = 1;
};

using LayerParams = std::variant<NoParams, ConvParams, ConvTransposeParams, BatchNormParams,
                                 Activation, ResizeParams, BlockParams>;

/// Values are numbered graph inputs first, then one per layer in order.
using ValueId = int;

struct Layer {
  LayerKind kind{};
  std::string name;
  std::vector<ValueId> inputs;
  LayerParams params;

  const ConvKernel* kernel() const noexcept;
  ConvKernel* kernel() noexcept;
};

/// Ordered layer list forming a DAG over named values.
///
/// Channel counts are checked as layers are added; spatial validity is
/// checked by infer_shapes() once an input size is known.
class NetworkGraph {
 public:
  NetworkGraph() = default;
  explicit NetworkGraph(std::vector<int> input_channels);

  int num_inputs() const noexcept { return static_cast<int>(input_channels_.size()); }
  const std::vector<int>& input_channels() const noexcept { return input_channels_; }
  ValueId input(int i) const;

  ValueId add_layer(Layer layer);

  std::span<const Layer> layers() const noexcept { return layers_; }
  Layer& layer(int index) { return layers_.at(index); }
  const Layer& layer(int index) const { return layers_.at(index); }
  int num_layers() const noexcept { return static_cast<int>(layers_.size()); }

  ValueId layer_value(int index) const noexcept { return num_inputs() + index; }
  // -1 for graph inputs.
  int producer(ValueId v) const noexcept { return v - num_inputs(); }
  int num_values() const noexcept { return num_inputs() + num_layers(); }
  int channels(ValueId v) const;
  ValueId value_of(std::string_view layer_name) const;

  // Last added layer unless set explicitly.
  ValueId output() const;
  void set_output(ValueId v);

  // Builders. Weights start at zero; see initialize().
  ValueId conv(ValueId in, std::string name, int c_out, int k, int stride = 1, int pad = -1);
  ValueId conv_transpose(ValueId in, std::string name, int c_out, int k, int scale);
  ValueId batch_norm(ValueId in, std::string name);
  ValueId act(ValueId in, std::string name, Activation a);
  ValueId maxpool(ValueId in, std::string name);
  ValueId bilinear_up(ValueId in, std::string name, double scale = 2.0);
  ValueId resize(ValueId in, std::string name, double scale);
  ValueId pixel_shuffle(ValueId in, std::string name, int r);
  ValueId space_to_depth(ValueId in, std::string name, int r);
  ValueId concat(ValueId a, ValueId b, std::string name);
  ValueId residual_add(ValueId a, ValueId b, std::string name);

 private:
  void check_value(ValueId v, const std::string& who) const;

  std::vector<int> input_channels_;
  std::vector<Layer> layers_;
  std::vector<int> value_channels_;
  std::optional<ValueId> output_;
};

/// Shape of every value for the given input shapes; errors name the layer.
std::vector<Shape> infer_shapes(const NetworkGraph& g, std::span<const Shape> inputs);

struct ForwardOptions {
  ConvBackend backend = ConvBackend::gemm;
  BackendLog* log = nullptr;
  std::optional<ValueId> output;  // defaults to g.output()
};

Tensor graph_forward(const NetworkGraph& g, std::span<const Tensor> inputs,
                     const ForwardOptions& opts = {});
Tensor graph_forward(const NetworkGraph& g, std::span<const Tensor> inputs, ConvBackend backend);

/// gamma * (x - mean) / sqrt(var + eps) + beta per channel.
Tensor batchnorm_forward(const Tensor& x, const BatchNormParams& p);

/// Diagonal 1x1 convolution equal to the batch norm.
ConvKernel bn_to_1x1(const BatchNormParams& p);

/// Folds every conv -> batch_norm pair into one conv and turns remaining batch
/// norms into explicit 1x1 convs. Throws ConfigError on non-frozen statistics.
NetworkGraph fuse_conv_bn(const NetworkGraph& g);

std::int64_t layer_params(const Layer& layer);
std::int64_t count_params(const NetworkGraph& g);

/// MACs for conv-type layers (C_i * H_o * W_o * K^2 * C_o), one op per output
/// element for activations, pooling, normalization, resizing and adds.
struct FlopCount {
  std::int64_t macs = 0;
  std::int64_t elementwise = 0;

  std::int64_t flops() const noexcept { return 2 * macs + elementwise; }
  FlopCount& operator+=(const FlopCount& o) noexcept {
    macs += o.macs;
    elementwise += o.elementwise;
    return *this;
  }
};

std::vector<FlopCount> layer_flops(const NetworkGraph& g, std::span<const Shape> inputs);
FlopCount count_flops(const NetworkGraph& g, std::span<const Shape> inputs);
FlopCount count_flops(const NetworkGraph& g, const Shape& input);

enum class WeightInit { zeros, random_seeded };

/// Conv weights U(-a, a) with a = sqrt(3 / fan_in), biases U(-0.01, 0.01);
/// batch norms get gamma, var in [0.5, 1.5) and beta, mean in [-0.1, 0.1).
void initialize(NetworkGraph& g, WeightInit init, std::uint64_t seed);

}  // namespace vsr
