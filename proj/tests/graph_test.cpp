// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"
#include "vsr/error.hpp"
#include "vsr/graph.hpp"
#include "vsr/io.hpp"
#include "vsr/pipeline.hpp"

namespace vsr {
namespace {

using testing::random_tensor;

BatchNormParams random_bn(int c, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> g(0.5f, 2.0f), b(-1.0f, 1.0f), v(0.1f, 3.0f);
  BatchNormParams p = BatchNormParams::identity(c);
  for (int i = 0; i < c; ++i) {
    p.gamma[i] = g(rng);
    p.beta[i] = b(rng);
    p.mean[i] = b(rng);
    p.var[i] = v(rng);
  }
  return p;
}

TEST(BatchNorm, IdentityAndZeroGamma) {
  std::mt19937_64 rng(41);
  const Tensor x = random_tensor({2, 3, 4, 5}, rng);
  BatchNormParams id = BatchNormParams::identity(3, 0.0f);
  EXPECT_LE(max_abs_diff(batchnorm_forward(x, id), x), 1e-6);

  BatchNormParams z = random_bn(3, rng);
  z.gamma = {0, 0, 0};
  const Tensor y = batchnorm_forward(x, z);
  for (int c = 0; c < 3; ++c)
    for (float v : y.channel(1, c)) EXPECT_EQ(v, z.beta[c]);

  EXPECT_THROW(batchnorm_forward(x, BatchNormParams::identity(4)), ShapeError);
}

TEST(BatchNorm, ScalarFormula) {
  const Tensor x = tensor_new({1, 1, 1, 3}, std::vector<float>{1, 2, 3});
  BatchNormParams p = BatchNormParams::identity(1, 1e-5f);
  p.mean = {2.0f};
  p.var = {2.0f / 3.0f};
  const Tensor y = batchnorm_forward(x, p);
  for (int i = 0; i < 3; ++i) {
    const double ref = (i + 1 - 2.0) / std::sqrt(2.0 / 3.0 + 1e-5);
    EXPECT_NEAR(y.data()[i], ref, 1e-6);
  }
}

TEST(BnTo1x1, IdentitySubstitutionAndEquivalence) {
  const ConvKernel id = bn_to_1x1(BatchNormParams::identity(3, 0.0f));
  for (int o = 0; o < 3; ++o) {
    EXPECT_EQ(id.bias[o], 0.0f);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(id.weight(o, i, 0, 0), o == i ? 1.0f : 0.0f);
  }

  BatchNormParams p = BatchNormParams::identity(1, 0.0f);
  p.gamma = {2.0f};
  p.beta = {3.0f};
  const ConvKernel k = bn_to_1x1(p);
  EXPECT_EQ(k.weight(0, 0, 0, 0), 2.0f);
  EXPECT_EQ(k.bias[0], 3.0f);

  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const BatchNormParams q = random_bn(5, rng);
    const Tensor x = random_tensor({1, 5, 6, 7}, rng, -3, 3);
    EXPECT_LE(max_relative_error(conv2d_naive(x, bn_to_1x1(q)), batchnorm_forward(x, q)), 1e-6);
  }
}

NetworkGraph conv_bn_relu(std::mt19937_64& rng, int c_in, int width) {
  NetworkGraph g({c_in});
  ValueId v = g.conv(g.input(0), "conv", width, 3);
  v = g.batch_norm(v, "bn");
  g.act(v, "relu", Activation::relu());
  initialize(g, WeightInit::random_seeded, rng());
  std::get<BatchNormParams>(g.layer(1).params) = random_bn(width, rng);
  return g;
}

TEST(FuseConvBn, PreservesOutputs) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const NetworkGraph g = conv_bn_relu(rng, 3, 8);
    const NetworkGraph f = fuse_conv_bn(g);
    EXPECT_EQ(f.num_layers(), 2);
    const Tensor x = random_tensor({1, 3, 11, 9}, rng);
    const Tensor ref = graph_forward(g, std::span<const Tensor>(&x, 1));
    const Tensor got = graph_forward(f, std::span<const Tensor>(&x, 1));
    EXPECT_LE(max_relative_error(got, ref), 1e-5);
    EXPECT_LE(count_params(f), count_params(g));
  }
}

TEST(FuseConvBn, FoldedWeightsFollowFormula) {
  std::mt19937_64 rng(44);
  const NetworkGraph g = conv_bn_relu(rng, 2, 3);
  const NetworkGraph f = fuse_conv_bn(g);
  const ConvKernel& c = *g.layer(0).kernel();
  const auto& bn = std::get<BatchNormParams>(g.layer(1).params);
  const ConvKernel& fk = *f.layer(0).kernel();
  for (int o = 0; o < 3; ++o) {
    const float s = bn.gamma[o] / std::sqrt(bn.var[o] + bn.eps);
    EXPECT_FLOAT_EQ(fk.bias[o], (c.bias[o] - bn.mean[o]) * s + bn.beta[o]);
    EXPECT_FLOAT_EQ(fk.weight(o, 1, 2, 0), c.weight(o, 1, 2, 0) * s);
  }
}

TEST(FuseConvBn, IdempotentAndNoOpWithoutBn) {
  std::mt19937_64 rng(45);
  const NetworkGraph g = conv_bn_relu(rng, 3, 4);
  const NetworkGraph once = fuse_conv_bn(g);
  EXPECT_EQ(encode_graph(fuse_conv_bn(once)), encode_graph(once));

  NetworkGraph plain({2});
  plain.act(plain.conv(plain.input(0), "c", 3, 3), "r", Activation::relu());
  initialize(plain, WeightInit::random_seeded, 5);
  EXPECT_EQ(encode_graph(fuse_conv_bn(plain)), encode_graph(plain));
}

TEST(FuseConvBn, StandaloneAndSharedBatchNorms) {
  std::mt19937_64 rng(46);
  NetworkGraph g({3});
  const ValueId b0 = g.batch_norm(g.input(0), "bn_in");
  const ValueId c = g.conv(b0, "conv", 4, 3);
  const ValueId b1 = g.batch_norm(c, "bn_shared");
  g.residual_add(c, b1, "sum");
  initialize(g, WeightInit::random_seeded, 9);
  const NetworkGraph f = fuse_conv_bn(g);
  EXPECT_EQ(f.num_layers(), g.num_layers());
  EXPECT_EQ(f.layer(0).kind, LayerKind::conv2d);
  EXPECT_EQ(f.layer(0).name, "bn_in");
  const Tensor x = random_tensor({1, 3, 6, 6}, rng);
  EXPECT_LE(max_relative_error(graph_forward(f, std::span<const Tensor>(&x, 1)),
                               graph_forward(g, std::span<const Tensor>(&x, 1))),
            1e-5);
}

TEST(FuseConvBn, RejectsTrackingStatistics) {
  std::mt19937_64 rng(47);
  NetworkGraph g = conv_bn_relu(rng, 1, 2);
  std::get<BatchNormParams>(g.layer(1).params).frozen = false;
  try {
    (void)fuse_conv_bn(g);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'bn'"), std::string::npos);
  }
}

TEST(FuseConvBn, FusedFNetIsSmaller) {
  NetworkGraph f = build_fnet();
  initialize(f, WeightInit::random_seeded, 3);
  const NetworkGraph fused = fuse_conv_bn(f);
  EXPECT_LT(fused.num_layers(), f.num_layers());
  EXPECT_LE(count_params(fused), count_params(f));
}

TEST(GraphForward, IdentityConv) {
  NetworkGraph g({2});
  g.conv(g.input(0), "id", 2, 1);
  auto& k = *g.layer(0).kernel();
  k.weights.at(0, 0, 0, 0) = 1.0f;
  k.weights.at(1, 1, 0, 0) = 1.0f;
  std::mt19937_64 rng(48);
  const Tensor x = random_tensor({1, 2, 5, 5}, rng);
  for (ConvBackend b : {ConvBackend::naive, ConvBackend::gemm, ConvBackend::winograd}) {
    EXPECT_EQ(graph_forward(g, std::span<const Tensor>(&x, 1), b), x) << name(b);
  }
}

TEST(GraphForward, BackendsAgreeAndDeterministic) {
  SRNetConfig cfg;
  cfg.blocks = 2;
  cfg.width = 16;
  NetworkGraph g = build_srnet(cfg);
  initialize(g, WeightInit::random_seeded, 8);
  std::mt19937_64 rng(49);
  const Tensor x = random_tensor({1, 51, 12, 10}, rng, 0, 1);
  const std::span<const Tensor> in(&x, 1);
  const Tensor naive = graph_forward(g, in, ConvBackend::naive);
  const Tensor gemm = graph_forward(g, in, ConvBackend::gemm);
  const Tensor wino = graph_forward(g, in, ConvBackend::winograd);
  EXPECT_LE(max_relative_error(gemm, naive), 1e-6);
  EXPECT_LE(max_relative_error(wino, naive), 1e-4);
  EXPECT_EQ(graph_forward(g, in, ConvBackend::gemm), gemm);
}

TEST(GraphForward, ErrorsNameTheLayer) {
  NetworkGraph g({1});
  ValueId v = g.maxpool(g.input(0), "pool");
  v = g.conv(v, "big", 1, 5, 1, 0);
  const Tensor x({1, 1, 6, 6});
  try {
    (void)graph_forward(g, std::span<const Tensor>(&x, 1));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("'big'"), std::string::npos) << e.what();
  }
}

TEST(GraphBuild, ChannelAndNameChecks) {
  NetworkGraph g({3});
  const ValueId a = g.conv(g.input(0), "a", 4, 3);
  EXPECT_THROW(g.conv(a, "a", 4, 3), ConfigError);
  const ValueId b = g.conv(g.input(0), "b", 5, 3);
  EXPECT_THROW(g.residual_add(a, b, "sum"), ShapeError);
  EXPECT_THROW(g.pixel_shuffle(b, "ps", 2), ShapeError);
  EXPECT_EQ(g.channels(g.concat(a, b, "cat")), 9);
}

TEST(CountParams, ControlNetworks) {
  EXPECT_EQ(count_params(NetworkGraph({1})), 0);
  const std::int64_t totals[] = {29409, 30177, 29673};
  const std::int64_t heads[] = {33, 801, 297};
  int i = 0;
  for (ControlVariant v : {ControlVariant::A, ControlVariant::B, ControlVariant::C}) {
    const NetworkGraph g = build_control_srnet(v);
    EXPECT_EQ(count_params(g), totals[i]);
    EXPECT_EQ(layer_params(g.layer(0)), 1664);
    EXPECT_EQ(layer_params(g.layer(2)), 18464);
    EXPECT_EQ(layer_params(g.layer(4)), 9248);
    std::int64_t head = 0;
    for (int l = 6; l < g.num_layers(); ++l) head += layer_params(g.layer(l));
    EXPECT_EQ(head, heads[i]);
    ++i;
  }
}

TEST(CountFlops, ConventionAndScaling) {
  NetworkGraph unit({1});
  unit.conv(unit.input(0), "c", 1, 1);
  EXPECT_EQ(count_flops(unit, Shape{1, 1, 1, 1}).macs, 1);
  EXPECT_EQ(count_flops(unit, Shape{1, 1, 1, 1}).flops(), 2);

  const NetworkGraph a = build_control_srnet(ControlVariant::A);
  const std::vector<Shape> in = {Shape{1, 1, 800, 800}};
  EXPECT_EQ(layer_flops(a, in)[0].macs, 1024000000LL);

  for (ControlVariant v : {ControlVariant::A, ControlVariant::B, ControlVariant::C}) {
    const NetworkGraph g = build_control_srnet(v);
    const auto small = layer_flops(g, std::vector<Shape>{Shape{1, 1, 20, 30}});
    const auto big = layer_flops(g, std::vector<Shape>{Shape{1, 1, 40, 60}});
    for (std::size_t l = 0; l < small.size(); ++l) {
      EXPECT_EQ(big[l].macs, 4 * small[l].macs);
      EXPECT_EQ(big[l].elementwise, 4 * small[l].elementwise);
    }
  }
  const NetworkGraph b = build_control_srnet(ControlVariant::B);
  const auto shapes = infer_shapes(b, std::vector<Shape>{Shape{1, 1, 800, 800}});
  EXPECT_EQ(shapes.back(), (Shape{1, 1, 2400, 2400}));
}

}  // namespace
}  // namespace vsr
