// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "test_util.hpp"
#include "vsr/conv.hpp"
#include "vsr/error.hpp"
#include "vsr/parallel.hpp"

namespace vsr {
namespace {

using testing::conv_oracle;
using testing::inner;
using testing::random_kernel;
using testing::random_tensor;

class ThreadGuard {
 public:
  explicit ThreadGuard(int n) { set_num_threads(n); }
  ~ThreadGuard() { set_num_threads(1); }
};

TEST(ConvNaive, OnesKernel) {
  ConvKernel k = ConvKernel::zeros(1, 1, 3);
  for (float& v : k.weights.data()) v = 1.0f;
  const Tensor y = conv2d_naive(Tensor({1, 1, 3, 3}, 1.0f), k);
  ASSERT_EQ(y.shape(), (Shape{1, 1, 1, 1}));
  EXPECT_EQ(y.at(0, 0, 0, 0), 9.0f);
  EXPECT_EQ(conv2d_gemm(Tensor({1, 1, 3, 3}, 1.0f), k).at(0, 0, 0, 0), 9.0f);
}

TEST(ConvNaive, ZeroKernelGivesBias) {
  std::mt19937_64 rng(7);
  ConvKernel k = ConvKernel::zeros(2, 3, 3, 1, 1);
  k.bias = {0.5f, -2.0f};
  const Tensor y = conv2d_naive(random_tensor({1, 3, 6, 5}, rng), k);
  for (int y0 = 0; y0 < 6; ++y0)
    for (int x0 = 0; x0 < 5; ++x0) {
      EXPECT_EQ(y.at(0, 0, y0, x0), 0.5f);
      EXPECT_EQ(y.at(0, 1, y0, x0), -2.0f);
    }
}

TEST(ConvNaive, MatchesDotProductOracle) {
  std::mt19937_64 rng(8);
  const Tensor x = random_tensor({1, 2, 5, 5}, rng);
  const ConvKernel k = random_kernel(3, 2, 3, 1, 0, rng);
  EXPECT_LE(max_relative_error(conv2d_naive(x, k), conv_oracle(x, k)), 1e-6);

  for (int stride : {1, 2, 3})
    for (int pad : {0, 1, 2}) {
      const Tensor xb = random_tensor({2, 3, 9, 8}, rng);
      const ConvKernel kb = random_kernel(4, 3, 3, stride, pad, rng);
      const Tensor ref = conv_oracle(xb, kb);
      const Tensor got = conv2d_naive(xb, kb);
      ASSERT_EQ(got.shape(), ref.shape());
      EXPECT_LE(max_relative_error(got, ref), 1e-6) << "stride " << stride << " pad " << pad;
    }
}

TEST(ConvNaive, ChannelMismatch) {
  EXPECT_THROW(conv2d_naive(Tensor({1, 2, 4, 4}), ConvKernel::zeros(1, 3, 3)), ShapeError);
  EXPECT_THROW(conv2d_naive(Tensor({1, 1, 2, 2}), ConvKernel::zeros(1, 1, 3)), ShapeError);
}

TEST(Im2col, FourByNineGeometry) {
  std::vector<float> v(16);
  std::iota(v.begin(), v.end(), 1.0f);
  const Tensor x({1, 1, 4, 4}, v);
  const ColMatrix m = im2col(x, 3, 1, 0);
  EXPECT_EQ(m.rows, 4);
  EXPECT_EQ(m.cols, 9);
  // Zone 1 is the top-right receptive field.
  const std::vector<float> zone1 = {2, 3, 4, 6, 7, 8, 10, 11, 12};
  for (int c = 0; c < 9; ++c) EXPECT_EQ(m.at(1, c), zone1[c]);
}

TEST(Im2col, SingleZoneIsFlattening) {
  std::mt19937_64 rng(9);
  const Tensor x = random_tensor({1, 1, 3, 3}, rng);
  const ColMatrix m = im2col(x, 3, 1, 0);
  ASSERT_EQ(m.rows, 1);
  ASSERT_EQ(m.cols, 9);
  for (int i = 0; i < 9; ++i) EXPECT_EQ(m.at(0, i), x.data()[i]);
}

TEST(Im2col, EntriesComeFromPaddedInput) {
  std::mt19937_64 rng(10);
  const Tensor x = random_tensor({1, 2, 5, 6}, rng);
  const ColMatrix m = im2col(x, 3, 2, 1);
  EXPECT_EQ(m.rows, 3 * 3);
  EXPECT_EQ(m.cols, 18);
  std::multiset<float> pool(x.data().begin(), x.data().end());
  for (float v : m.data) EXPECT_TRUE(v == 0.0f || pool.count(v) > 0);
  EXPECT_THROW(im2col(Tensor({1, 1, 2, 2}), 3, 1, 0), ShapeError);
}

TEST(Gemm, IdentityScalarAndOracle) {
  std::mt19937_64 rng(11);
  Matrix id(5, 5);
  for (int i = 0; i < 5; ++i) id.at(i, i) = 1.0f;
  Matrix m(5, 4);
  for (float& v : m.data) v = std::uniform_real_distribution<float>(-1, 1)(rng);
  EXPECT_EQ(gemm(id, m).data, m.data);

  EXPECT_EQ(gemm(Matrix(1, 1, {3.0f}), Matrix(1, 1, {-2.5f})).data, std::vector<float>{-7.5f});

  Matrix a(7, 5), b(5, 3);
  for (float& v : a.data) v = std::uniform_real_distribution<float>(-1, 1)(rng);
  for (float& v : b.data) v = std::uniform_real_distribution<float>(-1, 1)(rng);
  const Matrix c = gemm(a, b);
  double worst = 0.0, scale = 0.0;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 3; ++j) {
      double ref = 0.0;
      for (int p = 0; p < 5; ++p) ref += static_cast<double>(a.at(i, p)) * b.at(p, j);
      worst = std::max(worst, std::abs(ref - c.at(i, j)));
      scale = std::max(scale, std::abs(ref));
    }
  EXPECT_LE(worst / scale, 1e-6);
  EXPECT_THROW(gemm(a, a), ShapeError);
}

TEST(Gemm, ThreadCountInvariant) {
  std::mt19937_64 rng(12);
  Matrix a(301, 77), b(77, 45);
  for (float& v : a.data) v = std::uniform_real_distribution<float>(-1, 1)(rng);
  for (float& v : b.data) v = std::uniform_real_distribution<float>(-1, 1)(rng);
  const Matrix one = gemm(a, b);
  for (int t : {2, 3, 4}) {
    ThreadGuard g(t);
    EXPECT_EQ(gemm(a, b).data, one.data) << t << " threads";
  }
}

TEST(ConvGemm, MatchesNaiveOnRandomCases) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> ch(1, 8), sz(4, 17), kk(0, 2), st(1, 2);
  for (int i = 0; i < 100; ++i) {
    const int k = 2 * kk(rng) + 1;
    const int h = std::max(sz(rng), k), w = std::max(sz(rng), k);
    const Tensor x = random_tensor({1 + (i % 3 == 0), ch(rng), h, w}, rng);
    const ConvKernel kern = random_kernel(ch(rng), x.shape().c, k, st(rng), k / 2, rng);
    EXPECT_LE(max_relative_error(conv2d_gemm(x, kern), conv2d_naive(x, kern)), 1e-6) << "case " << i;
  }
}

TEST(ConvGemm, ThreadCountInvariant) {
  std::mt19937_64 rng(14);
  const Tensor x = random_tensor({1, 16, 40, 33}, rng);
  const ConvKernel kern = random_kernel(24, 16, 3, 1, 1, rng);
  const Tensor one = conv2d_gemm(x, kern);
  ThreadGuard g(4);
  EXPECT_EQ(conv2d_gemm(x, kern), one);
  EXPECT_EQ(conv2d_winograd(x, kern), [&] {
    set_num_threads(1);
    Tensor t = conv2d_winograd(x, kern);
    set_num_threads(4);
    return t;
  }());
}

TEST(Winograd, MultiplyCounts) {
  EXPECT_EQ(kWinogradTileMultiplies, 16);
  EXPECT_EQ(kDirectTileMultiplies, 36);
  EXPECT_EQ(kDirectTileMultiplies, 2 * 2 * 3 * 3);
}

TEST(Winograd, ZeroKernelGivesBias) {
  std::mt19937_64 rng(15);
  ConvKernel k = ConvKernel::zeros(3, 2, 3, 1, 1);
  k.bias = {1.0f, 2.0f, -3.0f};
  const Tensor y = conv2d_winograd(random_tensor({1, 2, 7, 9}, rng), k);
  ASSERT_EQ(y.shape(), (Shape{1, 3, 7, 9}));
  for (int c = 0; c < 3; ++c)
    for (float v : y.channel(0, c)) EXPECT_EQ(v, k.bias[c]);
}

TEST(Winograd, MatchesNaiveOnRandomCases) {
  std::mt19937_64 rng(16);
  std::uniform_int_distribution<int> ch(1, 8), sz(4, 17), pd(0, 1);
  for (int i = 0; i < 100; ++i) {
    const Tensor x = random_tensor({1, ch(rng), sz(rng), sz(rng)}, rng);
    const ConvKernel kern = random_kernel(ch(rng), x.shape().c, 3, 1, pd(rng), rng);
    BackendLog log;
    const Tensor got = conv2d_winograd(x, kern, &log);
    EXPECT_TRUE(log.entries.empty());
    EXPECT_LE(max_relative_error(got, conv2d_naive(x, kern)), 1e-4) << "case " << i;
  }
}

TEST(Winograd, UnsupportedGeometryFallsBack) {
  std::mt19937_64 rng(17);
  const Tensor x = random_tensor({1, 2, 9, 9}, rng);
  for (const ConvKernel& kern : {random_kernel(2, 2, 5, 1, 2, rng), random_kernel(2, 2, 3, 2, 1, rng)}) {
    BackendLog log;
    EXPECT_FALSE(winograd_applicable(kern));
    const Tensor got = conv2d_winograd(x, kern, &log);
    ASSERT_EQ(log.entries.size(), 1u);
    EXPECT_NE(log.entries[0].find("using gemm"), std::string::npos);
    EXPECT_EQ(got, conv2d_gemm(x, kern));
  }
}

TEST(ConvDispatch, BackendNames) {
  for (ConvBackend b : {ConvBackend::naive, ConvBackend::gemm, ConvBackend::winograd}) {
    EXPECT_EQ(parse_backend(name(b)), b);
  }
  EXPECT_THROW(parse_backend("fft"), ConfigError);
}

TEST(ConvTranspose, Geometry) {
  const TransposeGeometry g = transpose_geometry(5, 3);
  EXPECT_EQ(g.pad, 1);
  EXPECT_EQ(g.output_padding, 0);
  for (int k : {1, 2, 3, 4, 5, 6, 7})
    for (int s : {1, 2, 3, 4}) {
      if (k < s) continue;
      if (s == 1 && (k - s) % 2 == 1) {
        EXPECT_THROW(transpose_geometry(k, s), ShapeError);
        continue;
      }
      const TransposeGeometry t = transpose_geometry(k, s);
      // (h - 1) s - 2p + k + op = h s
      EXPECT_EQ(-s - 2 * t.pad + k + t.output_padding, 0) << k << " " << s;
      EXPECT_GE(t.output_padding, 0);
      EXPECT_LT(t.output_padding, s);
    }
}

TEST(ConvTranspose, ZeroWeightsGiveBias) {
  ConvKernel k = transpose_kernel(1, 32, 5, 3);
  k.bias = {0.25f};
  const Tensor y = conv_transpose2d(Tensor({1, 32, 4, 6}, 1.0f), k, 3);
  ASSERT_EQ(y.shape(), (Shape{1, 1, 12, 18}));
  for (float v : y.data()) EXPECT_EQ(v, 0.25f);
}

TEST(ConvTranspose, AdjointOfStridedConv) {
  std::mt19937_64 rng(18);
  for (auto [k, s] : {std::pair{5, 3}, std::pair{3, 2}, std::pair{4, 2}, std::pair{3, 3}}) {
    const int ci = 3, co = 2, h = 5, w = 4;
    ConvKernel up = transpose_kernel(co, ci, k, s);
    for (float& v : up.weights.data()) v = std::uniform_real_distribution<float>(-1, 1)(rng);
    // Matching strided conv maps (co, h*s, w*s) down to (ci, h, w).
    ConvKernel down = ConvKernel::zeros(ci, co, k, s, up.pad);
    for (int o = 0; o < co; ++o)
      for (int i = 0; i < ci; ++i)
        for (int ky = 0; ky < k; ++ky)
          for (int kx = 0; kx < k; ++kx) down.weights.at(i, o, ky, kx) = up.weights.at(o, i, ky, kx);

    const Tensor x = random_tensor({1, ci, h, w}, rng);
    const Tensor y = random_tensor({1, co, h * s, w * s}, rng);
    const Tensor tx = conv_transpose2d(x, up, s);
    ASSERT_EQ(tx.shape(), y.shape());
    const Tensor cy = conv2d_naive(y, down);
    ASSERT_EQ(cy.shape(), x.shape());
    const double lhs = inner(tx, y), rhs = inner(x, cy);
    EXPECT_NEAR(lhs, rhs, 1e-4 * std::max(1.0, std::abs(rhs))) << "k " << k << " s " << s;
  }
}

TEST(ConvTranspose, InconsistentGeometry) {
  ConvKernel k = transpose_kernel(1, 2, 5, 3);
  EXPECT_THROW(conv_transpose2d(Tensor({1, 2, 3, 3}), k, 2), ShapeError);
  EXPECT_THROW(conv_transpose2d(Tensor({1, 3, 3, 3}), k, 3), ShapeError);
}

TEST(MaxPool, WindowsAndOracle) {
  EXPECT_EQ(maxpool2(tensor_new({1, 1, 2, 2}, std::vector<float>{1, 2, 3, 4})).values(),
            std::vector<float>{4});
  const Tensor c = maxpool2(Tensor({1, 2, 6, 4}, 0.7f));
  EXPECT_EQ(c.shape(), (Shape{1, 2, 3, 2}));
  for (float v : c.data()) EXPECT_EQ(v, 0.7f);

  std::mt19937_64 rng(19);
  for (Shape s : {Shape{1, 3, 8, 8}, Shape{2, 1, 7, 5}}) {
    const Tensor x = random_tensor(s, rng);
    const Tensor y = maxpool2(x);
    ASSERT_EQ(y.shape(), (Shape{s.n, s.c, (s.h + 1) / 2, (s.w + 1) / 2}));
    for (int n = 0; n < s.n; ++n)
      for (int ch = 0; ch < s.c; ++ch)
        for (int oy = 0; oy < y.shape().h; ++oy)
          for (int ox = 0; ox < y.shape().w; ++ox) {
            float m = -INFINITY;
            for (int dy = 0; dy < 2; ++dy)
              for (int dx = 0; dx < 2; ++dx) {
                const int iy = 2 * oy + dy, ix = 2 * ox + dx;
                if (iy < s.h && ix < s.w) m = std::max(m, x.at(n, ch, iy, ix));
              }
            EXPECT_EQ(y.at(n, ch, oy, ox), m);
          }
  }
}

TEST(Activation, Definitions) {
  const Tensor x = tensor_new({1, 1, 1, 3}, std::vector<float>{-1, 2, -10});
  EXPECT_EQ(activation(x, Activation::relu()).values(), (std::vector<float>{0, 2, 0}));
  EXPECT_EQ(activation(x, Activation::leaky(0.2f)).values()[2], -2.0f);
  EXPECT_FLOAT_EQ(activation(Tensor({1, 1, 1, 1}), Activation::tanh()).values()[0], 0.0f);

  std::mt19937_64 rng(20);
  const Tensor r = random_tensor({1, 2, 5, 5}, rng, -3, 3);
  Tensor neg = r;
  for (float& v : neg.data()) v = -v;
  const Tensor a = activation(r, Activation::tanh(2.0f));
  const Tensor b = activation(neg, Activation::tanh(2.0f));
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.data()[i], -b.data()[i]);
    EXPECT_NEAR(a.data()[i], 2.0 * std::tanh(r.data()[i]), 1e-6);
  }
}

}  // namespace
}  // namespace vsr
