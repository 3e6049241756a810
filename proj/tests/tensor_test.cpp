// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <numeric>

#include "test_util.hpp"
#include "vsr/error.hpp"
#include "vsr/tensor.hpp"

namespace vsr {
namespace {

using testing::random_tensor;

TEST(TensorNew, FillAndValues) {
  const Tensor z = tensor_new({1, 1, 2, 2}, 0.0f);
  EXPECT_EQ(z.size(), 4u);
  for (float v : z.data()) EXPECT_EQ(v, 0.0f);

  const Tensor s = tensor_new({1, 1, 1, 1}, std::vector<float>{5.0f});
  EXPECT_EQ(s.at(0, 0, 0, 0), 5.0f);

  EXPECT_THROW(tensor_new({1, 2, 2, 2}, std::vector<float>(7)), ShapeError);
  EXPECT_THROW(tensor_new({1, 0, 2, 2}, 0.0f), ShapeError);
}

TEST(ConcatChannels, ShapesAndOrder) {
  std::mt19937_64 rng(1);
  const Tensor a = random_tensor({1, 3, 4, 4}, rng);
  const Tensor b = random_tensor({1, 48, 4, 4}, rng);
  const Tensor c = concat_channels(a, b);
  EXPECT_EQ(c.shape(), (Shape{1, 51, 4, 4}));
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      EXPECT_EQ(c.at(0, 2, y, x), a.at(0, 2, y, x));
      EXPECT_EQ(c.at(0, 3 + 47, y, x), b.at(0, 47, y, x));
    }
  EXPECT_THROW(concat_channels(a, random_tensor({1, 3, 5, 5}, rng)), ShapeError);
}

TEST(SpaceToDepth, ShapeAndInverse) {
  std::mt19937_64 rng(2);
  const Tensor t = random_tensor({1, 3, 128, 128}, rng);
  const Tensor d = space_to_depth(t, 4);
  EXPECT_EQ(d.shape(), (Shape{1, 48, 32, 32}));
  EXPECT_EQ(pixel_shuffle(d, 4), t);
  EXPECT_THROW(space_to_depth(Tensor({1, 1, 5, 4}), 2), ShapeError);
}

TEST(PixelShuffle, IndexConvention) {
  const Tensor t = tensor_new({1, 4, 1, 1}, std::vector<float>{1, 2, 3, 4});
  const Tensor p = pixel_shuffle(t, 2);
  EXPECT_EQ(p.shape(), (Shape{1, 1, 2, 2}));
  EXPECT_EQ(p.values(), (std::vector<float>{1, 2, 3, 4}));

  EXPECT_EQ(pixel_shuffle(Tensor({1, 16, 8, 8}), 4).shape(), (Shape{1, 1, 32, 32}));
  EXPECT_THROW(pixel_shuffle(Tensor({1, 6, 2, 2}), 2), ShapeError);

  std::mt19937_64 rng(3);
  const Tensor u = random_tensor({2, 18, 5, 7}, rng);
  EXPECT_EQ(space_to_depth(pixel_shuffle(u, 3), 3), u);
}

float bilinear_oracle(const Tensor& t, int c, double sy, double sx) {
  const Shape& s = t.shape();
  sy = std::clamp(sy, 0.0, s.h - 1.0);
  sx = std::clamp(sx, 0.0, s.w - 1.0);
  const int y0 = static_cast<int>(std::floor(sy)), x0 = static_cast<int>(std::floor(sx));
  const int y1 = std::min(y0 + 1, s.h - 1), x1 = std::min(x0 + 1, s.w - 1);
  const double fy = sy - y0, fx = sx - x0;
  return static_cast<float>((1 - fy) * ((1 - fx) * t.at(0, c, y0, x0) + fx * t.at(0, c, y0, x1)) +
                            fy * ((1 - fx) * t.at(0, c, y1, x0) + fx * t.at(0, c, y1, x1)));
}

TEST(BilinearResize, ConstantIdentityAndOracle) {
  const Tensor k({1, 2, 5, 3}, 0.37f);
  for (double s : {0.5, 1.5, 2.0, 3.0}) {
    const Tensor r = bilinear_resize(k, s);
    for (float v : r.data()) EXPECT_NEAR(v, 0.37f, 1e-6f);
  }
  std::mt19937_64 rng(4);
  const Tensor t = random_tensor({1, 2, 6, 9}, rng);
  EXPECT_EQ(bilinear_resize(t, 1.0), t);

  const Tensor ramp = tensor_new({1, 1, 2, 2}, std::vector<float>{0, 1, 0, 1});
  const Tensor up = bilinear_resize(ramp, 2.0);
  ASSERT_EQ(up.shape(), (Shape{1, 1, 4, 4}));
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      EXPECT_NEAR(up.at(0, 0, y, x), bilinear_oracle(ramp, 0, (y + 0.5) / 2 - 0.5, (x + 0.5) / 2 - 0.5), 1e-6);
      EXPECT_EQ(up.at(0, 0, y, x), up.at(0, 0, 0, x));
    }

  const Tensor big = bilinear_resize(t, 2.5);
  ASSERT_EQ(big.shape(), (Shape{1, 2, 15, 23}));
  for (int c = 0; c < 2; ++c)
    for (int y = 0; y < 15; ++y)
      for (int x = 0; x < 23; ++x) {
        const double sy = (y + 0.5) / 2.5 - 0.5, sx = (x + 0.5) / 2.5 - 0.5;
        EXPECT_NEAR(big.at(0, c, y, x), bilinear_oracle(t, c, sy, sx), 1e-5);
      }
}

TEST(PadZero, BorderAndCrop) {
  const Tensor one = tensor_new({1, 1, 1, 1}, std::vector<float>{5});
  const Tensor p = pad_zero(one, 1);
  EXPECT_EQ(p.values(), (std::vector<float>{0, 0, 0, 0, 5, 0, 0, 0, 0}));

  std::mt19937_64 rng(5);
  const Tensor t = random_tensor({2, 3, 4, 6}, rng);
  EXPECT_EQ(pad_zero(t, 0), t);
  const Tensor q = pad_zero(t, 3);
  EXPECT_EQ(q.shape(), (Shape{2, 3, 10, 12}));
  const double s0 = std::accumulate(t.data().begin(), t.data().end(), 0.0);
  const double s1 = std::accumulate(q.data().begin(), q.data().end(), 0.0);
  EXPECT_NEAR(s0, s1, 1e-9);
  EXPECT_EQ(crop(q, 3, 3, 4, 6), t);
}

TEST(Helpers, RelativeErrorAndFinite) {
  const Tensor a = tensor_new({1, 1, 1, 2}, std::vector<float>{1, -4});
  const Tensor b = tensor_new({1, 1, 1, 2}, std::vector<float>{1.5f, -4});
  EXPECT_DOUBLE_EQ(max_relative_error(b, a), 0.5 / 4.0);
  EXPECT_TRUE(all_finite(a));
  EXPECT_FALSE(all_finite(tensor_new({1, 1, 1, 1}, std::vector<float>{INFINITY})));
  EXPECT_EQ(clamp01(b).values(), (std::vector<float>{1, 0}));
}

}  // namespace
}  // namespace vsr
