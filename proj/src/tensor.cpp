// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vsr/tensor.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstring>

#include "vsr/error.hpp"
#include "vsr/simd/kernels.hpp"

namespace vsr {

std::string to_string(const Shape& s) {
  return "(" + std::to_string(s.n) + "," + std::to_string(s.c) + "," + std::to_string(s.h) +
         "," + std::to_string(s.w) + ")";
}

namespace {

void require_valid(const Shape& s) {
  if (!s.valid()) throw ShapeError("tensor dimensions must be >= 1, got " + to_string(s));
}

}  // namespace

Tensor::Tensor(Shape shape, float fill) : shape_(shape) {
  require_valid(shape);
  data_.assign(shape.numel(), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> values) : shape_(shape) {
  require_valid(shape);
  if (values.size() != shape.numel()) {
    throw ShapeError("value list has " + std::to_string(values.size()) + " elements, shape " +
                     to_string(shape) + " needs " + std::to_string(shape.numel()));
  }
  data_ = std::move(values);
}

Tensor tensor_new(Shape shape, float fill) { return Tensor(shape, fill); }
Tensor tensor_new(Shape shape, std::vector<float> values) {
  return Tensor(shape, std::move(values));
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.n != sb.n || sa.h != sb.h || sa.w != sb.w) {
    throw ShapeError("concat_channels: " + to_string(sa) + " and " + to_string(sb) +
                     " differ in batch or spatial size");
  }
  Tensor out({sa.n, sa.c + sb.c, sa.h, sa.w});
  const std::size_t chunk_a = static_cast<std::size_t>(sa.c) * sa.plane();
  const std::size_t chunk_b = static_cast<std::size_t>(sb.c) * sb.plane();
  float* dst = out.data().data();
  for (int n = 0; n < sa.n; ++n) {
    std::memcpy(dst, a.data().data() + n * chunk_a, chunk_a * sizeof(float));
    dst += chunk_a;
    std::memcpy(dst, b.data().data() + n * chunk_b, chunk_b * sizeof(float));
    dst += chunk_b;
  }
  return out;
}

Tensor space_to_depth(const Tensor& t, int block) {
  const Shape& s = t.shape();
  if (block < 1 || s.h % block != 0 || s.w % block != 0) {
    throw ShapeError("space_to_depth: " + to_string(s) + " not divisible by block " +
                     std::to_string(block));
  }
  const int oh = s.h / block;
  const int ow = s.w / block;
  Tensor out({s.n, s.c * block * block, oh, ow});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int dy = 0; dy < block; ++dy)
        for (int dx = 0; dx < block; ++dx) {
          const int oc = c * block * block + dy * block + dx;
          for (int y = 0; y < oh; ++y)
            for (int x = 0; x < ow; ++x)
              out.at(n, oc, y, x) = t.at(n, c, y * block + dy, x * block + dx);
        }
  return out;
}

Tensor pixel_shuffle(const Tensor& t, int r) {
  const Shape& s = t.shape();
  if (r < 1 || s.c % (r * r) != 0) {
    throw ShapeError("pixel_shuffle: channels of " + to_string(s) + " not divisible by " +
                     std::to_string(r * r));
  }
  const int oc = s.c / (r * r);
  Tensor out({s.n, oc, s.h * r, s.w * r});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < oc; ++c)
      for (int dy = 0; dy < r; ++dy)
        for (int dx = 0; dx < r; ++dx) {
          const auto src = t.channel(n, c * r * r + dy * r + dx);
          for (int y = 0; y < s.h; ++y) {
            float* row = &out.at(n, c, y * r + dy, 0);
            const float* in = src.data() + static_cast<std::size_t>(y) * s.w;
            for (int x = 0; x < s.w; ++x) row[x * r + dx] = in[x];
          }
        }
  return out;
}

float sample_bilinear(std::span<const float> plane, int h, int w, float y, float x) noexcept {
  y = std::clamp(y, 0.0f, static_cast<float>(h - 1));
  x = std::clamp(x, 0.0f, static_cast<float>(w - 1));
  const int y0 = static_cast<int>(y);
  const int x0 = static_cast<int>(x);
  const int y1 = std::min(y0 + 1, h - 1);
  const int x1 = std::min(x0 + 1, w - 1);
  const float fy = y - static_cast<float>(y0);
  const float fx = x - static_cast<float>(x0);
  const float* p = plane.data();
  const float top = p[y0 * w + x0] + fx * (p[y0 * w + x1] - p[y0 * w + x0]);
  const float bot = p[y1 * w + x0] + fx * (p[y1 * w + x1] - p[y1 * w + x0]);
  return top + fy * (bot - top);
}

Tensor bilinear_resize(const Tensor& t, double scale) {
  const Shape& s = t.shape();
  if (!(scale > 0.0)) throw ShapeError("bilinear_resize: scale must be positive");
  const int oh = static_cast<int>(std::lround(s.h * scale));
  const int ow = static_cast<int>(std::lround(s.w * scale));
  if (oh < 1 || ow < 1) throw ShapeError("bilinear_resize: output would be empty");
  Tensor out({s.n, s.c, oh, ow});

  // Source coordinates are shared by every channel.
  std::vector<float> sy(oh), sx(ow);
  for (int i = 0; i < oh; ++i) sy[i] = static_cast<float>((i + 0.5) / scale - 0.5);
  for (int j = 0; j < ow; ++j) sx[j] = static_cast<float>((j + 0.5) / scale - 0.5);

  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c) {
      const auto src = t.channel(n, c);
      auto dst = out.channel(n, c);
      for (int i = 0; i < oh; ++i)
        for (int j = 0; j < ow; ++j)
          dst[static_cast<std::size_t>(i) * ow + j] = sample_bilinear(src, s.h, s.w, sy[i], sx[j]);
    }
  return out;
}

Tensor pad_zero(const Tensor& t, int pad) {
  if (pad < 0) throw ShapeError("pad_zero: negative padding");
  if (pad == 0) return t;
  const Shape& s = t.shape();
  Tensor out({s.n, s.c, s.h + 2 * pad, s.w + 2 * pad});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < s.h; ++y)
        std::memcpy(out.channel(n, c).data() + static_cast<std::size_t>(y + pad) * (s.w + 2 * pad) + pad,
                    t.channel(n, c).data() + static_cast<std::size_t>(y) * s.w, s.w * sizeof(float));
  return out;
}

Tensor crop(const Tensor& t, int y0, int x0, int h, int w) {
  const Shape& s = t.shape();
  if (y0 < 0 || x0 < 0 || h < 1 || w < 1 || y0 + h > s.h || x0 + w > s.w) {
    throw ShapeError("crop window outside " + to_string(s));
  }
  Tensor out({s.n, s.c, h, w});
  for (int n = 0; n < s.n; ++n)
    for (int c = 0; c < s.c; ++c)
      for (int y = 0; y < h; ++y)
        std::memcpy(out.channel(n, c).data() + static_cast<std::size_t>(y) * w,
                    t.channel(n, c).data() + static_cast<std::size_t>(y0 + y) * s.w + x0,
                    w * sizeof(float));
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("add: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
  Tensor out(a.shape());
  simd::active().add(a.data().data(), b.data().data(), out.data().data(), a.size());
  return out;
}

Tensor clamp01(const Tensor& t) {
  Tensor out = t;
  for (float& v : out.data()) v = std::clamp(v, 0.0f, 1.0f);
  return out;
}

Tensor batch_item(const Tensor& t, int n) {
  const Shape& s = t.shape();
  if (n < 0 || n >= s.n) throw ShapeError("batch index out of range");
  const std::size_t chunk = static_cast<std::size_t>(s.c) * s.plane();
  auto first = t.data().begin() + static_cast<std::ptrdiff_t>(n * chunk);
  return Tensor({1, s.c, s.h, s.w}, std::vector<float>(first, first + static_cast<std::ptrdiff_t>(chunk)));
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("compare: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(a.data()[i]) - b.data()[i]));
  }
  return worst;
}

double max_relative_error(const Tensor& a, const Tensor& ref) {
  const double diff = max_abs_diff(a, ref);
  double scale = 0.0;
  for (float v : ref.data()) scale = std::max(scale, std::abs(static_cast<double>(v)));
  if (diff == 0.0) return 0.0;
  return diff / std::max(scale, static_cast<double>(FLT_MIN));
}

bool all_finite(const Tensor& t) {
  return std::all_of(t.data().begin(), t.data().end(), [](float v) { return std::isfinite(v); });
}

}  // namespace vsr
