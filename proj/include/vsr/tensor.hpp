// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace vsr {

/// NCHW extent of a feature map. All dimensions are at least 1 for a valid tensor.
struct Shape {
  int n = 1;
  int c = 1;
  int h = 1;
  int w = 1;

  std::size_t numel() const noexcept {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  std::size_t plane() const noexcept { return static_cast<std::size_t>(h) * w; }
  bool valid() const noexcept { return n >= 1 && c >= 1 && h >= 1 && w >= 1; }

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& s);

/// Dense float32 feature map in n-major, then c, h, w order.
///
/// Tensors have value semantics. Library operations never modify their inputs;
/// `data()` is writable so that producers can fill a freshly built tensor.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> values);

  static Tensor zeros(Shape shape) { return Tensor(shape); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  std::size_t index(int n, int c, int y, int x) const noexcept {
    return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + y) * shape_.w + x;
  }
  float at(int n, int c, int y, int x) const noexcept { return data_[index(n, c, y, x)]; }
  float& at(int n, int c, int y, int x) noexcept { return data_[index(n, c, y, x)]; }

  /// Contiguous h*w plane of one channel.
  std::span<const float> channel(int n, int c) const noexcept {
    return std::span<const float>(data_).subspan(index(n, c, 0, 0), shape_.plane());
  }
  std::span<float> channel(int n, int c) noexcept {
    return std::span<float>(data_).subspan(index(n, c, 0, 0), shape_.plane());
  }

  const std::vector<float>& values() const noexcept { return data_; }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_{};
  std::vector<float> data_;
};

Tensor tensor_new(Shape shape, float fill);
Tensor tensor_new(Shape shape, std::vector<float> values);

/// Stacks b's channels after a's. Batch and spatial sizes must agree.
Tensor concat_channels(const Tensor& a, const Tensor& b);

/// Folds each block x block spatial cell into channels; inverse of pixel_shuffle.
Tensor space_to_depth(const Tensor& t, int block);

/// Sub-pixel rearrangement: output (n, c', y*r+dy, x*r+dx) = input (n, c'*r*r + dy*r + dx, y, x).
Tensor pixel_shuffle(const Tensor& t, int r);

/// Half-pixel-centred bilinear resampling with border clamp. Output size is round(h*scale) x round(w*scale).
Tensor bilinear_resize(const Tensor& t, double scale);

/// Bilinear sample of one plane at a fractional position, border clamped.
float sample_bilinear(std::span<const float> plane, int h, int w, float y, float x) noexcept;

Tensor pad_zero(const Tensor& t, int pad);

/// Extracts the window [y0, y0+h) x [x0, x0+w) of every channel.
Tensor crop(const Tensor& t, int y0, int x0, int h, int w);

/// Element-wise sum of two equally shaped tensors.
Tensor add(const Tensor& a, const Tensor& b);

Tensor clamp01(const Tensor& t);

/// Single batch item `n` as a (1, c, h, w) tensor.
Tensor batch_item(const Tensor& t, int n);

/// max |a - b| / max |ref|; both tensors must share a shape.
double max_relative_error(const Tensor& a, const Tensor& ref);
double max_abs_diff(const Tensor& a, const Tensor& b);
bool all_finite(const Tensor& t);

}  // namespace vsr
