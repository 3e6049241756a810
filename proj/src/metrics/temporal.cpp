// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <string>

#include "vsr/conv.hpp"
#include "vsr/error.hpp"
#include "vsr/graph.hpp"
#include "vsr/metrics.hpp"

namespace vsr {

struct FeatureProxyDistance::Impl {
  std::vector<ConvKernel> stages;
};

FeatureProxyDistance::FeatureProxyDistance(std::uint64_t seed)
    : seed_(seed), impl_(std::make_unique<Impl>()) {
  NetworkGraph g({3});
  ValueId x = g.conv(g.input(0), "f1", 8, 3);
  x = g.conv(x, "f2", 16, 3);
  g.conv(x, "f3", 32, 3);
  initialize(g, WeightInit::random_seeded, seed);
  for (const Layer& l : g.layers()) impl_->stages.push_back(*l.kernel());
}

FeatureProxyDistance::~FeatureProxyDistance() = default;

std::string FeatureProxyDistance::id() const {
  return "feature-proxy(3 stages 8/16/32, seed=" + std::to_string(seed_) + ")";
}

namespace {

// Sum over pixels of squared differences between unit-normalised channel vectors, averaged.
double normalized_feature_distance(const Tensor& fa, const Tensor& fb) {
  const Shape& s = fa.shape();
  const std::size_t plane = s.plane();
  double total = 0.0;
  for (std::size_t i = 0; i < plane; ++i) {
    double na = 0.0, nb = 0.0;
    for (int c = 0; c < s.c; ++c) {
      const double va = fa.data()[c * plane + i];
      const double vb = fb.data()[c * plane + i];
      na += va * va;
      nb += vb * vb;
    }
    na = std::sqrt(na) + 1e-10;
    nb = std::sqrt(nb) + 1e-10;
    double d = 0.0;
    for (int c = 0; c < s.c; ++c) {
      const double diff = fa.data()[c * plane + i] / na - fb.data()[c * plane + i] / nb;
      d += diff * diff;
    }
    total += d;
  }
  return total / static_cast<double>(plane);
}

Tensor as_rgb(const Tensor& frame) {
  const Shape& s = frame.shape();
  if (s.n != 1) throw ShapeError("perceptual distance expects single frames");
  if (s.c == 3) return frame;
  if (s.c != 1) throw ShapeError("perceptual distance expects 1 or 3 channels");
  return concat_channels(concat_channels(frame, frame), frame);
}

}  // namespace

double FeatureProxyDistance::operator()(const Tensor& a, const Tensor& b) const {
  if (a.shape() != b.shape()) {
    throw ShapeError("perceptual distance: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
  Tensor xa = as_rgb(a);
  Tensor xb = as_rgb(b);
  double total = 0.0;
  for (std::size_t l = 0; l < impl_->stages.size(); ++l) {
    if (l > 0) {
      xa = maxpool2(xa);
      xb = maxpool2(xb);
    }
    xa = activation(conv2d_gemm(xa, impl_->stages[l]), Activation::relu());
    xb = activation(conv2d_gemm(xb, impl_->stages[l]), Activation::relu());
    total += normalized_feature_distance(xa, xb);
  }
  return total;
}

namespace {

void check_sequences(const FrameSequence& gen, const FrameSequence& ref, const char* who) {
  if (gen.size() != ref.size()) {
    throw InputError(std::string(who) + ": sequences have " + std::to_string(gen.size()) +
                     " and " + std::to_string(ref.size()) + " frames");
  }
  if (gen.size() < 2) throw InputError(std::string(who) + ": need at least two frames");
  for (std::size_t i = 0; i < gen.size(); ++i) {
    if (gen[i].shape() != gen[0].shape() || ref[i].shape() != gen[0].shape()) {
      throw ShapeError(std::string(who) + ": frame " + std::to_string(i) + " shape mismatch");
    }
  }
}

}  // namespace

double tof(const FrameSequence& gen, const FrameSequence& ref, const FlowParams& p) {
  check_sequences(gen, ref, "tof");
  double total = 0.0;
  for (std::size_t t = 1; t < gen.size(); ++t) {
    const Tensor fg = dense_flow(gen[t - 1], gen[t], p).flow;
    const Tensor fr = dense_flow(ref[t - 1], ref[t], p).flow;
    const std::size_t plane = fg.shape().plane();
    double l1 = 0.0;
    for (std::size_t i = 0; i < plane; ++i) {
      l1 += std::abs(static_cast<double>(fg.data()[i]) - fr.data()[i]) +
            std::abs(static_cast<double>(fg.data()[plane + i]) - fr.data()[plane + i]);
    }
    total += l1 / static_cast<double>(plane);
  }
  return total / static_cast<double>(gen.size() - 1);
}

double tlp(const FrameSequence& gen, const FrameSequence& ref, const PerceptualDistance& lp) {
  check_sequences(gen, ref, "tlp");
  double total = 0.0;
  for (std::size_t t = 1; t < gen.size(); ++t) {
    total += std::abs(lp(gen[t - 1], gen[t]) - lp(ref[t - 1], ref[t]));
  }
  return total / static_cast<double>(gen.size() - 1);
}

}  // namespace vsr
