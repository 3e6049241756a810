// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <string>

#include "vsr/bench.hpp"
#include "vsr/error.hpp"

namespace vsr {

std::int64_t conv_flops(std::int64_t ci, std::int64_t hi, std::int64_t wi, std::int64_t k,
                        std::int64_t co) {
  if (ci < 1 || hi < 1 || wi < 1 || k < 1 || co < 1) {
    throw ConfigError("conv_flops: all factors must be positive");
  }
  return ci * hi * wi * k * k * co;
}

void FpgaProfile::validate() const {
  if (lut_total < 1 || !(frequency_hz > 0.0)) {
    throw ConfigError("FPGA profile needs a positive LUT budget and clock");
  }
  for (const FpgaKernelRow& r : rows) {
    if (r.input_size < 1 || r.lut_wino < 1 || r.latency < 1) {
      throw ConfigError("FPGA kernel rows need positive size, LUT count and latency");
    }
  }
}

const FpgaKernelRow& FpgaProfile::row(int input_size) const {
  for (const FpgaKernelRow& r : rows)
    if (r.input_size == input_size) return r;
  throw InputError("FPGA profile has no row for " + std::to_string(input_size) + "x" +
                   std::to_string(input_size) + " inputs");
}

FpgaProfile winoconv_profile(std::int64_t lut_total, double frequency_hz) {
  FpgaProfile p;
  p.lut_total = lut_total;
  p.frequency_hz = frequency_hz;
  p.rows = {
      {4, 827, 6}, {5, 2682, 10}, {6, 4242, 12}, {7, 10214, 16}, {8, 16499, 17},
  };
  p.validate();
  return p;
}

double fpga_max_flops(const FpgaProfile& profile, int input_size) {
  profile.validate();
  const FpgaKernelRow& r = profile.row(input_size);
  const double units = static_cast<double>(profile.lut_total) / static_cast<double>(r.lut_wino);
  const double per_pass = static_cast<double>(conv_flops(1, input_size, input_size, 3, 1));
  return units * per_pass * profile.frequency_hz / static_cast<double>(r.latency);
}

double theoretical_fps(double max_flops, double flops_per_frame) {
  if (!(flops_per_frame > 0.0)) throw ConfigError("flops per frame must be positive");
  return max_flops / flops_per_frame;
}

}  // namespace vsr
