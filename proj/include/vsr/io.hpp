// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "vsr/metrics.hpp"
#include "vsr/pipeline.hpp"

namespace vsr {

// Model files: see docs/model_format.md. Little-endian throughout.
inline constexpr char kModelMagic[4] = {'E', 'G', 'V', 'S'};
inline constexpr std::uint32_t kModelVersion = 1;

std::string encode_model(const VsrModel& model);
VsrModel decode_model(std::string_view bytes);

void save_model(const VsrModel& model, const std::filesystem::path& path);
VsrModel load_model(const std::filesystem::path& path);

/// A single graph without architecture metadata.
std::string encode_graph(const NetworkGraph& g);
NetworkGraph decode_graph(std::string_view bytes);
void save_graph(const NetworkGraph& g, const std::filesystem::path& path);
NetworkGraph load_graph(const std::filesystem::path& path);

enum class FrameFormat { ppm, f32 };

FrameFormat parse_frame_format(std::string_view text);

/// Binary P6, maxval 255. Values map to [0, 1] by division by 255.
Tensor decode_ppm(std::string_view bytes);
/// Round-to-nearest after clamping to [0, 1]. Single-channel frames are written as gray.
std::string encode_ppm(const Tensor& frame);

/// 16-byte header of n, c, h, w as u32, then n*c*h*w f32 values.
Tensor decode_f32(std::string_view bytes);
std::string encode_f32(const Tensor& t);

Tensor read_frame(const std::filesystem::path& path);
void write_frame(const Tensor& frame, const std::filesystem::path& path);

/// Frames named by zero-padded index (0000.ppm, 0001.ppm, ...) starting at 0.
FrameSequence read_sequence(const std::filesystem::path& dir);
void write_sequence(const FrameSequence& seq, const std::filesystem::path& dir,
                    FrameFormat format = FrameFormat::ppm);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace vsr
