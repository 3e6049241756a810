// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "vsr/error.hpp"
#include "vsr/io.hpp"

namespace vsr {
namespace {

// Header token of a P6 file; skips whitespace and '#' comments.
int ppm_int(std::string_view b, std::size_t& pos, const char* what) {
  for (;;) {
    while (pos < b.size() && std::isspace(static_cast<unsigned char>(b[pos]))) ++pos;
    if (pos < b.size() && b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  const std::size_t start = pos;
  long v = 0;
  while (pos < b.size() && std::isdigit(static_cast<unsigned char>(b[pos]))) {
    v = v * 10 + (b[pos] - '0');
    if (v > 1 << 20) throw ParseError(start, std::string("PPM ") + what + " is too large");
    ++pos;
  }
  if (pos == start) throw ParseError(start, std::string("PPM header: expected ") + what);
  return static_cast<int>(v);
}

std::uint32_t le32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(b[at + i])) << (8 * i);
  return v;
}

void put_le32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>(v >> (8 * i)));
}

std::uint8_t quantize(float v) {
  const float c = std::clamp(std::isnan(v) ? 0.0f : v, 0.0f, 1.0f);
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string frame_name(std::size_t index, FrameFormat f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu.%s", index, f == FrameFormat::ppm ? "ppm" : "f32");
  return buf;
}

}  // namespace

FrameFormat parse_frame_format(std::string_view text) {
  if (text == "ppm") return FrameFormat::ppm;
  if (text == "f32") return FrameFormat::f32;
  throw ConfigError("unknown frame format '" + std::string(text) + "' (expected ppm or f32)");
}

Tensor decode_ppm(std::string_view b) {
  if (b.size() < 2 || b[0] != 'P' || b[1] != '6') throw ParseError(0, "not a binary PPM (P6) file");
  std::size_t pos = 2;
  const int w = ppm_int(b, pos, "width");
  const int h = ppm_int(b, pos, "height");
  const std::size_t max_at = pos;
  const int maxval = ppm_int(b, pos, "maxval");
  if (w < 1 || h < 1) throw ParseError(2, "PPM dimensions must be positive");
  if (maxval != 255) throw ParseError(max_at, "PPM maxval " + std::to_string(maxval) + " unsupported (need 255)");
  if (pos >= b.size() || !std::isspace(static_cast<unsigned char>(b[pos]))) {
    throw ParseError(pos, "PPM header must end with one whitespace byte");
  }
  ++pos;
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (b.size() - pos < need) {
    throw ParseError(pos, "truncated PPM pixel data: expected " + std::to_string(need) +
                              " bytes, found " + std::to_string(b.size() - pos));
  }
  Tensor t({1, 3, h, w});
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  auto d = t.data();
  for (std::size_t i = 0; i < plane; ++i)
    for (int c = 0; c < 3; ++c)
      d[c * plane + i] = static_cast<std::uint8_t>(b[pos + 3 * i + c]) / 255.0f;
  return t;
}

std::string encode_ppm(const Tensor& frame) {
  const Shape& s = frame.shape();
  if (s.n != 1 || (s.c != 3 && s.c != 1)) {
    throw ShapeError("PPM frames must be (1, 3, h, w) or (1, 1, h, w), got " + to_string(s));
  }
  std::string out = "P6\n" + std::to_string(s.w) + " " + std::to_string(s.h) + "\n255\n";
  const std::size_t plane = static_cast<std::size_t>(s.w) * s.h;
  const auto d = frame.data();
  out.reserve(out.size() + 3 * plane);
  for (std::size_t i = 0; i < plane; ++i)
    for (int c = 0; c < 3; ++c) out.push_back(static_cast<char>(quantize(d[(s.c == 3 ? c : 0) * plane + i])));
  return out;
}

Tensor decode_f32(std::string_view b) {
  if (b.size() < 16) throw ParseError(0, "f32 frame shorter than its 16-byte header");
  const Shape s{static_cast<int>(le32(b, 0)), static_cast<int>(le32(b, 4)),
                static_cast<int>(le32(b, 8)), static_cast<int>(le32(b, 12))};
  if (!s.valid()) throw ParseError(0, "f32 header has invalid shape " + to_string(s));
  const std::size_t need = static_cast<std::size_t>(s.numel()) * 4;
  if ((b.size() - 16) / 4 < static_cast<std::size_t>(s.numel()) || b.size() - 16 != need) {
    throw ParseError(16, "f32 payload: expected " + std::to_string(need) + " bytes, found " +
                             std::to_string(b.size() - 16));
  }
  Tensor t(s);
  auto d = t.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::bit_cast<float>(le32(b, 16 + 4 * i));
  return t;
}

std::string encode_f32(const Tensor& t) {
  const Shape& s = t.shape();
  std::string out;
  out.reserve(16 + 4 * t.data().size());
  for (int v : {s.n, s.c, s.h, s.w}) put_le32(out, static_cast<std::uint32_t>(v));
  for (float v : t.data()) put_le32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Tensor read_frame(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    return path.extension() == ".f32" ? decode_f32(bytes) : decode_ppm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(e.offset(), path.string() + ": " + e.what());
  }
}

void write_frame(const Tensor& frame, const std::filesystem::path& path) {
  write_file(path, path.extension() == ".f32" ? encode_f32(frame) : encode_ppm(frame));
}

FrameSequence read_sequence(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw InputError("'" + dir.string() + "' is not a directory");
  std::map<long, fs::path> byindex;
  std::string ext;
  for (const fs::directory_entry& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const fs::path& p = e.path();
    const std::string x = p.extension().string();
    if (x != ".ppm" && x != ".f32") continue;
    const std::string stem = p.stem().string();
    if (!all_digits(stem) || stem.size() > 9) continue;
    if (ext.empty()) ext = x;
    if (x != ext) throw InputError("'" + dir.string() + "' mixes .ppm and .f32 frames");
    const long idx = std::stol(stem);
    if (!byindex.emplace(idx, p).second) {
      throw InputError("'" + dir.string() + "' has two frames with index " + std::to_string(idx));
    }
  }
  if (byindex.empty()) throw InputError("'" + dir.string() + "' contains no frames");

  long expect = 0;
  for (const auto& [idx, p] : byindex) {
    if (idx != expect) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%04ld", expect);
      throw InputError("'" + dir.string() + "': frame " + buf + " is missing");
    }
    ++expect;
  }

  FrameSequence seq;
  seq.reserve(byindex.size());
  for (const auto& [idx, p] : byindex) {
    seq.push_back(read_frame(p));
    if (seq.back().shape() != seq.front().shape()) {
      throw InputError("'" + p.string() + "' has shape " + to_string(seq.back().shape()) +
                       ", expected " + to_string(seq.front().shape()));
    }
  }
  return seq;
}

void write_sequence(const FrameSequence& seq, const std::filesystem::path& dir, FrameFormat format) {
  if (seq.empty()) throw InputError("write_sequence: empty sequence");
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i].shape() != seq[0].shape()) {
      throw InputError("write_sequence: frame " + std::to_string(i) + " has shape " +
                       to_string(seq[i].shape()) + ", expected " + to_string(seq[0].shape()));
    }
    write_frame(seq[i], dir / frame_name(i, format));
  }
}

}  // namespace vsr
