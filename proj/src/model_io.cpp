// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "vsr/error.hpp"
#include "vsr/io.hpp"

namespace vsr {
namespace {

constexpr std::uint32_t kBareGraph = 0xffffffffu;
constexpr std::uint32_t kMaxName = 4096;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(int v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_ += s;
  }
  void raw(const char* p, std::size_t n) { out_.append(p, n); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : b_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return b_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw ParseError(pos_, std::string("truncated ") + what + ": expected " +
                                 std::to_string(n) + " bytes, found " +
                                 std::to_string(remaining()));
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(b_[pos_++]);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(b_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(b_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  int i32(const char* what) { return static_cast<int>(u32(what)); }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::string str(const char* what) {
    const std::size_t at = pos_;
    const std::uint32_t n = u32(what);
    if (n > kMaxName) throw ParseError(at, std::string(what) + " length " + std::to_string(n) + " is implausible");
    need(n, what);
    std::string s(b_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void floats(std::span<float> dst) {
    for (float& v : dst) v = f32("weight payload");
  }

 private:
  std::string_view b_;
  std::size_t pos_ = 0;
};

void put_floats(Writer& w, std::span<const float> v) {
  for (float x : v) w.f32(x);
}

void write_graph_table(Writer& w, const NetworkGraph& g) {
  w.u32(static_cast<std::uint32_t>(g.num_inputs()));
  for (int c : g.input_channels()) w.i32(c);
  w.u32(static_cast<std::uint32_t>(g.output()));
  w.u32(static_cast<std::uint32_t>(g.num_layers()));
  for (const Layer& l : g.layers()) {
    w.u8(static_cast<std::uint8_t>(l.kind));
    w.str(l.name);
    w.u32(static_cast<std::uint32_t>(l.inputs.size()));
    for (ValueId v : l.inputs) w.u32(static_cast<std::uint32_t>(v));
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, ConvParams> || std::is_same_v<P, ConvTransposeParams>) {
            const ConvKernel& k = p.kernel;
            w.i32(k.c_out());
            w.i32(k.c_in());
            w.i32(k.k());
            w.i32(k.stride);
            w.i32(k.pad);
            if constexpr (std::is_same_v<P, ConvTransposeParams>) w.i32(p.scale);
          } else if constexpr (std::is_same_v<P, BatchNormParams>) {
            w.i32(p.channels());
            w.f32(p.eps);
            w.u8(p.frozen ? 1 : 0);
          } else if constexpr (std::is_same_v<P, Activation>) {
            w.u8(static_cast<std::uint8_t>(p.kind));
            w.f32(p.alpha);
            w.f32(p.scale);
          } else if constexpr (std::is_same_v<P, ResizeParams>) {
            w.f64(p.scale);
          } else if constexpr (std::is_same_v<P, BlockParams>) {
            w.i32(p.block);
          }
        },
        l.params);
  }
}

std::uint64_t payload_elements(const NetworkGraph& g) {
  std::uint64_t n = 0;
  for (const Layer& l : g.layers()) {
    if (const ConvKernel* k = l.kernel()) n += k->weights.shape().numel() + k->bias.size();
    if (const auto* bn = std::get_if<BatchNormParams>(&l.params)) n += 4ull * bn->channels();
  }
  return n;
}

void write_payload(Writer& w, const NetworkGraph& g) {
  for (const Layer& l : g.layers()) {
    if (const ConvKernel* k = l.kernel()) {
      put_floats(w, k->weights.values());
      put_floats(w, k->bias);
    }
    if (const auto* bn = std::get_if<BatchNormParams>(&l.params)) {
      put_floats(w, bn->gamma);
      put_floats(w, bn->beta);
      put_floats(w, bn->mean);
      put_floats(w, bn->var);
    }
  }
}

NetworkGraph read_graph_table(Reader& r, int graph_index) {
  const std::string where = "graph " + std::to_string(graph_index);
  const std::uint32_t n_inputs = r.u32("input count");
  if (n_inputs == 0 || n_inputs > 64) {
    throw ParseError(r.offset() - 4, where + ": invalid input count " + std::to_string(n_inputs));
  }
  std::vector<int> channels(n_inputs);
  for (int& c : channels) c = r.i32("input channels");
  NetworkGraph g;
  try {
    g = NetworkGraph(channels);
  } catch (const Error& e) {
    throw ParseError(r.offset(), where + ": " + e.what());
  }
  const std::uint32_t output = r.u32("output id");
  const std::uint32_t n_layers = r.u32("layer count");
  // Every layer record needs at least kind + name length + input count.
  if (static_cast<std::uint64_t>(n_layers) * 9 > r.remaining()) {
    throw ParseError(r.offset() - 4, where + ": layer count " + std::to_string(n_layers) +
                                         " exceeds the remaining file size");
  }
  for (std::uint32_t i = 0; i < n_layers; ++i) {
    const std::size_t start = r.offset();
    const std::string lw = where + " layer " + std::to_string(i);
    Layer l;
    const std::uint8_t kind = r.u8("layer kind");
    if (kind < 1 || kind > 11) throw ParseError(start, lw + ": unknown layer kind " + std::to_string(kind));
    l.kind = static_cast<LayerKind>(kind);
    l.name = r.str("layer name");
    const std::uint32_t n_in = r.u32("layer input count");
    if (n_in > 2) throw ParseError(r.offset() - 4, lw + ": too many inputs");
    for (std::uint32_t j = 0; j < n_in; ++j) l.inputs.push_back(static_cast<ValueId>(r.u32("layer input")));
    try {
      switch (l.kind) {
        case LayerKind::conv2d:
        case LayerKind::conv_transpose2d: {
          const int co = r.i32("c_out"), ci = r.i32("c_in"), k = r.i32("kernel size");
          const int stride = r.i32("stride"), pad = r.i32("pad");
          if (co < 1 || ci < 1 || k < 1 || co > 65536 || ci > 65536 || k > 64 ||
              4ull * co * ci * k * k > r.remaining()) {
            throw ParseError(start, lw + ": kernel " + std::to_string(co) + "x" +
                                        std::to_string(ci) + "x" + std::to_string(k) + "x" +
                                        std::to_string(k) + " does not fit in the file");
          }
          ConvKernel kern = ConvKernel::zeros(co, ci, k, stride, pad);
          if (l.kind == LayerKind::conv2d) {
            l.params = ConvParams{std::move(kern)};
          } else {
            l.params = ConvTransposeParams{std::move(kern), r.i32("upscale factor")};
          }
          break;
        }
        case LayerKind::batch_norm: {
          const int c = r.i32("channels");
          if (c < 1 || 16ull * c > r.remaining()) throw ParseError(start, lw + ": implausible channel count");
          BatchNormParams p = BatchNormParams::identity(c, r.f32("eps"));
          p.frozen = r.u8("frozen flag") != 0;
          l.params = std::move(p);
          break;
        }
        case LayerKind::activation: {
          const std::uint8_t k = r.u8("activation kind");
          if (k > 2) throw ParseError(r.offset() - 1, lw + ": unknown activation " + std::to_string(k));
          Activation a;
          a.kind = static_cast<ActivationKind>(k);
          a.alpha = r.f32("activation slope");
          a.scale = r.f32("activation scale");
          l.params = a;
          break;
        }
        case LayerKind::bilinear_up:
        case LayerKind::interpolation_resize:
          l.params = ResizeParams{r.f64("resize factor")};
          break;
        case LayerKind::pixel_shuffle:
        case LayerKind::space_to_depth:
          l.params = BlockParams{r.i32("block size")};
          break;
        default:
          l.params = NoParams{};
      }
      g.add_layer(std::move(l));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(start, lw + ": " + e.what());
    }
  }
  try {
    g.set_output(static_cast<ValueId>(output));
  } catch (const Error& e) {
    throw ParseError(r.offset(), where + ": " + e.what());
  }
  return g;
}

void read_payload(Reader& r, NetworkGraph& g) {
  for (int i = 0; i < g.num_layers(); ++i) {
    Layer& l = g.layer(i);
    if (ConvKernel* k = l.kernel()) {
      r.floats(k->weights.data());
      r.floats(k->bias);
    }
    if (auto* bn = std::get_if<BatchNormParams>(&l.params)) {
      r.floats(bn->gamma);
      r.floats(bn->beta);
      r.floats(bn->mean);
      r.floats(bn->var);
    }
  }
}

std::uint32_t arch_id(Arch a) { return static_cast<std::uint32_t>(a); }

std::string encode(std::uint32_t arch, int scale, std::span<const NetworkGraph* const> graphs) {
  Writer w;
  w.raw(kModelMagic, 4);
  w.u32(kModelVersion);
  w.u32(arch);
  w.u32(static_cast<std::uint32_t>(scale));
  w.u32(static_cast<std::uint32_t>(graphs.size()));
  std::uint64_t elements = 0;
  for (const NetworkGraph* g : graphs) {
    write_graph_table(w, *g);
    elements += payload_elements(*g);
  }
  w.u64(elements);
  for (const NetworkGraph* g : graphs) write_payload(w, *g);
  return w.take();
}

struct Decoded {
  std::uint32_t arch = 0;
  int scale = 0;
  std::vector<NetworkGraph> graphs;
};

Decoded decode(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kModelMagic, 4) != 0) {
    throw ParseError(0, "not a model file (bad magic)");
  }
  Reader r(bytes.substr(0));
  (void)r.u32("magic");
  const std::uint32_t version = r.u32("version");
  if (version != kModelVersion) {
    throw ParseError(4, "unsupported model format version " + std::to_string(version));
  }
  Decoded d;
  d.arch = r.u32("architecture id");
  if (d.arch != kBareGraph && d.arch > arch_id(Arch::control_c)) {
    throw ParseError(8, "unknown architecture id " + std::to_string(d.arch));
  }
  d.scale = r.i32("scale");
  if (d.scale < 1 || d.scale > 16) throw ParseError(12, "invalid scale " + std::to_string(d.scale));
  const std::uint32_t n_graphs = r.u32("graph count");
  if (n_graphs < 1 || n_graphs > 2) {
    throw ParseError(16, "invalid graph count " + std::to_string(n_graphs));
  }
  std::uint64_t expected = 0;
  for (std::uint32_t i = 0; i < n_graphs; ++i) {
    d.graphs.push_back(read_graph_table(r, static_cast<int>(i)));
    expected += payload_elements(d.graphs.back());
  }
  const std::size_t count_at = r.offset();
  const std::uint64_t declared = r.u64("payload count");
  if (declared != expected) {
    throw ParseError(count_at, "payload declares " + std::to_string(declared) +
                                   " values but the layer table needs " + std::to_string(expected));
  }
  if (r.remaining() != expected * 4) {
    throw ParseError(r.offset(), std::string(r.remaining() < expected * 4 ? "truncated" : "oversized") +
                                     " weight payload: expected " + std::to_string(expected * 4) +
                                     " bytes, found " + std::to_string(r.remaining()));
  }
  for (NetworkGraph& g : d.graphs) read_payload(r, g);
  return d;
}

// Reads the fixed header first so a foreign file is rejected before the rest is loaded.
std::string read_model_bytes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path.string() + "'");
  char magic[4] = {};
  f.read(magic, 4);
  if (f.gcount() < 4 || std::memcmp(magic, kModelMagic, 4) != 0) {
    throw ParseError(0, "'" + path.string() + "' is not a model file (bad magic)");
  }
  return read_file(path);
}

}  // namespace

std::string encode_model(const VsrModel& model) {
  std::vector<const NetworkGraph*> gs;
  if (model.fnet) gs.push_back(&*model.fnet);
  gs.push_back(&model.srnet);
  return encode(arch_id(model.arch), model.scale, gs);
}

VsrModel decode_model(std::string_view bytes) {
  Decoded d = decode(bytes);
  if (d.arch == kBareGraph) throw ParseError(8, "file holds a bare graph, not a model");
  VsrModel m;
  m.arch = static_cast<Arch>(d.arch);
  m.scale = d.scale;
  const bool recurrent = m.arch == Arch::egvsr;
  if (d.graphs.size() != (recurrent ? 2u : 1u)) {
    throw ParseError(16, "architecture " + std::string(name(m.arch)) + " expects " +
                             (recurrent ? "2 graphs" : "1 graph"));
  }
  if (recurrent) m.fnet = std::move(d.graphs[0]);
  m.srnet = std::move(d.graphs.back());
  return m;
}

void save_model(const VsrModel& model, const std::filesystem::path& path) {
  write_file(path, encode_model(model));
}

VsrModel load_model(const std::filesystem::path& path) {
  const std::string bytes = read_model_bytes(path);
  try {
    return decode_model(bytes);
  } catch (const ParseError& e) {
    throw ParseError(e.offset(), path.string() + ": " + e.what());
  }
}

std::string encode_graph(const NetworkGraph& g) {
  const NetworkGraph* p = &g;
  return encode(kBareGraph, 1, std::span<const NetworkGraph* const>(&p, 1));
}

NetworkGraph decode_graph(std::string_view bytes) {
  Decoded d = decode(bytes);
  if (d.graphs.size() != 1) throw ParseError(16, "expected exactly one graph");
  return std::move(d.graphs[0]);
}

void save_graph(const NetworkGraph& g, const std::filesystem::path& path) {
  write_file(path, encode_graph(g));
}

NetworkGraph load_graph(const std::filesystem::path& path) {
  return decode_graph(read_model_bytes(path));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path.string() + "'");
  std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) throw InputError("error reading '" + path.string() + "'");
  return s;
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw InputError("error writing '" + path.string() + "'");
}

}  // namespace vsr
