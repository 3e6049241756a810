// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <sstream>
#include <string>

#include "vsr/inspect.hpp"

namespace vsr {
namespace {

std::string describe(const Layer& l) {
  char buf[96] = {};
  if (const auto* p = std::get_if<ConvParams>(&l.params)) {
    const ConvKernel& k = p->kernel;
    std::snprintf(buf, sizeof buf, "%dx%d %d->%d s%d p%d", k.k(), k.k(), k.c_in(), k.c_out(),
                  k.stride, k.pad);
  } else if (const auto* t = std::get_if<ConvTransposeParams>(&l.params)) {
    const ConvKernel& k = t->kernel;
    std::snprintf(buf, sizeof buf, "%dx%d %d->%d x%d p%d", k.k(), k.k(), k.c_in(), k.c_out(),
                  t->scale, k.pad);
  } else if (const auto* bn = std::get_if<BatchNormParams>(&l.params)) {
    std::snprintf(buf, sizeof buf, "c=%d eps=%g%s", bn->channels(), bn->eps,
                  bn->frozen ? "" : " tracking");
  } else if (const auto* a = std::get_if<Activation>(&l.params)) {
    const std::string n(name(a->kind));
    if (a->kind == ActivationKind::leaky_relu) {
      std::snprintf(buf, sizeof buf, "%s %g", n.c_str(), a->alpha);
    } else if (a->kind == ActivationKind::tanh) {
      std::snprintf(buf, sizeof buf, "%s x%g", n.c_str(), a->scale);
    } else {
      std::snprintf(buf, sizeof buf, "%s", n.c_str());
    }
  } else if (const auto* r = std::get_if<ResizeParams>(&l.params)) {
    std::snprintf(buf, sizeof buf, "x%g", r->scale);
  } else if (const auto* b = std::get_if<BlockParams>(&l.params)) {
    std::snprintf(buf, sizeof buf, "r=%d", b->block);
  }
  return buf;
}

void add_graph(InspectSummary& s, const NetworkGraph& g, const std::string& label,
               std::optional<Shape> input) {
  std::vector<Shape> shapes;
  std::vector<FlopCount> flops;
  if (input) {
    std::vector<Shape> in = {*input};
    shapes = infer_shapes(g, in);
    flops = layer_flops(g, in);
  }
  for (int i = 0; i < g.num_layers(); ++i) {
    const Layer& l = g.layer(i);
    InspectRow row;
    row.graph = label;
    row.index = i;
    row.name = l.name;
    row.kind = std::string(name(l.kind));
    row.detail = describe(l);
    row.params = layer_params(l);
    if (input) {
      row.output = shapes[static_cast<std::size_t>(g.layer_value(i))];
      row.cost = flops[static_cast<std::size_t>(i)];
    }
    s.total_params += row.params;
    s.rows.push_back(std::move(row));
  }
}

}  // namespace

InspectSummary inspect(const VsrModel& model, std::optional<std::pair<int, int>> size_hw) {
  InspectSummary s;
  std::optional<Shape> fin, sin;
  if (size_hw) {
    const auto [h, w] = *size_hw;
    const auto align = [](int v) { return (v + 7) / 8 * 8; };
    if (model.fnet) fin = Shape{1, 6, align(h), align(w)};
    sin = Shape{1, model.srnet.input_channels()[0], h, w};
  }
  if (model.fnet) add_graph(s, *model.fnet, "fnet", fin);
  add_graph(s, model.srnet, model.fnet ? "srnet" : "net", sin);
  if (size_hw) s.total_cost = model.flops(size_hw->first, size_hw->second);
  return s;
}

std::string format_inspect(const VsrModel& model, const InspectSummary& s) {
  std::ostringstream os;
  os << "arch " << name(model.arch) << ", scale x" << model.scale << "\n";
  char line[256];
  const bool sized = s.total_cost.has_value();
  if (sized) {
    std::snprintf(line, sizeof line, "%-6s %4s  %-20s %-20s %-22s %10s  %-18s %14s\n", "graph",
                  "#", "name", "kind", "detail", "params", "output", "macs");
  } else {
    std::snprintf(line, sizeof line, "%-6s %4s  %-20s %-20s %-22s %10s\n", "graph", "#", "name",
                  "kind", "detail", "params");
  }
  os << line;
  for (const InspectRow& r : s.rows) {
    if (sized) {
      std::snprintf(line, sizeof line, "%-6s %4d  %-20s %-20s %-22s %10lld  %-18s %14lld\n",
                    r.graph.c_str(), r.index, r.name.c_str(), r.kind.c_str(), r.detail.c_str(),
                    static_cast<long long>(r.params), to_string(*r.output).c_str(),
                    static_cast<long long>(r.cost->macs));
    } else {
      std::snprintf(line, sizeof line, "%-6s %4d  %-20s %-20s %-22s %10lld\n", r.graph.c_str(),
                    r.index, r.name.c_str(), r.kind.c_str(), r.detail.c_str(),
                    static_cast<long long>(r.params));
    }
    os << line;
  }
  os << "total params " << s.total_params << "\n";
  if (sized) {
    os << "total macs " << s.total_cost->macs << "\n";
    os << "total elementwise " << s.total_cost->elementwise << "\n";
    os << "total flops " << s.total_cost->flops() << "\n";
  }
  return os.str();
}

}  // namespace vsr
