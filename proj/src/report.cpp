// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>

#include "json.hpp"
#include "vsr/bench.hpp"
#include "vsr/error.hpp"

namespace vsr {
namespace {

using ordered_json = nlohmann::ordered_json;

// Shortest text that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  for (int prec = 6; prec < 17; ++prec) {
    char tmp[32];
    std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) return tmp;
  }
  return buf;
}

ordered_json to_json(const BenchResult& r) {
  ordered_json j;
  j["arch"] = r.arch;
  j["width"] = r.width;
  j["height"] = r.height;
  j["scale"] = r.scale;
  j["backend"] = r.backend;
  j["fused"] = r.fused;
  j["simd"] = r.simd;
  j["threads"] = r.threads;
  j["frames"] = r.frames;
  j["warmup"] = r.warmup;
  j["wall_seconds"] = r.wall_seconds;
  j["fps"] = r.fps;
  j["mean_frame_ms"] = r.mean_frame_ms;
  j["median_frame_ms"] = r.median_frame_ms;
  j["macs_per_frame"] = r.macs_per_frame;
  j["flops_per_frame"] = r.flops_per_frame;
  return j;
}

ordered_json to_json(const MetricRecord& m) {
  ordered_json j;
  j["name"] = m.name;
  j["value"] = m.value;
  j["min"] = m.min;
  j["max"] = m.max;
  j["orientation"] = std::string(name(m.orientation));
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  throw ConfigError("unknown report format '" + std::string(text) + "' (expected json or csv)");
}

std::map<std::string, std::string> default_report_metadata() {
  return {
      {"conv.relative_error", "max|a-b| / max|reference|"},
      {"flops.convention", "macs counted per multiply-accumulate; flops = 2*macs + elementwise"},
      {"flow.estimator", "pyramidal lucas-kanade"},
      {"flow.levels", "3"},
      {"flow.window", "7"},
      {"flow.iterations", "5"},
      {"flow.sign", "a(p) ~ b(p + flow(p)), channel 0 = x"},
      {"lp.proxy", "random conv features 8/16/32, seed 0x5eed"},
      {"metrics.color", "luma bt.601 for psnr, ssim and flow"},
      {"psnr.cap_db", "100"},
      {"ssim.window", "gaussian 11, sigma 1.5, k1 0.01, k2 0.03"},
      {"temporal.reduction", "per-pixel mean, then mean over frame pairs"},
      {"score.normalization", "(m - min) / (max - min), higher-better metrics negated"},
      {"bench.clock", "steady_clock, warm-up frames excluded"},
      {"bench.input_seed", "0xbe7c4"},
  };
}

std::string emit_report(const Report& report, ReportFormat format) {
  if (report.bench.empty() && report.metrics.empty()) {
    throw InputError("report: nothing to emit (no bench results or metric records)");
  }
  if (format == ReportFormat::json) {
    ordered_json doc;
    ordered_json meta = ordered_json::object();
    for (const auto& [k, v] : report.metadata) meta[k] = v;
    doc["metadata"] = meta;
    if (!report.bench.empty()) {
      ordered_json arr = ordered_json::array();
      for (const BenchResult& r : report.bench) arr.push_back(to_json(r));
      doc["bench"] = arr;
    }
    if (!report.metrics.empty()) {
      ordered_json arr = ordered_json::array();
      for (const MetricRecord& m : report.metrics) arr.push_back(to_json(m));
      doc["metrics"] = arr;
    }
    return doc.dump(2) + "\n";
  }

  std::ostringstream os;
  for (const auto& [k, v] : report.metadata) os << "# " << k << ": " << v << "\n";
  if (!report.bench.empty()) {
    os << "arch,width,height,scale,backend,fused,simd,threads,frames,warmup,wall_seconds,fps,"
          "mean_frame_ms,median_frame_ms,macs_per_frame,flops_per_frame\n";
    for (const BenchResult& r : report.bench) {
      os << csv_field(r.arch) << ',' << r.width << ',' << r.height << ',' << r.scale << ','
         << csv_field(r.backend) << ',' << (r.fused ? "true" : "false") << ','
         << csv_field(r.simd) << ',' << r.threads << ',' << r.frames << ',' << r.warmup << ','
         << fmt(r.wall_seconds) << ',' << fmt(r.fps) << ',' << fmt(r.mean_frame_ms) << ','
         << fmt(r.median_frame_ms) << ',' << r.macs_per_frame << ',' << r.flops_per_frame
         << "\n";
    }
  }
  if (!report.metrics.empty()) {
    if (!report.bench.empty()) os << "\n";
    os << "name,value,min,max,orientation\n";
    for (const MetricRecord& m : report.metrics) {
      os << csv_field(m.name) << ',' << fmt(m.value) << ',' << fmt(m.min) << ',' << fmt(m.max)
         << ',' << name(m.orientation) << "\n";
    }
  }
  return os.str();
}

Report parse_report_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.byte, std::string("report is not valid JSON: ") + e.what());
  }
  Report r;
  try {
    if (doc.contains("metadata")) {
      for (const auto& [k, v] : doc["metadata"].items()) r.metadata[k] = v.get<std::string>();
    }
    if (doc.contains("metrics")) {
      for (const auto& m : doc["metrics"]) {
        MetricRecord rec;
        rec.name = m.at("name").get<std::string>();
        rec.value = m.at("value").get<double>();
        rec.min = m.value("min", rec.value);
        rec.max = m.value("max", rec.value);
        const std::string o = m.value("orientation", std::string(name(default_orientation(rec.name))));
        rec.orientation = o == "higher-better" ? Orientation::higher_better : Orientation::lower_better;
        r.metrics.push_back(rec);
      }
    }
    if (doc.contains("bench")) {
      for (const auto& b : doc["bench"]) {
        BenchResult br;
        br.arch = b.at("arch").get<std::string>();
        br.width = b.at("width").get<int>();
        br.height = b.at("height").get<int>();
        br.scale = b.at("scale").get<int>();
        br.backend = b.at("backend").get<std::string>();
        br.fused = b.at("fused").get<bool>();
        br.simd = b.at("simd").get<std::string>();
        br.threads = b.at("threads").get<int>();
        br.frames = b.at("frames").get<int>();
        br.warmup = b.at("warmup").get<int>();
        br.wall_seconds = b.at("wall_seconds").get<double>();
        br.fps = b.at("fps").get<double>();
        br.mean_frame_ms = b.at("mean_frame_ms").get<double>();
        br.median_frame_ms = b.at("median_frame_ms").get<double>();
        br.macs_per_frame = b.at("macs_per_frame").get<std::int64_t>();
        br.flops_per_frame = b.at("flops_per_frame").get<std::int64_t>();
        r.bench.push_back(br);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("report has an unexpected layout: ") + e.what());
  }
  return r;
}

}  // namespace vsr
