// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

// vsrkit: command-line front end for model building, upscaling,
// benchmarking, evaluation and analysis.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vsr/bench.hpp"
#include "vsr/error.hpp"
#include "vsr/inspect.hpp"
#include "vsr/io.hpp"
#include "vsr/metrics.hpp"
#include "vsr/parallel.hpp"
#include "vsr/pipeline.hpp"
#include "vsr/simd/kernels.hpp"

namespace {

using namespace vsr;

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument("");
    std::size_t used = 0;
    const int w = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("");
    const std::string hs = text.substr(x + 1);
    const int h = std::stoi(hs, &used);
    if (used != hs.size() || w < 1 || h < 1) throw std::invalid_argument("");
    return {w, h};
  } catch (const std::logic_error&) {
    throw ConfigError("size '" + text + "' is not WxH");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

ReportFormat format_for(const std::string& path) {
  return path.ends_with(".csv") ? ReportFormat::csv : ReportFormat::json;
}

void write_report(const Report& r, const std::string& path) {
  const std::string doc = emit_report(r, format_for(path));
  if (path == "-") {
    std::cout << doc;
  } else {
    write_file(path, doc);
  }
}

struct UpscaleArgs {
  std::string model, in, out, conv = "gemm", format = "ppm";
  int scale = 4;
  bool fuse = false;
};

int run_upscale(const UpscaleArgs& a) {
  VsrModel m = load_model(a.model);
  if (m.scale != a.scale) {
    throw ConfigError("model upscales x" + std::to_string(m.scale) + ", --scale " +
                      std::to_string(a.scale) + " requested");
  }
  if (a.fuse) m = m.fused();
  const FrameSequence frames = read_sequence(a.in);
  BackendLog log;
  ForwardOptions opts;
  opts.backend = parse_backend(a.conv);
  opts.log = &log;
  const std::vector<Tensor> hr = upscale_sequence(m, frames, opts);
  std::vector<Tensor> clamped;
  for (const Tensor& t : hr) clamped.push_back(clamp01(t));
  write_sequence(clamped, a.out, parse_frame_format(a.format));
  if (!log.entries.empty()) std::cerr << "note: " << log.entries.front() << "\n";
  std::printf("wrote %zu frames (%dx%d) to %s\n", clamped.size(), clamped[0].shape().w,
              clamped[0].shape().h, a.out.c_str());
  return 0;
}

struct BenchArgs {
  std::string model, size = "320x180", conv = "gemm", report;
  int frames = 30, warmup = 5;
  bool fuse = false;
};

int run_bench(const BenchArgs& a) {
  const VsrModel m = load_model(a.model);
  const auto [w, h] = parse_size(a.size);
  BenchConfig cfg;
  cfg.width = w;
  cfg.height = h;
  cfg.frames = a.frames;
  cfg.warmup = a.warmup;
  cfg.backend = parse_backend(a.conv);
  cfg.fused = a.fuse;
  const BenchResult r = time_pipeline(m, cfg);
  std::printf("%s %dx%d x%d conv=%s fused=%s simd=%s threads=%d: %.3f fps (median %.2f ms/frame)\n",
              r.arch.c_str(), r.width, r.height, r.scale, r.backend.c_str(), r.fused ? "yes" : "no",
              r.simd.c_str(), r.threads, r.fps, r.median_frame_ms);
  if (!a.report.empty()) {
    Report rep;
    rep.bench.push_back(r);
    rep.metadata = default_report_metadata();
    rep.metadata["model"] = a.model;
    write_report(rep, a.report);
  }
  return 0;
}

struct EvalArgs {
  std::string gen, ref, metrics = "psnr,ssim,tof,tlp", report;
};

int run_eval(const EvalArgs& a) {
  const FrameSequence gen = read_sequence(a.gen);
  const FrameSequence ref = read_sequence(a.ref);
  if (gen.size() != ref.size()) {
    throw InputError("generated sequence has " + std::to_string(gen.size()) +
                     " frames, reference has " + std::to_string(ref.size()));
  }
  if (gen[0].shape() != ref[0].shape()) {
    throw InputError("generated frames " + to_string(gen[0].shape()) + " differ from reference " +
                     to_string(ref[0].shape()));
  }
  Report rep;
  rep.metadata = default_report_metadata();
  rep.metadata["eval.gen"] = a.gen;
  rep.metadata["eval.ref"] = a.ref;
  rep.metadata["eval.frames"] = std::to_string(gen.size());
  for (const std::string& m : split(a.metrics, ',')) {
    double v = 0.0;
    if (m == "psnr" || m == "ssim") {
      for (std::size_t i = 0; i < gen.size(); ++i) v += m == "psnr" ? psnr(gen[i], ref[i]) : ssim(gen[i], ref[i]);
      v /= static_cast<double>(gen.size());
    } else if (m == "tof") {
      v = tof(gen, ref);
    } else if (m == "tlp") {
      v = tlp(gen, ref, FeatureProxyDistance());
    } else {
      throw ConfigError("unknown metric '" + m + "' (expected psnr, ssim, tof or tlp)");
    }
    rep.metrics.push_back({m, v, v, v, default_orientation(m)});
    std::printf("%-5s %.6f\n", m.c_str(), v);
  }
  if (!a.report.empty()) write_report(rep, a.report);
  return 0;
}

struct ScoreArgs {
  std::string reports, weights, out;
};

int run_score(const ScoreArgs& a) {
  const std::vector<std::string> paths = split(a.reports, ',');
  std::vector<std::vector<MetricRecord>> per;
  for (const std::string& p : paths) {
    Report r = parse_report_json(read_file(p));
    if (r.metrics.empty()) throw InputError("'" + p + "' has no metrics section");
    per.push_back(std::move(r.metrics));
  }
  const std::size_t n_metrics = per[0].size();
  for (std::size_t i = 1; i < per.size(); ++i) {
    bool same = per[i].size() == n_metrics;
    for (std::size_t j = 0; same && j < n_metrics; ++j) same = per[i][j].name == per[0][j].name;
    if (!same) throw InputError("'" + paths[i] + "' has a different metric list than '" + paths[0] + "'");
  }
  // Ranges span all reports for each metric.
  if (per.size() > 1) {
    for (std::size_t j = 0; j < n_metrics; ++j) {
      std::vector<MetricRecord> col;
      for (const auto& rs : per) col.push_back(rs[j]);
      set_range(col);
      for (std::size_t i = 0; i < per.size(); ++i) per[i][j] = col[i];
    }
  }
  ScoreWeights w = ScoreWeights::equal(n_metrics);
  if (!a.weights.empty()) {
    w.lambda.clear();
    for (const std::string& s : split(a.weights, ',')) w.lambda.push_back(std::stod(s));
    if (w.lambda.size() != n_metrics) {
      throw ConfigError(std::to_string(w.lambda.size()) + " weights given for " +
                        std::to_string(n_metrics) + " metrics");
    }
  }
  Report out;
  out.metadata = default_report_metadata();
  for (std::size_t i = 0; i < per.size(); ++i) {
    const double s = quality_score(per[i], w);
    std::printf("%s score %.6f\n", paths[i].c_str(), s);
    out.metrics.push_back({"score:" + paths[i], s, 0.0, 1.0, Orientation::higher_better});
  }
  if (!a.out.empty()) write_report(out, a.out);
  return 0;
}

struct FpgaArgs {
  std::int64_t lut_total = kDefaultLutTotal;
  double freq = kDefaultFrequencyHz;
  double flops_per_frame = 0.0;
  bool table = false;
  std::string report;
};

int run_estimate_fpga(const FpgaArgs& a) {
  const FpgaProfile p = winoconv_profile(a.lut_total, a.freq);
  std::printf("lut_total %lld, frequency %.6g Hz\n", static_cast<long long>(p.lut_total), p.frequency_hz);
  Report rep;
  rep.metadata = default_report_metadata();
  rep.metadata["fpga.lut_total"] = std::to_string(p.lut_total);
  rep.metadata["fpga.frequency_hz"] = std::to_string(p.frequency_hz);
  const double best = fpga_max_flops(p, 4);
  if (a.table) {
    std::printf("%-6s %8s %8s %10s %14s\n", "input", "lut", "latency", "flops", "max_flops_T");
    for (const FpgaKernelRow& r : p.rows) {
      const double mf = fpga_max_flops(p, r.input_size);
      std::printf("%dx%-4d %8lld %8lld %10lld %14.3f\n", r.input_size, r.input_size,
                  static_cast<long long>(r.lut_wino), static_cast<long long>(r.latency),
                  static_cast<long long>(conv_flops(1, r.input_size, r.input_size, 3, 1)), mf / 1e12);
      rep.metrics.push_back({"max_flops_" + std::to_string(r.input_size) + "x" + std::to_string(r.input_size),
                             mf, mf, mf, Orientation::higher_better});
    }
    struct Target {
      const char* label;
      double gflops;
    };
    std::printf("projected fps at %.3f T:\n", best / 1e12);
    for (const Target& t : {Target{"720p", 28.55}, Target{"1080p", 64.06}, Target{"4k", 257.01}}) {
      const double fps = theoretical_fps(best, t.gflops * 1e9);
      std::printf("  %-6s %8.2f GFLOPs/frame %8.2f fps\n", t.label, t.gflops, fps);
      rep.metrics.push_back({std::string("fps_") + t.label, fps, fps, fps, Orientation::higher_better});
    }
  }
  if (a.flops_per_frame > 0.0) {
    const double fps = theoretical_fps(best, a.flops_per_frame);
    std::printf("%.6g flops/frame -> %.2f fps at %.3f T\n", a.flops_per_frame, fps, best / 1e12);
    rep.metrics.push_back({"fps", fps, fps, fps, Orientation::higher_better});
  } else if (!a.table) {
    std::printf("max flops (4x4 unit) %.3f T\n", best / 1e12);
    rep.metrics.push_back({"max_flops_4x4", best, best, best, Orientation::higher_better});
  }
  if (!a.report.empty()) write_report(rep, a.report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vsrkit: recurrent video super-resolution toolkit"};
  app.require_subcommand(1);
  int threads = 1;
  std::string simd_isa;
  app.add_option("--threads", threads, "Worker threads for convolution")->check(CLI::Range(1, 256));
  app.add_option("--simd", simd_isa, "Kernel set: scalar, avx2 or neon (default: best available)");

  UpscaleArgs up;
  auto* c_up = app.add_subcommand("upscale", "Super-resolve a frame directory");
  c_up->add_option("--model", up.model, "Model file")->required();
  c_up->add_option("--in", up.in, "Input frame directory")->required();
  c_up->add_option("--out", up.out, "Output frame directory")->required();
  c_up->add_option("--scale", up.scale, "Upscale factor (must match the model)");
  c_up->add_option("--conv", up.conv, "naive, gemm or winograd");
  c_up->add_option("--format", up.format, "Output frames: ppm or f32");
  c_up->add_flag("--fuse-bn", up.fuse, "Fold batch norms before running");

  BenchArgs bn;
  auto* c_bench = app.add_subcommand("bench", "Time frame-by-frame inference");
  c_bench->add_option("--model", bn.model, "Model file")->required();
  c_bench->add_option("--size", bn.size, "LR frame size WxH");
  c_bench->add_option("--frames", bn.frames, "Timed frames")->check(CLI::PositiveNumber);
  c_bench->add_option("--warmup", bn.warmup, "Untimed warm-up frames")->check(CLI::NonNegativeNumber);
  c_bench->add_option("--conv", bn.conv, "naive, gemm or winograd");
  c_bench->add_flag("--fuse-bn", bn.fuse, "Fold batch norms before timing");
  c_bench->add_option("--report", bn.report, "Report path (.json or .csv, - for stdout)");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Compare a generated sequence with a reference");
  c_eval->add_option("--gen", ev.gen, "Generated frame directory")->required();
  c_eval->add_option("--ref", ev.ref, "Reference frame directory")->required();
  c_eval->add_option("--metrics", ev.metrics, "Comma-separated subset of psnr,ssim,tof,tlp");
  c_eval->add_option("--report", ev.report, "Report path (.json or .csv, - for stdout)");

  ScoreArgs sc;
  auto* c_score = app.add_subcommand("score", "Quality score across evaluation reports");
  c_score->add_option("--reports", sc.reports, "Comma-separated JSON reports")->required();
  c_score->add_option("--weights", sc.weights, "Comma-separated metric weights summing to 1");
  c_score->add_option("--report", sc.out, "Write the scores to this report");

  std::string fuse_in, fuse_out;
  auto* c_fuse = app.add_subcommand("fuse-bn", "Fold batch norms into convolutions");
  c_fuse->add_option("--in", fuse_in, "Input model")->required();
  c_fuse->add_option("--out", fuse_out, "Output model")->required();

  std::string arch = "egvsr", init = "random-seeded", build_out;
  std::uint64_t seed = 0;
  auto* c_build = app.add_subcommand("build-model", "Construct a network and write it");
  c_build->add_option("--arch", arch, "egvsr, control-a, control-b or control-c");
  c_build->add_option("--init", init, "random-seeded or zeros");
  c_build->add_option("--seed", seed, "Initialization seed");
  c_build->add_option("--out", build_out, "Output model")->required();

  FpgaArgs fp;
  auto* c_fpga = app.add_subcommand("estimate-fpga", "Analytical LUT-based Winograd throughput");
  c_fpga->add_option("--lut-total", fp.lut_total, "Device LUT budget")->check(CLI::PositiveNumber);
  c_fpga->add_option("--freq", fp.freq, "Clock in Hz")->check(CLI::PositiveNumber);
  c_fpga->add_option("--flops-per-frame", fp.flops_per_frame, "Workload for an FPS projection");
  c_fpga->add_flag("--table", fp.table, "Print every kernel size and the standard projections");
  c_fpga->add_option("--report", fp.report, "Report path (.json or .csv, - for stdout)");

  std::string insp_model, insp_size;
  auto* c_insp = app.add_subcommand("inspect", "Layer table, parameters and FLOPs");
  c_insp->add_option("--model", insp_model, "Model file")->required();
  c_insp->add_option("--size", insp_size, "LR frame size WxH for shapes and FLOPs");

  CLI11_PARSE(app, argc, argv);

  try {
    set_num_threads(threads);
    if (!simd_isa.empty()) {
      if (simd_isa == "scalar") {
        simd::set_active(simd::Isa::scalar);
      } else if (simd_isa == "avx2") {
        simd::set_active(simd::Isa::avx2);
      } else if (simd_isa == "neon") {
        simd::set_active(simd::Isa::neon);
      } else {
        throw ConfigError("unknown --simd '" + simd_isa + "'");
      }
    }

    if (*c_up) return run_upscale(up);
    if (*c_bench) return run_bench(bn);
    if (*c_eval) return run_eval(ev);
    if (*c_score) return run_score(sc);
    if (*c_fpga) return run_estimate_fpga(fp);
    if (*c_fuse) {
      const VsrModel m = load_model(fuse_in);
      const VsrModel f = m.fused();
      save_model(f, fuse_out);
      const auto layers = [](const VsrModel& v) {
        return (v.fnet ? v.fnet->num_layers() : 0) + v.srnet.num_layers();
      };
      std::printf("%d layers -> %d layers, %lld -> %lld params\n", layers(m), layers(f),
                  static_cast<long long>(m.params()), static_cast<long long>(f.params()));
      return 0;
    }
    if (*c_build) {
      WeightInit wi;
      if (init == "random-seeded") {
        wi = WeightInit::random_seeded;
      } else if (init == "zeros") {
        wi = WeightInit::zeros;
      } else {
        throw ConfigError("unknown --init '" + init + "' (expected random-seeded or zeros)");
      }
      const VsrModel m = build_model(parse_arch(arch), wi, seed);
      save_model(m, build_out);
      std::printf("%s: %lld params -> %s\n", std::string(name(m.arch)).c_str(),
                  static_cast<long long>(m.params()), build_out.c_str());
      return 0;
    }
    if (*c_insp) {
      const VsrModel m = load_model(insp_model);
      std::optional<std::pair<int, int>> hw;
      if (!insp_size.empty()) {
        const auto [w, h] = parse_size(insp_size);
        hw = std::make_pair(h, w);
      }
      std::cout << format_inspect(m, inspect(m, hw));
      return 0;
    }
  } catch (const vsr::Error& e) {
    std::cerr << "vsrkit: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "vsrkit: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
