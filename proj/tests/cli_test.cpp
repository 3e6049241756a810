// Copyright 2026 The vsrkit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>

#include "json.hpp"
#include "test_util.hpp"
#include "vsr/io.hpp"

namespace vsr {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(VSRKIT_CLI) + " " + args + " 2>&1";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vsrkit_cli_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, BuildAndInspectControlNets) {
  const char* totals[] = {"29409", "30177", "29673"};
  const char* heads[] = {"33", "801", "297"};
  const char* archs[] = {"control-a", "control-b", "control-c"};
  for (int i = 0; i < 3; ++i) {
    const std::string model = at(std::string(archs[i]) + ".egvs");
    ASSERT_EQ(run(std::string("build-model --arch ") + archs[i] + " --init zeros --seed 1 --out " + model).code, 0);
    const CliRun r = run("inspect --model " + model);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find(std::string("total params ") + totals[i]), std::string::npos) << r.out;
    for (const char* v : {"1664", "18464", "9248"}) EXPECT_NE(r.out.find(v), std::string::npos);
    EXPECT_NE(r.out.find(heads[i]), std::string::npos);
  }
  const CliRun sized = run("inspect --model " + at("control-b.egvs") + " --size 800x800");
  EXPECT_NE(sized.out.find("(1,1,2400,2400)"), std::string::npos) << sized.out;
  EXPECT_NE(sized.out.find("1024000000"), std::string::npos);
}

TEST_F(Cli, EstimateFpgaTable) {
  const CliRun r = run("estimate-fpga --lut-total 326080 --freq 300e6 --table --report " + at("fpga.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* v : {"2.839", "0.821", "0.623", "0.264", "0.201", "99.44", "44.32", "11.05"}) {
    EXPECT_NE(r.out.find(v), std::string::npos) << v << "\n" << r.out;
  }
  const auto doc = nlohmann::json::parse(read_file(at("fpga.json")));
  EXPECT_EQ(doc["metrics"].size(), 8u);
  const CliRun f = run("estimate-fpga --flops-per-frame 28.55e9");
  EXPECT_NE(f.out.find("99.44 fps"), std::string::npos) << f.out;
}

TEST_F(Cli, UpscaleEvalScoreFuse) {
  const std::string model = at("eg.egvs");
  ASSERT_EQ(run("build-model --arch egvsr --seed 3 --out " + model).code, 0);
  std::mt19937_64 rng(91);
  FrameSequence lr, ref;
  for (int i = 0; i < 3; ++i) {
    lr.push_back(testing::random_tensor({1, 3, 8, 8}, rng, 0, 1));
    ref.push_back(testing::random_tensor({1, 3, 32, 32}, rng, 0, 1));
  }
  write_sequence(lr, at("lr"));
  write_sequence(ref, at("ref"));

  CliRun r = run("upscale --model " + model + " --in " + at("lr") + " --out " + at("hr") + " --scale 4 --conv winograd");
  ASSERT_EQ(r.code, 0) << r.out;
  const FrameSequence hr = read_sequence(at("hr"));
  ASSERT_EQ(hr.size(), 3u);
  EXPECT_EQ(hr[0].shape(), (Shape{1, 3, 32, 32}));

  EXPECT_NE(run("upscale --model " + model + " --in " + at("lr") + " --out " + at("x") + " --scale 3").code, 0);

  ASSERT_EQ(run("fuse-bn --in " + model + " --out " + at("fused.egvs")).code, 0);
  r = run("upscale --model " + at("fused.egvs") + " --in " + at("lr") + " --out " + at("hr2") + " --scale 4");
  ASSERT_EQ(r.code, 0) << r.out;
  const FrameSequence hr2 = read_sequence(at("hr2"));
  for (std::size_t i = 0; i < hr.size(); ++i) EXPECT_LE(max_abs_diff(hr[i], hr2[i]), 1.0 / 255.0 + 1e-6);

  r = run("eval --gen " + at("hr") + " --ref " + at("ref") + " --metrics psnr,ssim,tof,tlp --report " + at("a.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  r = run("eval --gen " + at("ref") + " --ref " + at("ref") + " --report " + at("b.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("psnr  100"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("tof   0.000000"), std::string::npos) << r.out;

  r = run("score --reports " + at("a.json") + "," + at("b.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("b.json score 1.000000"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("a.json score 0.000000"), std::string::npos) << r.out;
  EXPECT_NE(run("score --reports " + at("a.json") + " --weights 0.5,0.5").code, 0);
}

TEST_F(Cli, BenchWritesReport) {
  const std::string model = at("c.egvs");
  ASSERT_EQ(run("build-model --arch control-c --seed 2 --out " + model).code, 0);
  const CliRun r = run("bench --model " + model + " --size 32x24 --frames 3 --warmup 1 --conv gemm --fuse-bn --report " + at("bench.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string csv = read_file(at("bench.csv"));
  EXPECT_NE(csv.find("control-c,32,24,3,gemm,true"), std::string::npos) << csv;
}

TEST_F(Cli, ErrorsExitNonzero) {
  EXPECT_NE(run("build-model --arch nope --out " + at("x.egvs")).code, 0);
  EXPECT_NE(run("inspect --model " + at("missing.egvs")).code, 0);
  write_file(at("junk.egvs"), "JUNKJUNKJUNK");
  const CliRun r = run("inspect --model " + at("junk.egvs"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.out.find("offset 0"), std::string::npos) << r.out;
  EXPECT_NE(run("eval --gen " + at("none") + " --ref " + at("none")).code, 0);
  EXPECT_NE(run("bench --model " + at("junk.egvs") + " --size 3y4").code, 0);
  EXPECT_NE(run("").code, 0);
}

}  // namespace
}  // namespace vsr
