// Drives the stackwave binary end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "stackwave/io.hpp"
#include "stackwave/synth.hpp"
#include "stackwave/transform.hpp"
#include "support/oracles.hpp"

#ifndef STACKWAVE_CLI
#error "STACKWAVE_CLI must point at the stackwave executable"
#endif

namespace stackwave {
namespace {

namespace fs = std::filesystem;

struct Run {
  int exit_code = -1;
  std::string output;  // stdout and stderr
};

Run run(const std::string& args) {
  const std::string cmd = std::string(STACKWAVE_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("stackwave_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, HelpAndBadArguments) {
  EXPECT_EQ(run("--help").exit_code, 0);
  EXPECT_EQ(run("").exit_code, 2);
  EXPECT_EQ(run("encode").exit_code, 2);
  EXPECT_EQ(run("encode a.csv b.wav --mode sideways --rate 10").exit_code, 2);
}

TEST_F(CliTest, SynthEncodeVerifyStrictFeasible) {
  auto r = run("synth " + path("a.csv") + " --channels 4 --samples 64 --rate 32 --band alpha --seed 3");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  r = run("encode " + path("a.csv") + " " + path("w.wav") + " --target-rate 256 --mode strict-lossless");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "true")) << r.output;
  r = run("verify " + path("a.csv") + " --target-rate 256 --mode strict-lossless");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "PASS")) << r.output;
  r = run("decode " + path("w.wav") + " " + path("b.csv") + " --compare " + path("a.csv"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "channel 4 rmse")) << r.output;
}

TEST_F(CliTest, StrictAtPaperRateIsInfeasible) {
  auto r = run("synth " + path("a.f64") + " --channels 30 --samples 10000 --rate 1000 --band alpha");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  r = run("encode " + path("a.f64") + " " + path("w.wav") + " --target-rate 16000 --mode strict-lossless");
  EXPECT_EQ(r.exit_code, 3) << r.output;
  EXPECT_TRUE(contains(r.output, "30000")) << r.output;
  EXPECT_FALSE(fs::exists(path("w.wav")));
}

TEST_F(CliTest, LossyVerifyExitsFour) {
  run("synth " + path("a.csv") + " --channels 4 --samples 64 --rate 32 --band alpha");
  const auto r = run("verify " + path("a.csv") + " --target-rate 128 --json");
  EXPECT_EQ(r.exit_code, 4) << r.output;
  EXPECT_TRUE(contains(r.output, "\"relative_error\"")) << r.output;
}

TEST_F(CliTest, EncodeReportsPlan) {
  run("synth " + path("a.csv") + " --channels 30 --samples 10000 --rate 1000 --band beta");
  const auto r = run("encode " + path("a.csv") + " " + path("w.wav"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "160000")) << r.output;
  EXPECT_TRUE(contains(r.output, "collision")) << r.output;
  EXPECT_TRUE(contains(r.output, "false")) << r.output;
  EXPECT_TRUE(contains(r.output, "warning")) << r.output;
}

TEST_F(CliTest, RawDecodeMatchesLibraryBitForBit) {
  std::mt19937_64 rng(5);
  MultiChannelRecord rec(testing::random_channels(rng, 3, 40), 20.0);
  io::write_multichannel(rec, path("a.f64"), io::RecordFormat::kRawF64);
  auto r = run("encode " + path("a.f64") + " " + path("w.f64") + " --target-rate 120 --order 3,1,2");
  ASSERT_EQ(r.exit_code, 0) << r.output;
  r = run("decode " + path("w.f64") + " " + path("b.f64"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto cli = io::read_multichannel(path("b.f64"), io::RecordFormat::kRawF64);
  const auto lib = decode(encode(rec, TransformConfig{120.0, Mode::kRealHermitian, {2, 0, 1}}));
  EXPECT_EQ(cli.channels(), lib.channels());
}

TEST_F(CliTest, TruncatedSidecarExitsTwo) {
  run("synth " + path("a.csv") + " --channels 2 --samples 32 --rate 16 --tone 1:3");
  run("encode " + path("a.csv") + " " + path("w.f64") + " --target-rate 64");
  const std::string sidecar = path("w.f64.sidecar");
  ASSERT_TRUE(fs::exists(sidecar));
  fs::resize_file(sidecar, fs::file_size(sidecar) / 2);
  const auto r = run("decode " + path("w.f64") + " " + path("b.csv"));
  EXPECT_EQ(r.exit_code, 2) << r.output;
}

TEST_F(CliTest, InfoShowsSidecarOrFailsOnMissingFile) {
  run("synth " + path("a.csv") + " --channels 2 --samples 32 --rate 16 --tone 1:3");
  run("encode " + path("a.csv") + " " + path("w.wav") + " --target-rate 64");
  auto r = run("info " + path("w.wav"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "format_version=1")) << r.output;
  EXPECT_EQ(run("info " + path("w.wav.sidecar")).output, r.output);
  EXPECT_EQ(run("info " + path("nope.wav")).exit_code, 1);
}

TEST_F(CliTest, SpectrogramShapes) {
  run("synth " + path("a.f64") + " --channels 30 --samples 10000 --rate 1000 --band alpha");
  run("encode " + path("a.f64") + " " + path("w.wav"));
  auto r = run("spectrogram " + path("w.wav") + " " + path("s.f64"));
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "513 x 622")) << r.output;
  r = run("spectrogram " + path("w.wav") + " " + path("s.f64") + " --paper-shape");
  EXPECT_TRUE(contains(r.output, "513 x 621")) << r.output;
  io::Metadata meta;
  const auto m = io::read_matrix(path("s.f64"), io::MatrixFormat::kRawF64, &meta);
  EXPECT_EQ(m.cols, 621u);
  EXPECT_FALSE(meta.empty());
}

TEST_F(CliTest, SynthToneErrors) {
  EXPECT_EQ(run("synth " + path("a.csv") + " --channels 1 --samples 32 --rate 16 --tone 1:8").exit_code, 2);
  EXPECT_EQ(run("synth " + path("a.csv") + " --channels 1 --samples 32 --rate 16 --band gamma").exit_code, 2);
  EXPECT_EQ(run("synth " + path("a.csv") + " --channels 1 --samples 32 --rate 16 --tone 1:x").exit_code, 2);
}

TEST_F(CliTest, BenchSmall) {
  const auto r = run("bench --channels 3 --samples 200 --rate 100 --target-rate 900");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(contains(r.output, "identical")) << r.output;
}

}  // namespace
}  // namespace stackwave
