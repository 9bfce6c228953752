#include "stackwave/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "stackwave/errors.hpp"

namespace stackwave {
namespace {

TEST(ValidateRecord, PaperSizedRecordIsValid) {
  std::vector<std::vector<double>> ch(30, std::vector<double>(10000, 0.25));
  EXPECT_NO_THROW(validate_record(ch, 1000.0));
  MultiChannelRecord r(std::move(ch), 1000.0);
  EXPECT_EQ(r.channel_count(), 30u);
  EXPECT_EQ(r.sample_count(), 10000u);
  EXPECT_DOUBLE_EQ(r.duration_s(), 10.0);
}

TEST(ValidateRecord, RaggedChannelsAreRejected) {
  std::vector<std::vector<double>> ch{std::vector<double>(8), std::vector<double>(9)};
  try {
    validate_record(ch, 10.0);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("ragged"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("channel 2"), std::string::npos);
  }
}

TEST(ValidateRecord, DegenerateZeroRecordIsLegal) {
  EXPECT_NO_THROW(MultiChannelRecord({std::vector<double>(4, 0.0)}, 4.0));
}

TEST(ValidateRecord, ErrorPaths) {
  EXPECT_THROW(validate_record({}, 10.0), ValidationError);
  EXPECT_THROW(validate_record({{}}, 10.0), ValidationError);
  EXPECT_THROW(validate_record({{1.0}}, 10.0), ValidationError);
  EXPECT_THROW(validate_record({{1.0, 2.0}}, 0.0), ValidationError);
  EXPECT_THROW(validate_record({{1.0, 2.0}}, -3.0), ValidationError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    validate_record({{1.0, 2.0, 3.0}, {1.0, nan, 3.0}}, 10.0);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("channel 2 at index 1"), std::string::npos);
  }
  EXPECT_THROW(MultiChannelRecord({{1.0, 2.0}}, 1.0, {"a", "b"}), ValidationError);
}

TEST(MultiChannelRecord, DurationRoundTripsSampleCount) {
  for (std::size_t n : {2u, 3u, 7u, 250u, 999u, 10000u}) {
    for (double rate : {1.0, 3.0, 32.0, 250.0, 1000.0, 44100.0, 7.3}) {
      MultiChannelRecord r({std::vector<double>(n, 0.0)}, rate);
      EXPECT_EQ(std::llround(r.duration_s() * r.sample_rate_hz()),
                static_cast<long long>(n));
    }
  }
}

TEST(TransformConfig, ResolvesOrder) {
  TransformConfig cfg;
  EXPECT_EQ(cfg.resolved_order(3), (std::vector<std::size_t>{0, 1, 2}));
  cfg.stacking_order = {2, 0, 1};
  EXPECT_EQ(cfg.resolved_order(3), (std::vector<std::size_t>{2, 0, 1}));
  cfg.stacking_order = {0, 0, 1};
  EXPECT_THROW(cfg.resolved_order(3), ValidationError);
  cfg.stacking_order = {0, 1};
  EXPECT_THROW(cfg.resolved_order(3), ValidationError);
  cfg.stacking_order = {};
  cfg.target_rate_hz = 0.0;
  EXPECT_THROW(cfg.resolved_order(3), ValidationError);
}

TEST(Mode, ParsesAndPrints) {
  for (Mode m : {Mode::kPaperComplex, Mode::kRealHermitian, Mode::kStrictLossless}) {
    EXPECT_EQ(parse_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_mode("lossy"), ValidationError);
}

TEST(WidebandLength, RoundsDurationTimesRate) {
  EXPECT_EQ(wideband_length(10000, 1000.0, 16000.0), 160000u);
  EXPECT_EQ(wideband_length(64, 32.0, 256.0), 512u);
  EXPECT_EQ(wideband_length(5, 10.0, 100.0), 50u);
  EXPECT_EQ(wideband_length(10, 3.0, 10.0), 33u);  // 33.33 rounds down
}

TEST(ChannelSpectrum, BinFrequencySpansZeroToRate) {
  ChannelSpectrum s{std::vector<Complex>(4), 4.0};
  EXPECT_DOUBLE_EQ(s.bin_frequency(0), 0.0);
  EXPECT_DOUBLE_EQ(s.bin_frequency(3), 4.0);
  EXPECT_DOUBLE_EQ(s.bin_frequency(1), 4.0 / 3.0);
}

}  // namespace
}  // namespace stackwave
