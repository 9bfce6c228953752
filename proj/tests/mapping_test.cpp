#include "stackwave/mapping.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stackwave/errors.hpp"
#include "support/oracles.hpp"

namespace stackwave {
namespace {

using testing::last_nearest;

TransformConfig config_for(double target, Mode mode = Mode::kRealHermitian) {
  TransformConfig c;
  c.target_rate_hz = target;
  c.mode = mode;
  return c;
}

TEST(Geometry, PaperParameters) {
  const PlanGeometry g = make_geometry(30, 10000, 1000.0, 16000.0);
  EXPECT_DOUBLE_EQ(g.band_width_hz, 16000.0 / 60.0);
  EXPECT_NEAR(g.band_width_hz, 266.6666666, 1e-6);
  EXPECT_EQ(g.band_offset_hz(0), 0.0);
  EXPECT_NEAR(g.band_offset_hz(29), 7733.333333, 1e-6);
  EXPECT_EQ(g.wideband_samples, 160000u);
  EXPECT_DOUBLE_EQ(g.dest_grid.back(), 16000.0);
  EXPECT_DOUBLE_EQ(g.band_offset_hz(29) + g.band_width_hz, 8000.0);
}

TEST(Geometry, SingleChannelUnitStretch) {
  const PlanGeometry g = make_geometry(1, 4, 4.0, 8.0);
  EXPECT_DOUBLE_EQ(g.band_width_hz, 4.0);
  EXPECT_DOUBLE_EQ(g.stretch_ratio(), 1.0);
  ASSERT_EQ(g.dest_grid.size(), 8u);
  for (std::size_t k = 0; k < 8; ++k) {
    EXPECT_NEAR(g.dest_grid[k], 8.0 * static_cast<double>(k) / 7.0, 1e-15);
  }
  const auto stretched = stretched_frequencies(g, 0);
  EXPECT_NEAR(stretched[1], 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(stretched[2], 8.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(stretched[3], 4.0);
  // Frozen from a numpy re-implementation of the exhaustive search.
  EXPECT_EQ(stack_oracle(g, 0), (std::vector<std::size_t>{0, 1, 2, 4}));
  EXPECT_EQ(stack_fast(g, 0), (std::vector<std::size_t>{0, 1, 2, 4}));
}

TEST(Geometry, RejectsDegenerateInputs) {
  EXPECT_THROW(make_geometry(0, 10, 1.0, 10.0), ValidationError);
  EXPECT_THROW(make_geometry(1, 1, 1.0, 10.0), ValidationError);
  EXPECT_THROW(make_geometry(1, 10, 0.0, 10.0), ValidationError);
  EXPECT_THROW(make_geometry(1, 10, 1.0, -1.0), ValidationError);
  EXPECT_THROW(make_geometry(1, 2, 100.0, 10.0), ValidationError);  // N' = 0
}

TEST(Linspace, MatchesNumpyArithmetic) {
  const auto g = linspace_from_zero(100.0, 50);
  const double step = 100.0 / 49.0;
  for (std::size_t k = 0; k + 1 < 50; ++k) {
    EXPECT_EQ(g[k], static_cast<double>(k) * step);
  }
  EXPECT_EQ(g.back(), 100.0);
}

TEST(StackOracle, ExactHitAndMidpointTie) {
  const std::vector<double> grid{0.0, 1.0, 2.0, 3.0};
  EXPECT_EQ(nearest_index_scan(grid, 2.0), 2u);
  EXPECT_EQ(nearest_index_scan(grid, 0.5), 1u);
  EXPECT_EQ(nearest_index_scan(grid, 1.5), 2u);
  EXPECT_EQ(nearest_index_scan(grid, -4.0), 0u);
  EXPECT_EQ(nearest_index_scan(grid, 9.0), 3u);
  for (double f : {2.0, 0.5, 1.5, -4.0, 9.0, 2.4999}) {
    EXPECT_EQ(nearest_index_fast(grid, 1.0, f), nearest_index_scan(grid, f)) << f;
  }
}

TEST(StackOracle, TwoChannelFrozenAssignment) {
  // p=2, f_s=10, N=5, F_s=100, T=0.5 s; frozen from the numpy oracle.
  const PlanGeometry g = make_geometry(2, 5, 10.0, 100.0);
  EXPECT_EQ(g.wideband_samples, 50u);
  EXPECT_EQ(stack_oracle(g, 0), (std::vector<std::size_t>{0, 3, 6, 9, 12}));
  EXPECT_EQ(stack_oracle(g, 1), (std::vector<std::size_t>{12, 15, 18, 21, 24}));
  const BandPlan plan = build_band_plan(2, 5, 10.0, config_for(100.0));
  EXPECT_EQ(plan.assignment[0], stack_oracle(g, 0));
  EXPECT_EQ(plan.assignment[1], stack_oracle(g, 1));
  // The band edge shared by both channels is the only collision.
  EXPECT_EQ(plan.collision_count, 1u);
}

TEST(StackOracle, MatchesIndependentSearch) {
  const PlanGeometry g = make_geometry(3, 7, 7.0, 23.0);
  ASSERT_EQ(g.wideband_samples, 23u);
  for (std::size_t slot = 0; slot < 3; ++slot) {
    const auto stretched = stretched_frequencies(g, slot);
    const auto got = stack_oracle(g, slot);
    for (std::size_t j = 0; j < stretched.size(); ++j) {
      EXPECT_EQ(got[j], last_nearest(g.dest_grid, stretched[j]));
    }
  }
}

TEST(StackFast, EquivalentOnSmallGrids) {
  for (std::size_t p = 1; p <= 3; ++p) {
    for (std::size_t n = 2; n <= 12; ++n) {
      for (std::size_t m = 2; m <= 30; ++m) {
        const PlanGeometry g = make_geometry(p, n, static_cast<double>(n),
                                             static_cast<double>(m));
        ASSERT_EQ(g.wideband_samples, m);
        for (std::size_t slot = 0; slot < p; ++slot) {
          ASSERT_EQ(stack_fast(g, slot), stack_oracle(g, slot))
              << "p=" << p << " N=" << n << " N'=" << m << " slot=" << slot;
        }
      }
    }
  }
}

TEST(StackFast, UlpNeighbourhoodOfMidpoints) {
  const auto grid = linspace_from_zero(16000.0, 1601);
  const double step = 16000.0 / 1600.0;
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, 1599);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = pick(rng);
    double f = 0.5 * (grid[k] + grid[k + 1]);
    for (int s = 0; s < 3; ++s) f = std::nextafter(f, -1.0);
    for (int s = 0; s < 7; ++s) {
      ASSERT_EQ(nearest_index_fast(grid, step, f), nearest_index_scan(grid, f)) << f;
      f = std::nextafter(f, 1e9);
    }
  }
}

TEST(BandPlan, MonotoneAndBandContained) {
  for (auto [p, n, fs, target] :
       {std::tuple{4, 64, 32.0, 256.0}, std::tuple{6, 250, 250.0, 16000.0},
        std::tuple{3, 17, 5.0, 40.0}, std::tuple{30, 1000, 1000.0, 16000.0}}) {
    const BandPlan plan = build_band_plan(p, n, fs, config_for(target));
    const double step = plan.geometry.grid_step_hz;
    for (std::size_t c = 0; c < static_cast<std::size_t>(p); ++c) {
      const auto& a = plan.assignment[c];
      const double lo = plan.band_offset_hz(c);
      const double hi = lo + plan.band_width_hz();
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (j > 0) ASSERT_GE(a[j], a[j - 1]);
        const double f = plan.geometry.dest_grid[a[j]];
        ASSERT_GE(f, lo - step);
        ASSERT_LE(f, hi + step);
        ASSERT_LE(f, target / 2.0 + step);
      }
    }
  }
}

TEST(BandPlan, PaperConfigurationCollides) {
  const BandPlan plan = build_band_plan(30, 10000, 1000.0, config_for(16000.0));
  EXPECT_FALSE(plan.rate_feasible());
  EXPECT_GT(plan.collision_count, 0u);
  EXPECT_GT(plan.unrecoverable_count, 0u);
  EXPECT_NEAR(plan.alpha(), 16000.0 / 60.0 / 1000.0, 1e-15);
}

TEST(BandPlan, StrictModeRefusesLowTargetRate) {
  try {
    build_band_plan(30, 10000, 1000.0, config_for(16000.0, Mode::kStrictLossless));
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("p*f_s = 30000"), std::string::npos);
  }
}

TEST(BandPlan, DoubleRateIsRecoverable) {
  // Adjacent bands share an edge bin, so collisions remain, but every
  // overwritten bin has a surviving conjugate mirror.
  const BandPlan plan = build_band_plan(4, 64, 32.0, config_for(256.0));
  EXPECT_TRUE(plan.rate_feasible());
  EXPECT_EQ(plan.collision_count, 3u);
  EXPECT_EQ(plan.unrecoverable_count, 0u);
  EXPECT_TRUE(plan.lossless());
}

TEST(BandPlan, StackingOrderMovesBands) {
  TransformConfig cfg = config_for(256.0);
  cfg.stacking_order = {3, 2, 1, 0};
  const BandPlan plan = build_band_plan(4, 64, 32.0, cfg);
  const BandPlan identity = build_band_plan(4, 64, 32.0, config_for(256.0));
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_EQ(plan.slot_of_channel[c], 3 - c);
    EXPECT_EQ(plan.assignment[c], identity.assignment[3 - c]);
    EXPECT_DOUBLE_EQ(plan.band_offset_hz(c), identity.band_offset_hz(3 - c));
  }
}

TEST(BandPlan, Deterministic) {
  const auto a = build_band_plan(8, 250, 250.0, config_for(4000.0));
  const auto b = build_band_plan(8, 250, 250.0, config_for(4000.0));
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.bin_source, b.bin_source);
  EXPECT_EQ(a.collision_count, b.collision_count);
}

TEST(ApplyStacking, SingleEntryTransfer) {
  const BandPlan plan = build_band_plan(1, 16, 16.0, config_for(64.0));
  ChannelSpectrum s{std::vector<Complex>(16), 16.0};
  s.bins[0] = 7.0;
  const auto stacked = apply_stacking(std::span(&s, 1), plan);
  std::size_t nonzero = 0;
  for (std::size_t k = 0; k < stacked.bins.size(); ++k) {
    if (stacked.bins[k] != Complex{}) {
      ++nonzero;
      EXPECT_EQ(k, plan.assignment[0][0]);
      EXPECT_EQ(stacked.bins[k], Complex(7.0));
    }
  }
  EXPECT_EQ(nonzero, 1u);
}

TEST(ApplyStacking, DisjointBandsHoldTheirChannel) {
  const BandPlan plan = build_band_plan(2, 8, 8.0, config_for(64.0));
  std::vector<ChannelSpectrum> spectra(2, ChannelSpectrum{std::vector<Complex>(8), 8.0});
  for (std::size_t j = 0; j < 8; ++j) {
    spectra[0].bins[j] = Complex(1.0 + static_cast<double>(j), 0.5);
    spectra[1].bins[j] = Complex(-2.0, 10.0 + static_cast<double>(j));
  }
  const auto stacked = apply_stacking(spectra, plan);
  // Mask S with each band's destination range and compare.
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j < 8; ++j) {
      const std::size_t k = plan.assignment[c][j];
      const bool overwritten = c == 0 && j == 7;  // shared edge with band 2
      if (!overwritten) EXPECT_EQ(stacked.bins[k], spectra[c].bins[j]);
    }
  }
  std::vector<bool> covered(stacked.bins.size(), false);
  for (const auto& a : plan.assignment) for (auto k : a) covered[k] = true;
  for (std::size_t k = 0; k < stacked.bins.size(); ++k) {
    if (!covered[k]) EXPECT_EQ(stacked.bins[k], Complex{});
  }
}

TEST(ApplyStacking, StrictModeNamesFirstLostBin) {
  const BandPlan plan = build_band_plan(2, 16, 16.0, config_for(40.0, Mode::kStrictLossless));
  ASSERT_GT(plan.unrecoverable_count, 0u);
  std::vector<ChannelSpectrum> spectra(2, ChannelSpectrum{std::vector<Complex>(16), 16.0});
  try {
    apply_stacking(spectra, plan);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("channel 1 bin"), std::string::npos);
  }
}

TEST(ApplyStacking, ShapeMismatch) {
  const BandPlan plan = build_band_plan(2, 8, 8.0, config_for(64.0));
  std::vector<ChannelSpectrum> one(1, ChannelSpectrum{std::vector<Complex>(8), 8.0});
  EXPECT_THROW(apply_stacking(one, plan), ValidationError);
  std::vector<ChannelSpectrum> short_bins(2, ChannelSpectrum{std::vector<Complex>(7), 8.0});
  EXPECT_THROW(apply_stacking(short_bins, plan), ValidationError);
}

TEST(Benchmark, ReportsIdenticalAssignments) {
  const auto b = benchmark_stacking(make_geometry(4, 200, 100.0, 1600.0));
  EXPECT_TRUE(b.identical);
  EXPECT_GT(b.oracle_seconds, 0.0);
}

}  // namespace
}  // namespace stackwave
