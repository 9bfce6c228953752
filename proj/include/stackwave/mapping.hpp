#pragma once

// Stretch-and-stack assignment of (channel, source bin) pairs onto the
// wideband frequency grid.
//
// Source bin j of the channel placed in band slot b sits at
//   f_stretch[j] = b * f_band + (j * f_s / (N-1)) * (f_band / f_s),
// with f_band = F_s / (2p), and is moved to the destination grid point
//   F_desired[k] = k * F_s / (N'-1),  k = 0..N'-1   (numpy-style linspace)
// nearest to it. Ties go to the larger k.
//
// stack_oracle() is the exhaustive O(N * N') search; stack_fast() computes the
// same index in O(1) per bin. The two must agree bit-for-bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stackwave/model.hpp"

namespace stackwave {

/// Grid quantities shared by both stacking paths. Independent of the data
/// and of the stacking order.
struct PlanGeometry {
  std::size_t channel_count = 0;     // p
  std::size_t source_samples = 0;    // N
  std::size_t wideband_samples = 0;  // N'
  double source_rate_hz = 0.0;       // f_s
  double target_rate_hz = 0.0;       // F_s
  double band_width_hz = 0.0;        // f_band = F_s / 2p
  double grid_step_hz = 0.0;         // F_s / (N'-1)
  std::vector<double> source_grid;   // freq[j] = j f_s / (N-1)
  std::vector<double> dest_grid;     // F_desired

  double band_offset_hz(std::size_t slot) const {
    return static_cast<double>(slot) * band_width_hz;
  }
  /// f_band / f_s, the factor applied to the 0..f_s source grid.
  double stretch_ratio() const { return band_width_hz / source_rate_hz; }
};

/// Throws ValidationError for p = 0, N < 2, non-positive rates or N' < 2.
PlanGeometry make_geometry(std::size_t channel_count, std::size_t source_samples,
                           double source_rate_hz, double target_rate_hz);

/// linspace(0, stop, count) with numpy's arithmetic: k * (stop/(count-1)),
/// last point pinned to stop.
std::vector<double> linspace_from_zero(double stop, std::size_t count);

/// f_stretch values for the channel placed in band `slot`.
std::vector<double> stretched_frequencies(const PlanGeometry& geometry,
                                          std::size_t slot);

/// Largest k minimizing |grid[k] - f|, by scanning every grid point.
std::size_t nearest_index_scan(std::span<const double> grid, double frequency);

/// Same result as nearest_index_scan for a uniform ascending grid with the
/// given step, in O(1) expected time.
std::size_t nearest_index_fast(std::span<const double> grid, double step,
                               double frequency);

std::vector<std::size_t> stack_oracle(const PlanGeometry& geometry,
                                      std::size_t slot);
std::vector<std::size_t> stack_fast(const PlanGeometry& geometry,
                                    std::size_t slot);

/// How decode obtains each source bin.
enum class BinSource : std::uint8_t {
  kDirect,  // read from its destination bin
  kMirror,  // overwritten; conj of bin N-j, which is direct
  kLost,    // neither it nor its mirror survived
};

struct BandPlan {
  PlanGeometry geometry;
  Mode mode = Mode::kRealHermitian;
  std::vector<std::size_t> stacking_order;  // slot -> channel
  std::vector<std::size_t> slot_of_channel;  // channel -> slot
  // assignment[channel][j] = destination bin of source bin j.
  std::vector<std::vector<std::size_t>> assignment;
  std::vector<std::vector<BinSource>> bin_source;
  std::size_t collision_count = 0;      // destination bins written > 1 time
  std::size_t unrecoverable_count = 0;  // (channel, bin) pairs with kLost

  std::size_t channel_count() const { return geometry.channel_count; }
  double band_width_hz() const { return geometry.band_width_hz; }
  double alpha() const { return geometry.stretch_ratio(); }
  double band_offset_hz(std::size_t channel) const {
    return geometry.band_offset_hz(slot_of_channel.at(channel));
  }
  /// F_s >= p * f_s.
  bool rate_feasible() const {
    return geometry.target_rate_hz >=
           static_cast<double>(geometry.channel_count) * geometry.source_rate_hz;
  }
  bool lossless() const { return unrecoverable_count == 0; }
};

/// Builds the full plan using stack_fast. In strict-lossless mode throws
/// InfeasibleError when F_s < p * f_s.
BandPlan build_band_plan(std::size_t channel_count, std::size_t source_samples,
                         double source_rate_hz, const TransformConfig& config);

struct StackedSpectrum {
  std::vector<Complex> bins;
  double rate_hz = 0.0;
};

/// Writes every channel's bins into a zeroed wideband spectrum in stacking
/// order, ascending j, later writes overwriting earlier ones. In
/// strict-lossless mode throws InfeasibleError naming the first lost
/// (channel, bin) pair.
StackedSpectrum apply_stacking(std::span<const ChannelSpectrum> spectra,
                               const BandPlan& plan);

struct StackingBenchmark {
  double oracle_seconds = 0.0;
  double fast_seconds = 0.0;
  bool identical = false;
  double speedup() const {
    return fast_seconds > 0.0 ? oracle_seconds / fast_seconds : 0.0;
  }
};

/// Times stack_oracle and stack_fast over every band slot of the geometry
/// on the calling thread and checks the results are identical.
StackingBenchmark benchmark_stacking(const PlanGeometry& geometry);

}  // namespace stackwave
