#pragma once

// End-to-end encode (per-channel FFT -> stretch/stack -> IFFT) and decode.

#include <cstddef>
#include <string>
#include <vector>

#include "stackwave/mapping.hpp"
#include "stackwave/model.hpp"

namespace stackwave {

inline constexpr int kFormatVersion = 1;

/// Everything decode needs besides the samples.
struct Provenance {
  int format_version = kFormatVersion;
  std::size_t channel_count = 0;   // p
  std::size_t source_samples = 0;  // N
  double source_rate_hz = 0.0;     // f_s
  double target_rate_hz = 0.0;     // F_s
  Mode mode = Mode::kRealHermitian;
  std::vector<std::size_t> stacking_order;  // slot -> channel, 0-based
  double scale = 1.0;  // samples = raw IFFT output * scale
  std::size_t collision_count = 0;
  std::size_t unrecoverable_count = 0;
  // T * F_s - N', nonzero when the wideband length had to be rounded.
  double length_residual = 0.0;
  std::vector<std::string> channel_names;

  TransformConfig config() const {
    return TransformConfig{target_rate_hz, mode, stacking_order};
  }
};

struct WidebandSignal {
  std::vector<double> samples;  // real plane
  std::vector<double> imag;     // empty unless paper-complex
  double rate_hz = 0.0;
  Provenance provenance;
  // Relative rounding of the stored samples (2^-24 after a float WAV);
  // widens the residue check in decode.
  double sample_epsilon = 0.0;

  bool is_complex() const { return !imag.empty(); }
  std::size_t size() const { return samples.size(); }
};

/// Target peak |sample| for real-output modes.
inline constexpr double kPeakLevel = 0.9;

WidebandSignal encode(const MultiChannelRecord& record,
                      const TransformConfig& config);

/// Same as encode, also handing back the plan it used.
WidebandSignal encode(const MultiChannelRecord& record,
                      const TransformConfig& config, BandPlan& plan_out);

MultiChannelRecord decode(const WidebandSignal& signal);

struct RoundtripReport {
  double max_abs_error = 0.0;
  double relative_error = 0.0;  // max_abs_error / max |x|, 0 for silent input
  std::vector<double> per_channel_rmse;
  std::size_t collision_count = 0;
  std::size_t unrecoverable_count = 0;
  bool rate_feasible = false;
  Mode mode = Mode::kRealHermitian;
};

/// encode + decode + comparison. Measures lossy configurations instead of
/// rejecting them; only encode/decode failures propagate.
RoundtripReport roundtrip_report(const MultiChannelRecord& record,
                                 const TransformConfig& config);

/// Max |a - b| over all channels divided by max |a|; 0 when a is silent and
/// equal to b.
double relative_max_error(const MultiChannelRecord& reference,
                          const MultiChannelRecord& other);

}  // namespace stackwave
