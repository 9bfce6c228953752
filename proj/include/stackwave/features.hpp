#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "stackwave/model.hpp"
#include "stackwave/transform.hpp"

namespace stackwave {

struct SpectrogramOptions {
  std::size_t window_samples = 1024;
  std::size_t overlap_samples = 768;
  // Drop the final frame: 160000 samples give 621 frames instead of 622.
  bool paper_shape = false;
  // 20*log10(max(|X|, 1e-12)) instead of |X|.
  bool log_magnitude = false;
};

/// Frames for a signal of `length` samples; 0 when the window does not fit.
std::size_t spectrogram_frame_count(std::size_t length,
                                    const SpectrogramOptions& options);

/// Periodic Hann-windowed magnitude STFT, rows = window/2 + 1 frequency bins,
/// cols = frames. Throws ValidationError unless 0 <= overlap < window <= length.
Matrix spectrogram(std::span<const double> samples,
                   const SpectrogramOptions& options);

/// Same, for a wideband signal; complex (paper-complex) signals are rejected.
Matrix spectrogram(const WidebandSignal& signal,
                   const SpectrogramOptions& options);

enum class EegBand { kDelta, kTheta, kAlpha, kSigma, kBeta, kGamma };

struct BandRange {
  EegBand band;
  std::string_view name;
  double low_hz;   // inclusive
  double high_hz;  // exclusive
};

// Sigma and beta overlap; each band is evaluated on its own.
inline constexpr std::array<BandRange, 6> kEegBands{{
    {EegBand::kDelta, "delta", 0.5, 4.0},
    {EegBand::kTheta, "theta", 4.0, 8.0},
    {EegBand::kAlpha, "alpha", 8.0, 12.0},
    {EegBand::kSigma, "sigma", 12.0, 16.0},
    {EegBand::kBeta, "beta", 12.0, 30.0},
    {EegBand::kGamma, "gamma", 30.0, 100.0},
}};

const BandRange& band_range(EegBand band);
/// Throws ValidationError for names other than the six above.
EegBand parse_band(std::string_view name);

/// Frequency used to classify bin k of an N-point spectrum on the 0..f_s
/// grid, folded so bins k and N-k share a frequency.
double folded_bin_frequency(std::size_t k, std::size_t n, double sample_rate_hz);

struct ChannelBandEnergies {
  // Empty for bands whose low edge is at or above Nyquist.
  std::array<std::optional<double>, kEegBands.size()> energy;
  double total = 0.0;  // sum of |E[k]|^2 over all bins

  std::optional<double> operator[](EegBand band) const {
    return energy[static_cast<std::size_t>(band)];
  }
};

std::vector<ChannelBandEnergies> band_energies(const MultiChannelRecord& record);

}  // namespace stackwave
