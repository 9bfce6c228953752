#include "stackwave/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "stackwave/errors.hpp"
#include "stackwave/spectrum.hpp"

namespace stackwave {

std::size_t spectrogram_frame_count(std::size_t length,
                                    const SpectrogramOptions& options) {
  const std::size_t window = options.window_samples;
  if (window == 0 || options.overlap_samples >= window || window > length) {
    return 0;
  }
  const std::size_t hop = window - options.overlap_samples;
  std::size_t frames = 1 + (length - window) / hop;
  if (options.paper_shape && frames > 1) --frames;
  return frames;
}

Matrix spectrogram(std::span<const double> samples,
                   const SpectrogramOptions& options) {
  const std::size_t window = options.window_samples;
  if (window < 2) throw ValidationError("window must be at least 2 samples");
  if (options.overlap_samples >= window) {
    throw ValidationError("overlap must be smaller than the window");
  }
  if (window > samples.size()) {
    std::ostringstream msg;
    msg << "window of " << window << " samples exceeds signal length "
        << samples.size();
    throw ValidationError(msg.str());
  }
  const std::size_t hop = window - options.overlap_samples;
  const std::size_t frames = spectrogram_frame_count(samples.size(), options);
  const std::size_t rows = window / 2 + 1;

  std::vector<double> hann(window);
  for (std::size_t i = 0; i < window; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                   static_cast<double>(window));
  }

  const FftPlan plan(window);
  std::vector<Complex> frame(window);
  std::vector<Complex> bins(window);
  Matrix out(rows, frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * hop;
    for (std::size_t i = 0; i < window; ++i) {
      frame[i] = Complex(samples[start + i] * hann[i], 0.0);
    }
    plan.forward(frame, bins);
    for (std::size_t r = 0; r < rows; ++r) {
      const double mag = std::abs(bins[r]);
      out.at(r, f) =
          options.log_magnitude ? 20.0 * std::log10(std::max(mag, 1e-12)) : mag;
    }
  }
  return out;
}

Matrix spectrogram(const WidebandSignal& signal,
                   const SpectrogramOptions& options) {
  if (signal.is_complex()) {
    throw ValidationError(
        "spectrogram needs a real signal; paper-complex output has two planes");
  }
  return spectrogram(std::span<const double>(signal.samples), options);
}

const BandRange& band_range(EegBand band) {
  return kEegBands[static_cast<std::size_t>(band)];
}

EegBand parse_band(std::string_view name) {
  for (const auto& b : kEegBands) {
    if (b.name == name) return b.band;
  }
  throw ValidationError("unknown EEG band '" + std::string(name) +
                        "' (delta, theta, alpha, sigma, beta, gamma)");
}

double folded_bin_frequency(std::size_t k, std::size_t n, double sample_rate_hz) {
  const std::size_t folded = std::min(k, n - k);
  return static_cast<double>(folded) *
         (sample_rate_hz / static_cast<double>(n - 1));
}

std::vector<ChannelBandEnergies> band_energies(const MultiChannelRecord& record) {
  const std::size_t n = record.sample_count();
  const double f_s = record.sample_rate_hz();
  const double nyquist = f_s / 2.0;
  std::vector<ChannelBandEnergies> out;
  out.reserve(record.channel_count());
  for (std::size_t c = 0; c < record.channel_count(); ++c) {
    const auto spectrum = forward_fft(record.channel(c));
    ChannelBandEnergies e;
    for (std::size_t b = 0; b < kEegBands.size(); ++b) {
      if (kEegBands[b].low_hz < nyquist) e.energy[b] = 0.0;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double power = std::norm(spectrum[k]);
      e.total += power;
      const double freq = folded_bin_frequency(k, n, f_s);
      for (std::size_t b = 0; b < kEegBands.size(); ++b) {
        if (e.energy[b] && freq >= kEegBands[b].low_hz &&
            freq < kEegBands[b].high_hz) {
          *e.energy[b] += power;
        }
      }
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace stackwave
