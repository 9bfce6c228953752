#pragma once

// Deterministic multi-channel test signals.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stackwave/features.hpp"
#include "stackwave/model.hpp"

namespace stackwave {

/// Counter-based SplitMix64: word(i) depends only on (key, i), so any channel
/// or sample can be generated independently and reproducibly.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z);

  std::uint64_t word(std::uint64_t counter) const;
  // Uniform in (0, 1].
  double uniform(std::uint64_t counter) const;
  // Standard normal via Box-Muller on words 2i and 2i+1.
  double gaussian(std::uint64_t index) const;

  CounterRng split(std::uint64_t stream) const;

 private:
  std::uint64_t key_;
};

struct Tone {
  double frequency_hz = 0.0;
  double amplitude = 1.0;
  double phase_rad = 0.0;
};

/// Channel c = sum over tone_table[c] of a*cos(2 pi f n / f_s + phase).
/// Channels beyond the table are silent. Throws ValidationError for a tone at
/// or above Nyquist or a table longer than p.
MultiChannelRecord make_tones(std::size_t channel_count, std::size_t samples,
                              double sample_rate_hz,
                              const std::vector<std::vector<Tone>>& tone_table);

struct BandNoise {
  MultiChannelRecord record;
  // The band's upper edge was above Nyquist and got clipped.
  bool truncated = false;
};

/// Gaussian white noise masked in the frequency domain to one EEG band.
/// Throws ValidationError when the band's low edge is at or above Nyquist.
BandNoise make_bandnoise(std::size_t channel_count, std::size_t samples,
                         double sample_rate_hz, EegBand band, std::uint64_t seed);

}  // namespace stackwave
