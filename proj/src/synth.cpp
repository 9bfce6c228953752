#include "stackwave/synth.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "stackwave/errors.hpp"
#include "stackwave/spectrum.hpp"

namespace stackwave {
namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t CounterRng::word(std::uint64_t counter) const {
  return mix(key_ + (counter + 1) * kGolden);
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>((word(counter) >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::gaussian(std::uint64_t index) const {
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

CounterRng CounterRng::split(std::uint64_t stream) const {
  return CounterRng(mix(key_ ^ mix(stream + kGolden)));
}

MultiChannelRecord make_tones(std::size_t channel_count, std::size_t samples,
                              double sample_rate_hz,
                              const std::vector<std::vector<Tone>>& tone_table) {
  if (tone_table.size() > channel_count) {
    throw ValidationError("tone table has more rows than channels");
  }
  std::vector<std::vector<double>> channels(channel_count,
                                            std::vector<double>(samples, 0.0));
  for (std::size_t c = 0; c < tone_table.size(); ++c) {
    for (const Tone& tone : tone_table[c]) {
      if (!(tone.frequency_hz < sample_rate_hz / 2.0) || tone.frequency_hz < 0.0) {
        std::ostringstream msg;
        msg << "tone " << tone.frequency_hz << " Hz in channel " << c + 1
            << " is not below Nyquist (" << sample_rate_hz / 2.0 << " Hz)";
        throw ValidationError(msg.str());
      }
      const double w = 2.0 * std::numbers::pi * tone.frequency_hz / sample_rate_hz;
      for (std::size_t i = 0; i < samples; ++i) {
        channels[c][i] +=
            tone.amplitude * std::cos(w * static_cast<double>(i) + tone.phase_rad);
      }
    }
  }
  return MultiChannelRecord(std::move(channels), sample_rate_hz);
}

BandNoise make_bandnoise(std::size_t channel_count, std::size_t samples,
                         double sample_rate_hz, EegBand band, std::uint64_t seed) {
  const BandRange& range = band_range(band);
  const double nyquist = sample_rate_hz / 2.0;
  if (range.low_hz >= nyquist) {
    std::ostringstream msg;
    msg << range.name << " band starts at " << range.low_hz
        << " Hz, at or above Nyquist (" << nyquist << " Hz)";
    throw ValidationError(msg.str());
  }
  if (samples < 2) throw ValidationError("need at least 2 samples per channel");

  const CounterRng root(seed);
  std::vector<std::vector<double>> channels(channel_count,
                                            std::vector<double>(samples));
  for (std::size_t c = 0; c < channel_count; ++c) {
    const CounterRng rng = root.split(c);
    std::vector<double> white(samples);
    for (std::size_t i = 0; i < samples; ++i) white[i] = rng.gaussian(i);

    // Masking by folded frequency keeps the spectrum Hermitian.
    auto spectrum = forward_fft(white);
    for (std::size_t k = 0; k < samples; ++k) {
      const double f = folded_bin_frequency(k, samples, sample_rate_hz);
      if (f < range.low_hz || f >= range.high_hz) spectrum[k] = Complex{};
    }
    const auto shaped = inverse_fft(spectrum);
    for (std::size_t i = 0; i < samples; ++i) channels[c][i] = shaped[i].real();
  }
  return BandNoise{MultiChannelRecord(std::move(channels), sample_rate_hz),
                   range.high_hz > nyquist};
}

}  // namespace stackwave
