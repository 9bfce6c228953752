#pragma once

// Domain types shared by every stage of the multi-channel <-> wideband
// transform. Channel indices are 0-based in this API; files and the CLI use
// 1-based channel numbers where they expose channel identity.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stackwave {

using Complex = std::complex<double>;

/// p synchronized real channels of N samples each at rate f_s.
///
/// Construction validates every invariant (equal lengths, N >= 2, p >= 1,
/// f_s > 0, finite samples), so an existing record is always well formed.
class MultiChannelRecord {
 public:
  MultiChannelRecord(std::vector<std::vector<double>> channels,
                     double sample_rate_hz,
                     std::vector<std::string> channel_names = {});

  std::size_t channel_count() const noexcept { return channels_.size(); }
  std::size_t sample_count() const noexcept { return channels_.front().size(); }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  double duration_s() const noexcept {
    return static_cast<double>(sample_count()) / sample_rate_hz_;
  }

  std::span<const double> channel(std::size_t index) const;
  const std::vector<std::vector<double>>& channels() const noexcept {
    return channels_;
  }
  // Opaque labels carried through from input files; may be empty.
  const std::vector<std::string>& channel_names() const noexcept {
    return channel_names_;
  }

 private:
  std::vector<std::vector<double>> channels_;
  double sample_rate_hz_;
  std::vector<std::string> channel_names_;
};

/// Throws ValidationError naming the offending channel/sample when the data
/// could not form a MultiChannelRecord.
void validate_record(const std::vector<std::vector<double>>& channels,
                     double sample_rate_hz);

/// Complex spectrum of one channel on the 0..f_s grid used for stretching.
struct ChannelSpectrum {
  std::vector<Complex> bins;
  double source_rate_hz = 0.0;

  // k * f_s / (N - 1): the grid spans 0..f_s inclusive.
  double bin_frequency(std::size_t k) const {
    return static_cast<double>(k) * (source_rate_hz /
                                     static_cast<double>(bins.size() - 1));
  }
};

enum class Mode {
  kPaperComplex,    // verbatim stacking, complex waveform kept as two planes
  kRealHermitian,   // Hermitian-symmetrized spectrum, real playable waveform
  kStrictLossless,  // real waveform; refuses configs that cannot round-trip
};

std::string_view to_string(Mode mode);
/// Accepts "paper-complex", "real-hermitian", "strict-lossless".
Mode parse_mode(std::string_view text);

inline bool produces_real_output(Mode mode) {
  return mode != Mode::kPaperComplex;
}

struct TransformConfig {
  double target_rate_hz = 16000.0;
  Mode mode = Mode::kRealHermitian;
  // stacking_order[slot] = channel placed in band `slot` (0-based). Empty
  // means identity: channel i+1 stacked on top of channel i.
  std::vector<std::size_t> stacking_order;

  /// Throws ValidationError if F_s <= 0 or the order is not a permutation of
  /// 0..channel_count-1. Returns the effective (possibly identity) order.
  std::vector<std::size_t> resolved_order(std::size_t channel_count) const;
};

/// N' = round(T * F_s) with T = N / f_s.
std::size_t wideband_length(std::size_t source_samples, double source_rate_hz,
                            double target_rate_hz);

/// Dense row-major real matrix used for exported features.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

}  // namespace stackwave
