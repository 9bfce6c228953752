#pragma once

// Discrete Fourier transforms with a fixed normalization: the forward sum is
// unnormalized, the inverse carries 1/M. Any length >= 2 is transformed
// exactly; nothing is zero-padded.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "stackwave/model.hpp"

namespace stackwave {

/// Reusable transform of one length. Execution is thread-safe; each call
/// works on its own scratch copy.
class FftPlan {
 public:
  explicit FftPlan(std::size_t length);
  ~FftPlan();
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;

  std::size_t length() const noexcept;

  // out[k] = sum_n in[n] exp(-j 2 pi k n / M)
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  // out[n] = (1/M) sum_k in[k] exp(+j 2 pi k n / M)
  void inverse(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Forward DFT of a real channel. Throws ValidationError on non-finite input
/// or length < 2.
std::vector<Complex> forward_fft(std::span<const double> samples);
std::vector<Complex> forward_fft(std::span<const Complex> samples);

/// 1/M-normalized inverse DFT.
std::vector<Complex> inverse_fft(std::span<const Complex> spectrum);

/// Mirrors a lower-half spectrum (bins above M/2 must be zero) into a
/// Hermitian one: out[M-k] = conj(in[k]) for 0 < k < M/2, with DC and (even M)
/// Nyquist forced real.
std::vector<Complex> hermitian_extend(std::span<const Complex> lower);

ChannelSpectrum channel_spectrum(std::span<const double> samples,
                                 double sample_rate_hz);

}  // namespace stackwave
