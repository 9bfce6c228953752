#include "stackwave/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "stackwave/errors.hpp"

namespace stackwave {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
void require_finite(std::span<const T> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    bool finite;
    if constexpr (std::is_same_v<T, Complex>) {
      finite = std::isfinite(values[i].real()) && std::isfinite(values[i].imag());
    } else {
      finite = std::isfinite(values[i]);
    }
    if (!finite) {
      throw ValidationError(std::string(what) + ": non-finite value at index " +
                            std::to_string(i));
    }
  }
}

void require_length(std::size_t n, const char* what) {
  if (n < 2) {
    throw ValidationError(std::string(what) + ": length must be >= 2, got " +
                          std::to_string(n));
  }
}

}  // namespace

struct FftPlan::Impl {
  std::size_t n = 0;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Impl(std::size_t length) : n(length) {
    std::lock_guard lock(planner_mutex());
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    const int len = static_cast<int>(n);
    forward = fftw_plan_dft_1d(len, in, out, FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
    backward = fftw_plan_dft_1d(len, in, out, FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (forward == nullptr || backward == nullptr) {
      throw std::runtime_error("FFTW failed to create a plan of length " +
                               std::to_string(n));
    }
  }

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (backward != nullptr) fftw_destroy_plan(backward);
  }

  void run(fftw_plan plan, std::span<const Complex> in,
           std::span<Complex> out) const {
    // std::complex<double> is layout-compatible with fftw_complex.
    std::vector<Complex> scratch(in.begin(), in.end());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(scratch.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
  }
};

FftPlan::FftPlan(std::size_t length) {
  require_length(length, "FFT");
  impl_ = std::make_unique<Impl>(length);
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

std::size_t FftPlan::length() const noexcept { return impl_->n; }

void FftPlan::forward(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != impl_->n || out.size() != impl_->n) {
    throw ValidationError("FFT buffer length does not match plan length");
  }
  impl_->run(impl_->forward, in, out);
}

void FftPlan::inverse(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != impl_->n || out.size() != impl_->n) {
    throw ValidationError("FFT buffer length does not match plan length");
  }
  impl_->run(impl_->backward, in, out);
  const double norm = 1.0 / static_cast<double>(impl_->n);
  for (auto& v : out) v *= norm;
}

std::vector<Complex> forward_fft(std::span<const double> samples) {
  require_length(samples.size(), "forward_fft");
  require_finite(samples, "forward_fft");
  std::vector<Complex> in(samples.begin(), samples.end());
  std::vector<Complex> out(samples.size());
  FftPlan(samples.size()).forward(in, out);
  return out;
}

std::vector<Complex> forward_fft(std::span<const Complex> samples) {
  require_length(samples.size(), "forward_fft");
  require_finite(samples, "forward_fft");
  std::vector<Complex> out(samples.size());
  FftPlan(samples.size()).forward(samples, out);
  return out;
}

std::vector<Complex> inverse_fft(std::span<const Complex> spectrum) {
  require_length(spectrum.size(), "inverse_fft");
  require_finite(spectrum, "inverse_fft");
  std::vector<Complex> out(spectrum.size());
  FftPlan(spectrum.size()).inverse(spectrum, out);
  return out;
}

std::vector<Complex> hermitian_extend(std::span<const Complex> lower) {
  const std::size_t m = lower.size();
  for (std::size_t k = m / 2 + 1; k < m; ++k) {
    if (lower[k] != Complex{}) {
      throw ValidationError("hermitian_extend: bin " + std::to_string(k) +
                            " above M/2 is nonzero");
    }
  }
  std::vector<Complex> out(lower.begin(), lower.end());
  if (m == 0) return out;
  out[0] = Complex(lower[0].real(), 0.0);
  const std::size_t half = m / 2;
  for (std::size_t k = 1; k < half || (k == half && m % 2 == 1); ++k) {
    out[m - k] = std::conj(lower[k]);
  }
  if (m % 2 == 0 && half > 0) out[half] = Complex(lower[half].real(), 0.0);
  return out;
}

ChannelSpectrum channel_spectrum(std::span<const double> samples,
                                 double sample_rate_hz) {
  return ChannelSpectrum{forward_fft(samples), sample_rate_hz};
}

}  // namespace stackwave
