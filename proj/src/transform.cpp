#include "stackwave/transform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stackwave/errors.hpp"
#include "stackwave/spectrum.hpp"

namespace stackwave {
namespace {

constexpr double kResidueTolerance = 1e-9;

double peak_abs(std::span<const double> values) {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::fabs(v));
  return peak;
}

void require_finite_output(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError("non-finite wideband sample at index " +
                            std::to_string(i));
    }
  }
}

// Interior lower-half bins 0 < k < M/2.
template <typename F>
void for_each_interior_bin(std::size_t m, F&& f) {
  for (std::size_t k = 1; 2 * k < m; ++k) f(k);
}

}  // namespace

WidebandSignal encode(const MultiChannelRecord& record,
                      const TransformConfig& config) {
  BandPlan plan;
  return encode(record, config, plan);
}

WidebandSignal encode(const MultiChannelRecord& record,
                      const TransformConfig& config, BandPlan& plan_out) {
  const std::size_t p = record.channel_count();
  const std::size_t n = record.sample_count();
  const double f_s = record.sample_rate_hz();
  plan_out = build_band_plan(p, n, f_s, config);
  const BandPlan& plan = plan_out;

  std::vector<ChannelSpectrum> spectra;
  spectra.reserve(p);
  for (std::size_t c = 0; c < p; ++c) {
    spectra.push_back(channel_spectrum(record.channel(c), f_s));
  }
  StackedSpectrum stacked = apply_stacking(spectra, plan);
  const std::size_t m = stacked.bins.size();

  WidebandSignal out;
  out.rate_hz = config.target_rate_hz;
  Provenance& prov = out.provenance;
  prov.channel_count = p;
  prov.source_samples = n;
  prov.source_rate_hz = f_s;
  prov.target_rate_hz = config.target_rate_hz;
  prov.mode = config.mode;
  prov.stacking_order = plan.stacking_order;
  prov.collision_count = plan.collision_count;
  prov.unrecoverable_count = plan.unrecoverable_count;
  prov.length_residual =
      record.duration_s() * config.target_rate_hz - static_cast<double>(m);
  prov.channel_names = record.channel_names();

  if (config.mode == Mode::kPaperComplex) {
    const auto time = inverse_fft(stacked.bins);
    out.samples.resize(m);
    out.imag.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      out.samples[i] = time[i].real();
      out.imag[i] = time[i].imag();
    }
    prov.scale = 1.0;
    require_finite_output(out.samples);
    require_finite_output(out.imag);
    return out;
  }

  // Real part of IFFT(S) == IFFT of the Hermitian-symmetrized spectrum,
  // whose interior bins are S[k]/2.
  std::vector<Complex> half = std::move(stacked.bins);
  for_each_interior_bin(m, [&](std::size_t k) { half[k] *= 0.5; });
  const auto time = inverse_fft(hermitian_extend(half));
  out.samples.resize(m);
  double imag_peak = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    out.samples[i] = time[i].real();
    imag_peak = std::max(imag_peak, std::fabs(time[i].imag()));
  }
  const double peak = peak_abs(out.samples);
  if (imag_peak > kResidueTolerance * peak) {
    std::ostringstream msg;
    msg << "Hermitian output has imaginary residue " << imag_peak
        << " against peak " << peak;
    throw ValidationError(msg.str());
  }
  require_finite_output(out.samples);
  prov.scale = peak > 0.0 ? kPeakLevel / peak : 1.0;
  for (double& v : out.samples) v *= prov.scale;
  return out;
}

MultiChannelRecord decode(const WidebandSignal& signal) {
  const Provenance& prov = signal.provenance;
  if (prov.format_version != kFormatVersion) {
    throw ValidationError("unsupported format version " +
                          std::to_string(prov.format_version));
  }
  if (!(prov.scale > 0.0) || !std::isfinite(prov.scale)) {
    throw ValidationError("corrupt provenance: scale must be positive");
  }
  BandPlan plan = build_band_plan(prov.channel_count, prov.source_samples,
                                  prov.source_rate_hz, prov.config());
  const std::size_t m = plan.geometry.wideband_samples;
  const std::size_t n = plan.geometry.source_samples;
  if (signal.samples.size() != m) {
    std::ostringstream msg;
    msg << "wideband signal has " << signal.samples.size()
        << " samples, provenance implies " << m;
    throw ValidationError(msg.str());
  }
  const bool complex_mode = prov.mode == Mode::kPaperComplex;
  if (complex_mode != signal.is_complex() ||
      (complex_mode && signal.imag.size() != m)) {
    throw ValidationError("sample planes do not match mode " +
                          std::string(to_string(prov.mode)));
  }
  if (plan.collision_count != prov.collision_count ||
      plan.unrecoverable_count != prov.unrecoverable_count) {
    throw ValidationError(
        "corrupt provenance: collision counts do not match the rebuilt plan");
  }
  if (prov.mode == Mode::kStrictLossless && !plan.lossless()) {
    throw ValidationError("strict-lossless provenance describes a lossy plan");
  }

  std::vector<Complex> time(m);
  for (std::size_t i = 0; i < m; ++i) {
    time[i] = Complex(signal.samples[i] / prov.scale,
                      complex_mode ? signal.imag[i] / prov.scale : 0.0);
  }
  std::vector<Complex> wide = forward_fft(time);
  if (!complex_mode) {
    for_each_interior_bin(m, [&](std::size_t k) { wide[k] *= 2.0; });
  }

  std::vector<std::vector<Complex>> spectra(prov.channel_count,
                                            std::vector<Complex>(n));
  for (std::size_t c = 0; c < prov.channel_count; ++c) {
    auto& bins = spectra[c];
    const auto& assign = plan.assignment[c];
    const auto& source = plan.bin_source[c];
    for (std::size_t j = 0; j < n; ++j) {
      if (source[j] != BinSource::kMirror) bins[j] = wide[assign[j]];
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (source[j] == BinSource::kMirror) bins[j] = std::conj(bins[(n - j) % n]);
    }
  }

  std::vector<std::vector<double>> channels(prov.channel_count,
                                            std::vector<double>(n));
  double real_peak = 0.0;
  double imag_peak = 0.0;
  for (std::size_t c = 0; c < prov.channel_count; ++c) {
    const auto x = inverse_fft(spectra[c]);
    for (std::size_t i = 0; i < n; ++i) {
      channels[c][i] = x[i].real();
      real_peak = std::max(real_peak, std::fabs(x[i].real()));
      imag_peak = std::max(imag_peak, std::fabs(x[i].imag()));
    }
  }
  const double tolerance = kResidueTolerance + 64.0 * signal.sample_epsilon;
  if (plan.lossless() && imag_peak > tolerance * real_peak) {
    std::ostringstream msg;
    msg << "decoded channels have imaginary residue " << imag_peak
        << " against peak " << real_peak
        << "; the signal does not match its provenance";
    throw ValidationError(msg.str());
  }
  return MultiChannelRecord(std::move(channels), prov.source_rate_hz,
                            prov.channel_names);
}

double relative_max_error(const MultiChannelRecord& reference,
                          const MultiChannelRecord& other) {
  if (reference.channel_count() != other.channel_count() ||
      reference.sample_count() != other.sample_count()) {
    throw ValidationError("records differ in shape");
  }
  double max_err = 0.0;
  double peak = 0.0;
  for (std::size_t c = 0; c < reference.channel_count(); ++c) {
    const auto a = reference.channel(c);
    const auto b = other.channel(c);
    for (std::size_t i = 0; i < a.size(); ++i) {
      max_err = std::max(max_err, std::fabs(a[i] - b[i]));
      peak = std::max(peak, std::fabs(a[i]));
    }
  }
  if (peak == 0.0) return max_err;
  return max_err / peak;
}

RoundtripReport roundtrip_report(const MultiChannelRecord& record,
                                 const TransformConfig& config) {
  BandPlan plan;
  const WidebandSignal signal = encode(record, config, plan);
  const MultiChannelRecord decoded = decode(signal);

  RoundtripReport report;
  report.mode = config.mode;
  report.collision_count = plan.collision_count;
  report.unrecoverable_count = plan.unrecoverable_count;
  report.rate_feasible = plan.rate_feasible();
  report.relative_error = relative_max_error(record, decoded);
  for (std::size_t c = 0; c < record.channel_count(); ++c) {
    const auto a = record.channel(c);
    const auto b = decoded.channel(c);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      sum_sq += d * d;
      report.max_abs_error = std::max(report.max_abs_error, std::fabs(d));
    }
    report.per_channel_rmse.push_back(
        std::sqrt(sum_sq / static_cast<double>(a.size())));
  }
  return report;
}

}  // namespace stackwave
