#include "stackwave/mapping.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "stackwave/errors.hpp"

namespace stackwave {

std::vector<double> linspace_from_zero(double stop, std::size_t count) {
  std::vector<double> grid(count, 0.0);
  if (count < 2) return grid;
  const double step = stop / static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) grid[k] = static_cast<double>(k) * step;
  grid.back() = stop;
  return grid;
}

PlanGeometry make_geometry(std::size_t channel_count, std::size_t source_samples,
                           double source_rate_hz, double target_rate_hz) {
  if (channel_count == 0) throw ValidationError("channel count must be >= 1");
  if (source_samples < 2) {
    throw ValidationError("need at least 2 samples per channel");
  }
  if (!(source_rate_hz > 0.0) || !std::isfinite(source_rate_hz)) {
    throw ValidationError("source rate must be positive and finite");
  }
  if (!(target_rate_hz > 0.0) || !std::isfinite(target_rate_hz)) {
    throw ValidationError("target rate must be positive and finite");
  }
  PlanGeometry g;
  g.channel_count = channel_count;
  g.source_samples = source_samples;
  g.source_rate_hz = source_rate_hz;
  g.target_rate_hz = target_rate_hz;
  g.wideband_samples =
      wideband_length(source_samples, source_rate_hz, target_rate_hz);
  if (g.wideband_samples < 2) {
    std::ostringstream msg;
    msg << "wideband length N' = " << g.wideband_samples
        << " is below 2; raise the target rate";
    throw ValidationError(msg.str());
  }
  g.band_width_hz = target_rate_hz / (2.0 * static_cast<double>(channel_count));
  g.grid_step_hz = target_rate_hz / static_cast<double>(g.wideband_samples - 1);

  g.source_grid.resize(source_samples);
  const double source_step =
      source_rate_hz / static_cast<double>(source_samples - 1);
  for (std::size_t j = 0; j < source_samples; ++j) {
    g.source_grid[j] = static_cast<double>(j) * source_step;
  }
  g.dest_grid = linspace_from_zero(target_rate_hz, g.wideband_samples);
  return g;
}

std::vector<double> stretched_frequencies(const PlanGeometry& geometry,
                                          std::size_t slot) {
  if (slot >= geometry.channel_count) {
    throw ValidationError("band slot " + std::to_string(slot) + " out of range");
  }
  const double offset = geometry.band_offset_hz(slot);
  const double ratio = geometry.band_width_hz / geometry.source_rate_hz;
  std::vector<double> out(geometry.source_grid.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = offset + geometry.source_grid[j] * ratio;
  }
  return out;
}

std::size_t nearest_index_scan(std::span<const double> grid, double frequency) {
  // "<=" lets a later candidate with an equal distance take over.
  double min_distance = std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double d = std::fabs(grid[k] - frequency);
    if (d <= min_distance) {
      min_distance = d;
      best = k;
    }
  }
  return best;
}

std::size_t nearest_index_fast(std::span<const double> grid, double step,
                               double frequency) {
  const std::size_t n = grid.size();
  if (n == 0) throw ValidationError("empty destination grid");
  const double guess = frequency / step;
  std::size_t k;
  if (!(guess > 0.0)) {
    k = 0;
  } else if (guess >= static_cast<double>(n - 1)) {
    k = n - 1;
  } else {
    k = static_cast<std::size_t>(std::floor(guess + 0.5));
  }
  // Rounded distances to a monotone grid form a valley (non-increasing, then
  // non-decreasing), so a local walk reaches the same index the scan keeps:
  // first to the left end of the minimum run, then to its right end.
  auto dist = [&](std::size_t i) { return std::fabs(grid[i] - frequency); };
  while (k > 0 && dist(k - 1) <= dist(k)) --k;
  while (k + 1 < n && dist(k + 1) <= dist(k)) ++k;
  return k;
}

std::vector<std::size_t> stack_oracle(const PlanGeometry& geometry,
                                      std::size_t slot) {
  const auto stretched = stretched_frequencies(geometry, slot);
  std::vector<std::size_t> out(stretched.size());
  for (std::size_t j = 0; j < stretched.size(); ++j) {
    out[j] = nearest_index_scan(geometry.dest_grid, stretched[j]);
  }
  return out;
}

std::vector<std::size_t> stack_fast(const PlanGeometry& geometry,
                                    std::size_t slot) {
  const auto stretched = stretched_frequencies(geometry, slot);
  std::vector<std::size_t> out(stretched.size());
  for (std::size_t j = 0; j < stretched.size(); ++j) {
    out[j] = nearest_index_fast(geometry.dest_grid, geometry.grid_step_hz,
                                stretched[j]);
  }
  return out;
}

BandPlan build_band_plan(std::size_t channel_count, std::size_t source_samples,
                         double source_rate_hz, const TransformConfig& config) {
  BandPlan plan;
  plan.stacking_order = config.resolved_order(channel_count);
  plan.mode = config.mode;
  plan.geometry = make_geometry(channel_count, source_samples, source_rate_hz,
                                config.target_rate_hz);
  if (plan.mode == Mode::kStrictLossless && !plan.rate_feasible()) {
    std::ostringstream msg;
    msg << "strict-lossless mode requires F_s >= p*f_s = "
        << static_cast<double>(channel_count) * source_rate_hz
        << " Hz (got F_s = " << config.target_rate_hz << " Hz)";
    throw InfeasibleError(msg.str());
  }

  const std::size_t n = source_samples;
  const std::size_t n_wide = plan.geometry.wideband_samples;
  plan.slot_of_channel.resize(channel_count);
  plan.assignment.resize(channel_count);
  for (std::size_t slot = 0; slot < channel_count; ++slot) {
    const std::size_t channel = plan.stacking_order[slot];
    plan.slot_of_channel[channel] = slot;
    plan.assignment[channel] = stack_fast(plan.geometry, slot);
  }

  // Replay the write order to find, for every destination bin, how often it
  // is written and which (channel, bin) pair writes it last.
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::uint32_t> writes(n_wide, 0);
  std::vector<std::size_t> last_writer(n_wide, kNone);
  for (std::size_t channel : plan.stacking_order) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = plan.assignment[channel][j];
      ++writes[k];
      last_writer[k] = channel * n + j;
    }
  }
  for (auto w : writes) plan.collision_count += (w > 1) ? 1 : 0;

  // In real-output modes the DC and Nyquist destination bins keep only their
  // real part, which is exact only for self-conjugate source bins.
  const bool real_output = produces_real_output(plan.mode);
  auto real_only_bin = [&](std::size_t k) {
    return k == 0 || (n_wide % 2 == 0 && k == n_wide / 2);
  };
  auto self_mirror = [&](std::size_t j) { return j == 0 || 2 * j == n; };

  std::vector<std::vector<bool>> direct(channel_count, std::vector<bool>(n));
  for (std::size_t c = 0; c < channel_count; ++c) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = plan.assignment[c][j];
      bool ok = last_writer[k] == c * n + j;
      if (ok && real_output && real_only_bin(k) && !self_mirror(j)) ok = false;
      direct[c][j] = ok;
    }
  }
  plan.bin_source.assign(channel_count, std::vector<BinSource>(n));
  for (std::size_t c = 0; c < channel_count; ++c) {
    for (std::size_t j = 0; j < n; ++j) {
      BinSource src = BinSource::kLost;
      if (direct[c][j]) {
        src = BinSource::kDirect;
      } else if (direct[c][(n - j) % n]) {
        src = BinSource::kMirror;
      }
      plan.bin_source[c][j] = src;
      if (src == BinSource::kLost) ++plan.unrecoverable_count;
    }
  }
  return plan;
}

StackedSpectrum apply_stacking(std::span<const ChannelSpectrum> spectra,
                               const BandPlan& plan) {
  const std::size_t p = plan.channel_count();
  const std::size_t n = plan.geometry.source_samples;
  if (spectra.size() != p) {
    throw ValidationError("apply_stacking: got " + std::to_string(spectra.size()) +
                          " spectra for a " + std::to_string(p) +
                          "-channel plan");
  }
  for (std::size_t c = 0; c < p; ++c) {
    if (spectra[c].bins.size() != n) {
      throw ValidationError("apply_stacking: channel " + std::to_string(c + 1) +
                            " spectrum has " +
                            std::to_string(spectra[c].bins.size()) +
                            " bins, plan expects " + std::to_string(n));
    }
  }
  if (plan.mode == Mode::kStrictLossless && !plan.lossless()) {
    for (std::size_t slot = 0; slot < p; ++slot) {
      const std::size_t c = plan.stacking_order[slot];
      for (std::size_t j = 0; j < n; ++j) {
        if (plan.bin_source[c][j] == BinSource::kLost) {
          std::ostringstream msg;
          msg << "strict-lossless: channel " << c + 1 << " bin " << j
              << " is overwritten at destination bin " << plan.assignment[c][j]
              << " and its conjugate mirror is lost too ("
              << plan.unrecoverable_count
              << " unrecoverable bins); full-grid stretching needs roughly "
                 "F_s >= 2*p*f_s = "
              << 2.0 * static_cast<double>(p) * plan.geometry.source_rate_hz
              << " Hz";
          throw InfeasibleError(msg.str());
        }
      }
    }
  }

  StackedSpectrum stacked;
  stacked.rate_hz = plan.geometry.target_rate_hz;
  stacked.bins.assign(plan.geometry.wideband_samples, Complex{});
  for (std::size_t c : plan.stacking_order) {
    const auto& assign = plan.assignment[c];
    const auto& bins = spectra[c].bins;
    for (std::size_t j = 0; j < n; ++j) stacked.bins[assign[j]] = bins[j];
  }
  return stacked;
}

StackingBenchmark benchmark_stacking(const PlanGeometry& geometry) {
  using Clock = std::chrono::steady_clock;
  StackingBenchmark result;
  std::vector<std::vector<std::size_t>> oracle(geometry.channel_count);
  std::vector<std::vector<std::size_t>> fast(geometry.channel_count);

  const auto t0 = Clock::now();
  for (std::size_t slot = 0; slot < geometry.channel_count; ++slot) {
    fast[slot] = stack_fast(geometry, slot);
  }
  const auto t1 = Clock::now();
  for (std::size_t slot = 0; slot < geometry.channel_count; ++slot) {
    oracle[slot] = stack_oracle(geometry, slot);
  }
  const auto t2 = Clock::now();

  result.fast_seconds = std::chrono::duration<double>(t1 - t0).count();
  result.oracle_seconds = std::chrono::duration<double>(t2 - t1).count();
  result.identical = oracle == fast;
  return result;
}

}  // namespace stackwave
