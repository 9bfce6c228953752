#include "stackwave/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stackwave/errors.hpp"

namespace stackwave {

void validate_record(const std::vector<std::vector<double>>& channels,
                     double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    std::ostringstream msg;
    msg << "sample rate must be positive and finite, got " << sample_rate_hz;
    throw ValidationError(msg.str());
  }
  if (channels.empty()) throw ValidationError("record has no channels");
  const std::size_t n = channels.front().size();
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const auto& ch = channels[c];
    if (ch.empty()) {
      throw ValidationError("channel " + std::to_string(c + 1) + " is empty");
    }
    if (ch.size() != n) {
      std::ostringstream msg;
      msg << "ragged channels: channel " << c + 1 << " has " << ch.size()
          << " samples, channel 1 has " << n;
      throw ValidationError(msg.str());
    }
    if (n < 2) {
      throw ValidationError("channels need at least 2 samples, got " +
                            std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(ch[i])) {
        std::ostringstream msg;
        msg << "non-finite sample in channel " << c + 1 << " at index " << i;
        throw ValidationError(msg.str());
      }
    }
  }
}

MultiChannelRecord::MultiChannelRecord(std::vector<std::vector<double>> channels,
                                       double sample_rate_hz,
                                       std::vector<std::string> channel_names)
    : channels_(std::move(channels)),
      sample_rate_hz_(sample_rate_hz),
      channel_names_(std::move(channel_names)) {
  validate_record(channels_, sample_rate_hz_);
  if (!channel_names_.empty() && channel_names_.size() != channels_.size()) {
    throw ValidationError("got " + std::to_string(channel_names_.size()) +
                          " channel names for " +
                          std::to_string(channels_.size()) + " channels");
  }
}

std::span<const double> MultiChannelRecord::channel(std::size_t index) const {
  if (index >= channels_.size()) {
    throw ValidationError("channel index " + std::to_string(index) +
                          " out of range");
  }
  return channels_[index];
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kPaperComplex:
      return "paper-complex";
    case Mode::kRealHermitian:
      return "real-hermitian";
    case Mode::kStrictLossless:
      return "strict-lossless";
  }
  return "unknown";
}

Mode parse_mode(std::string_view text) {
  if (text == "paper-complex") return Mode::kPaperComplex;
  if (text == "real-hermitian") return Mode::kRealHermitian;
  if (text == "strict-lossless") return Mode::kStrictLossless;
  throw ValidationError("unknown mode '" + std::string(text) + "'");
}

std::vector<std::size_t> TransformConfig::resolved_order(
    std::size_t channel_count) const {
  if (!(target_rate_hz > 0.0) || !std::isfinite(target_rate_hz)) {
    throw ValidationError("target rate must be positive and finite");
  }
  if (stacking_order.empty()) {
    std::vector<std::size_t> identity(channel_count);
    for (std::size_t i = 0; i < channel_count; ++i) identity[i] = i;
    return identity;
  }
  if (stacking_order.size() != channel_count) {
    throw ValidationError("stacking order has " +
                          std::to_string(stacking_order.size()) +
                          " entries for " + std::to_string(channel_count) +
                          " channels");
  }
  std::vector<bool> seen(channel_count, false);
  for (std::size_t c : stacking_order) {
    if (c >= channel_count || seen[c]) {
      throw ValidationError("stacking order is not a permutation");
    }
    seen[c] = true;
  }
  return stacking_order;
}

std::size_t wideband_length(std::size_t source_samples, double source_rate_hz,
                            double target_rate_hz) {
  const double duration = static_cast<double>(source_samples) / source_rate_hz;
  return static_cast<std::size_t>(std::llround(duration * target_rate_hz));
}

}  // namespace stackwave
