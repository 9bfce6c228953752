#pragma once

// File formats.
//
//   CSV records   one column per channel, optional header row of names,
//                 optional "# rate_hz=<f_s>" comment line.
//   raw-f64       little-endian IEEE-754 doubles, channel-major (or plane-major
//                 for complex signals), dimensions in "<file>.sidecar".
//   WAV           RIFF/WAVE, format tag 3 (IEEE float), mono, 32-bit,
//                 sample rate round(F_s); still needs "<file>.sidecar".
//
// Sidecars are JSON objects with a "format_version" and a "kind"
// ("multichannel", "wideband" or "matrix"). Unknown keys are rejected.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stackwave/model.hpp"
#include "stackwave/transform.hpp"

namespace stackwave::io {

enum class RecordFormat { kCsv, kRawF64 };
enum class WidebandFormat { kWavF32, kRawF64 };
enum class MatrixFormat { kCsv, kRawF64 };

/// "<path>.sidecar"
std::filesystem::path sidecar_path(const std::filesystem::path& path);

/// Picks a format from the file extension (.csv, .f64/.raw/.bin, .wav);
/// throws ValidationError for anything else.
RecordFormat record_format_for(const std::filesystem::path& path);
WidebandFormat wideband_format_for(const std::filesystem::path& path);
MatrixFormat matrix_format_for(const std::filesystem::path& path);

/// The wideband sidecar: everything decode needs plus container details.
struct SidecarHeader {
  int format_version = kFormatVersion;
  WidebandFormat container = WidebandFormat::kRawF64;
  std::size_t channel_count = 0;
  std::size_t source_samples = 0;
  double source_rate_hz = 0.0;
  double target_rate_hz = 0.0;
  std::size_t wideband_samples = 0;
  Mode mode = Mode::kRealHermitian;
  std::vector<std::size_t> stacking_order;  // 0-based in memory, 1-based on disk
  double scale = 1.0;
  std::size_t collision_count = 0;
  std::size_t unrecoverable_count = 0;
  double length_residual = 0.0;
  std::size_t planes = 1;
  std::vector<std::string> channel_names;

  static SidecarHeader from_signal(const WidebandSignal& signal,
                                   WidebandFormat container);
  Provenance provenance() const;
};

std::string serialize_sidecar(const SidecarHeader& header);
/// Throws ValidationError on malformed JSON, unknown keys, wrong kind or a
/// format_version other than kFormatVersion.
SidecarHeader parse_sidecar(const std::string& text);

// Records.
MultiChannelRecord read_multichannel(const std::filesystem::path& path,
                                     RecordFormat format,
                                     std::optional<double> sample_rate_hz = {});
void write_multichannel(const MultiChannelRecord& record,
                        const std::filesystem::path& path, RecordFormat format);

// Wideband signals.
void write_wideband(const WidebandSignal& signal,
                    const std::filesystem::path& path, WidebandFormat format);
WidebandSignal read_wideband(const std::filesystem::path& path);

// Feature matrices. Metadata is stored next to the dimensions.
using Metadata = std::map<std::string, std::string>;
void write_matrix(const Matrix& matrix, const std::filesystem::path& path,
                  MatrixFormat format, const Metadata& metadata = {});
Matrix read_matrix(const std::filesystem::path& path, MatrixFormat format,
                   Metadata* metadata = nullptr);

// WAV primitives.
std::vector<std::uint8_t> encode_wav_f32(std::span<const float> samples,
                                         std::uint32_t sample_rate);
struct WavData {
  std::uint32_t sample_rate = 0;
  std::vector<float> samples;
};
WavData decode_wav_f32(std::span<const std::uint8_t> bytes);

/// Key/value view of any sidecar, in file order, for display.
std::vector<std::pair<std::string, std::string>> describe_sidecar(
    const std::filesystem::path& sidecar);

}  // namespace stackwave::io
