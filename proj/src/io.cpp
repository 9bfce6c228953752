#include "stackwave/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stackwave/errors.hpp"

namespace stackwave::io {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Byte and text helpers

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                              text.size()));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_tag(std::vector<std::uint8_t>& out, const char (&tag)[5]) {
  out.insert(out.end(), tag, tag + 4);
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) |
         static_cast<std::uint32_t>(b[at + 1]) << 8 |
         static_cast<std::uint32_t>(b[at + 2]) << 16 |
         static_cast<std::uint32_t>(b[at + 3]) << 24;
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

std::uint64_t get_u64(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = v << 8 | b[at + static_cast<std::size_t>(i)];
  return v;
}

std::vector<std::uint8_t> pack_f64(std::span<const double> values) {
  std::vector<std::uint8_t> out;
  out.reserve(values.size() * 8);
  for (double v : values) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

std::vector<double> unpack_f64(std::span<const std::uint8_t> bytes,
                               std::size_t expected, const fs::path& path) {
  if (bytes.size() != expected * 8) {
    std::ostringstream msg;
    msg << "'" << path.string() << "' holds " << bytes.size()
        << " bytes, expected " << expected * 8 << " (" << expected
        << " doubles)";
    throw ValidationError(msg.str());
  }
  std::vector<double> out(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    out[i] = std::bit_cast<double>(get_u64(bytes, i * 8));
  }
  return out;
}

// Shortest representation that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

// "# key=value" comment lines.
std::optional<std::pair<std::string, std::string>> comment_key_value(
    std::string_view line) {
  line = trim(line);
  if (line.empty() || line.front() != '#') return std::nullopt;
  line = trim(line.substr(1));
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) return std::nullopt;
  return std::pair{std::string(trim(line.substr(0, eq))),
                   std::string(trim(line.substr(eq + 1)))};
}

// ---------------------------------------------------------------------------
// Sidecar JSON

std::string_view container_name(WidebandFormat f) {
  return f == WidebandFormat::kWavF32 ? "wav-f32" : "raw-f64";
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed sidecar: ") + e.what());
  }
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                std::initializer_list<std::string_view> required) {
  if (!j.is_object()) throw ValidationError("sidecar is not a JSON object");
  const std::set<std::string_view> allowed_set(allowed);
  for (const auto& [key, value] : j.items()) {
    if (!allowed_set.contains(key)) {
      throw ValidationError("sidecar has unknown field '" + key + "'");
    }
  }
  for (auto key : required) {
    if (!j.contains(key)) {
      throw ValidationError("sidecar is missing field '" + std::string(key) + "'");
    }
  }
}

void check_version_and_kind(const Json& j, std::string_view kind) {
  if (!j.is_object() || !j.contains("format_version")) {
    throw ValidationError("sidecar is missing field 'format_version'");
  }
  const auto& v = j.at("format_version");
  if (!v.is_number_integer() || v.get<int>() != kFormatVersion) {
    throw ValidationError("unsupported sidecar format_version " + v.dump() +
                          " (this build reads version " +
                          std::to_string(kFormatVersion) + ")");
  }
  if (!j.contains("kind") || j.at("kind") != kind) {
    throw ValidationError("sidecar kind is not '" + std::string(kind) + "'");
  }
}

template <typename T>
T field(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ValidationError(std::string("sidecar field '") + key +
                          "' has the wrong type");
  }
}

Json load_sidecar(const fs::path& data_path) {
  const fs::path side = sidecar_path(data_path);
  if (!fs::exists(side)) {
    throw ValidationError("missing sidecar '" + side.string() + "'");
  }
  return parse_json(read_text(side));
}

void require_exists(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such file '" + path.string() + "'");
}

}  // namespace

// ---------------------------------------------------------------------------

fs::path sidecar_path(const fs::path& path) {
  return fs::path(path.string() + ".sidecar");
}

namespace {
std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}
bool is_raw_extension(const std::string& ext) {
  return ext == ".f64" || ext == ".raw" || ext == ".bin";
}
}  // namespace

RecordFormat record_format_for(const fs::path& path) {
  const auto ext = lower_extension(path);
  if (ext == ".csv") return RecordFormat::kCsv;
  if (is_raw_extension(ext)) return RecordFormat::kRawF64;
  throw ValidationError("cannot infer record format from '" + path.string() +
                        "' (use .csv or .f64)");
}

WidebandFormat wideband_format_for(const fs::path& path) {
  const auto ext = lower_extension(path);
  if (ext == ".wav") return WidebandFormat::kWavF32;
  if (is_raw_extension(ext)) return WidebandFormat::kRawF64;
  throw ValidationError("cannot infer wideband format from '" + path.string() +
                        "' (use .wav or .f64)");
}

MatrixFormat matrix_format_for(const fs::path& path) {
  const auto ext = lower_extension(path);
  if (ext == ".csv") return MatrixFormat::kCsv;
  if (is_raw_extension(ext)) return MatrixFormat::kRawF64;
  throw ValidationError("cannot infer matrix format from '" + path.string() +
                        "' (use .csv or .f64)");
}

SidecarHeader SidecarHeader::from_signal(const WidebandSignal& signal,
                                         WidebandFormat container) {
  const Provenance& p = signal.provenance;
  SidecarHeader h;
  h.format_version = p.format_version;
  h.container = container;
  h.channel_count = p.channel_count;
  h.source_samples = p.source_samples;
  h.source_rate_hz = p.source_rate_hz;
  h.target_rate_hz = p.target_rate_hz;
  h.wideband_samples = signal.samples.size();
  h.mode = p.mode;
  h.stacking_order = p.stacking_order;
  h.scale = p.scale;
  h.collision_count = p.collision_count;
  h.unrecoverable_count = p.unrecoverable_count;
  h.length_residual = p.length_residual;
  h.planes = signal.is_complex() ? 2 : 1;
  h.channel_names = p.channel_names;
  return h;
}

Provenance SidecarHeader::provenance() const {
  Provenance p;
  p.format_version = format_version;
  p.channel_count = channel_count;
  p.source_samples = source_samples;
  p.source_rate_hz = source_rate_hz;
  p.target_rate_hz = target_rate_hz;
  p.mode = mode;
  p.stacking_order = stacking_order;
  p.scale = scale;
  p.collision_count = collision_count;
  p.unrecoverable_count = unrecoverable_count;
  p.length_residual = length_residual;
  p.channel_names = channel_names;
  return p;
}

std::string serialize_sidecar(const SidecarHeader& h) {
  Json j;
  j["format_version"] = h.format_version;
  j["kind"] = "wideband";
  j["container"] = container_name(h.container);
  j["channel_count"] = h.channel_count;
  j["source_samples"] = h.source_samples;
  j["source_rate_hz"] = h.source_rate_hz;
  j["target_rate_hz"] = h.target_rate_hz;
  j["wideband_samples"] = h.wideband_samples;
  j["mode"] = to_string(h.mode);
  Json order = Json::array();
  for (auto c : h.stacking_order) order.push_back(c + 1);
  j["stacking_order"] = order;
  j["scale"] = h.scale;
  j["collision_count"] = h.collision_count;
  j["unrecoverable_count"] = h.unrecoverable_count;
  j["length_residual"] = h.length_residual;
  j["planes"] = h.planes;
  j["channel_names"] = h.channel_names;
  return j.dump(2) + "\n";
}

SidecarHeader parse_sidecar(const std::string& text) {
  const Json j = parse_json(text);
  check_version_and_kind(j, "wideband");
  check_keys(j,
             {"format_version", "kind", "container", "channel_count",
              "source_samples", "source_rate_hz", "target_rate_hz",
              "wideband_samples", "mode", "stacking_order", "scale",
              "collision_count", "unrecoverable_count", "length_residual",
              "planes", "channel_names"},
             {"container", "channel_count", "source_samples", "source_rate_hz",
              "target_rate_hz", "wideband_samples", "mode", "stacking_order",
              "scale", "collision_count", "unrecoverable_count", "planes"});
  SidecarHeader h;
  h.format_version = field<int>(j, "format_version");
  const auto container = field<std::string>(j, "container");
  if (container == "wav-f32") {
    h.container = WidebandFormat::kWavF32;
  } else if (container == "raw-f64") {
    h.container = WidebandFormat::kRawF64;
  } else {
    throw ValidationError("unknown sidecar container '" + container + "'");
  }
  h.channel_count = field<std::size_t>(j, "channel_count");
  h.source_samples = field<std::size_t>(j, "source_samples");
  h.source_rate_hz = field<double>(j, "source_rate_hz");
  h.target_rate_hz = field<double>(j, "target_rate_hz");
  h.wideband_samples = field<std::size_t>(j, "wideband_samples");
  h.mode = parse_mode(field<std::string>(j, "mode"));
  for (auto c : field<std::vector<std::size_t>>(j, "stacking_order")) {
    if (c == 0) throw ValidationError("stacking_order entries are 1-based");
    h.stacking_order.push_back(c - 1);
  }
  h.scale = field<double>(j, "scale");
  h.collision_count = field<std::size_t>(j, "collision_count");
  h.unrecoverable_count = field<std::size_t>(j, "unrecoverable_count");
  if (j.contains("length_residual")) {
    h.length_residual = field<double>(j, "length_residual");
  }
  h.planes = field<std::size_t>(j, "planes");
  if (h.planes != 1 && h.planes != 2) {
    throw ValidationError("sidecar planes must be 1 or 2");
  }
  if (j.contains("channel_names")) {
    h.channel_names = field<std::vector<std::string>>(j, "channel_names");
  }
  return h;
}

// ---------------------------------------------------------------------------
// Records

namespace {

MultiChannelRecord read_csv_record(const fs::path& path,
                                   std::optional<double> rate_flag) {
  const std::string text = read_text(path);
  std::optional<double> rate_comment;
  std::vector<std::string> names;
  std::vector<std::vector<double>> channels;
  std::size_t columns = 0;
  bool first_row = true;

  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::size_t line_no = li + 1;
    const std::string_view line = trim(lines[li]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (auto kv = comment_key_value(line); kv && kv->first == "rate_hz") {
        rate_comment = parse_number(kv->second);
        if (!rate_comment) {
          throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                ": bad rate_hz value '" + kv->second + "'");
        }
      }
      continue;
    }
    const auto cells = split_commas(line);
    std::vector<std::optional<double>> parsed;
    parsed.reserve(cells.size());
    for (auto cell : cells) parsed.push_back(parse_number(cell));

    const bool all_text = std::none_of(parsed.begin(), parsed.end(),
                                       [](const auto& v) { return v.has_value(); });
    if (first_row && all_text) {
      for (auto cell : cells) names.emplace_back(trim(cell));
      columns = cells.size();
      first_row = false;
      continue;
    }
    if (first_row) {
      columns = cells.size();
      first_row = false;
    }
    if (cells.size() != columns) {
      std::ostringstream msg;
      msg << path.string() << ": row " << line_no << " has " << cells.size()
          << " columns, expected " << columns;
      throw ValidationError(msg.str());
    }
    if (channels.empty()) channels.resize(columns);
    for (std::size_t c = 0; c < columns; ++c) {
      if (!parsed[c]) {
        std::ostringstream msg;
        msg << path.string() << ": non-numeric value '" << trim(cells[c])
            << "' at row " << line_no << ", column " << c + 1;
        throw ValidationError(msg.str());
      }
      channels[c].push_back(*parsed[c]);
    }
  }
  if (channels.empty()) {
    throw ValidationError(path.string() + ": no sample rows");
  }
  const std::optional<double> rate = rate_flag ? rate_flag : rate_comment;
  if (!rate) {
    throw ValidationError(path.string() +
                          ": missing sample rate (pass --rate or add a "
                          "'# rate_hz=...' line)");
  }
  return MultiChannelRecord(std::move(channels), *rate, std::move(names));
}

MultiChannelRecord read_raw_record(const fs::path& path,
                                   std::optional<double> rate_flag) {
  const Json j = load_sidecar(path);
  check_version_and_kind(j, "multichannel");
  check_keys(j,
             {"format_version", "kind", "channel_count", "sample_count",
              "sample_rate_hz", "channel_names"},
             {"channel_count", "sample_count", "sample_rate_hz"});
  const auto p = field<std::size_t>(j, "channel_count");
  const auto n = field<std::size_t>(j, "sample_count");
  double rate = field<double>(j, "sample_rate_hz");
  if (rate_flag && *rate_flag != rate) {
    throw ValidationError("--rate disagrees with the sidecar sample rate");
  }
  std::vector<std::string> names;
  if (j.contains("channel_names")) {
    names = field<std::vector<std::string>>(j, "channel_names");
  }
  const auto values = unpack_f64(read_bytes(path), p * n, path);
  std::vector<std::vector<double>> channels(p);
  for (std::size_t c = 0; c < p; ++c) {
    channels[c].assign(values.begin() + static_cast<std::ptrdiff_t>(c * n),
                       values.begin() + static_cast<std::ptrdiff_t>((c + 1) * n));
  }
  return MultiChannelRecord(std::move(channels), rate, std::move(names));
}

}  // namespace

MultiChannelRecord read_multichannel(const fs::path& path, RecordFormat format,
                                     std::optional<double> sample_rate_hz) {
  require_exists(path);
  return format == RecordFormat::kCsv ? read_csv_record(path, sample_rate_hz)
                                      : read_raw_record(path, sample_rate_hz);
}

void write_multichannel(const MultiChannelRecord& record, const fs::path& path,
                        RecordFormat format) {
  const std::size_t p = record.channel_count();
  const std::size_t n = record.sample_count();
  if (format == RecordFormat::kCsv) {
    std::string out = "# rate_hz=" + format_double(record.sample_rate_hz()) + "\n";
    for (std::size_t c = 0; c < p; ++c) {
      if (c > 0) out += ',';
      out += record.channel_names().empty() ? "ch" + std::to_string(c + 1)
                                            : record.channel_names()[c];
    }
    out += '\n';
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < p; ++c) {
        if (c > 0) out += ',';
        out += format_double(record.channel(c)[i]);
      }
      out += '\n';
    }
    write_text(path, out);
    return;
  }
  std::vector<double> flat;
  flat.reserve(p * n);
  for (const auto& ch : record.channels()) flat.insert(flat.end(), ch.begin(), ch.end());
  write_bytes(path, pack_f64(flat));
  Json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "multichannel";
  j["channel_count"] = p;
  j["sample_count"] = n;
  j["sample_rate_hz"] = record.sample_rate_hz();
  j["channel_names"] = record.channel_names();
  write_text(sidecar_path(path), j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Wideband signals

void write_wideband(const WidebandSignal& signal, const fs::path& path,
                    WidebandFormat format) {
  if (format == WidebandFormat::kWavF32) {
    if (signal.is_complex()) {
      throw ValidationError(
          "complex-not-playable: paper-complex signals have two sample planes "
          "and cannot be written as WAV; use raw-f64");
    }
    std::vector<float> pcm(signal.samples.begin(), signal.samples.end());
    const auto rate = static_cast<std::uint32_t>(std::llround(signal.rate_hz));
    write_bytes(path, encode_wav_f32(pcm, rate));
  } else {
    std::vector<double> flat(signal.samples);
    flat.insert(flat.end(), signal.imag.begin(), signal.imag.end());
    write_bytes(path, pack_f64(flat));
  }
  write_text(sidecar_path(path),
             serialize_sidecar(SidecarHeader::from_signal(signal, format)));
}

WidebandSignal read_wideband(const fs::path& path) {
  require_exists(path);
  const fs::path side = sidecar_path(path);
  if (!fs::exists(side)) {
    throw ValidationError("missing sidecar '" + side.string() + "'");
  }
  const SidecarHeader h = parse_sidecar(read_text(side));
  WidebandSignal signal;
  signal.rate_hz = h.target_rate_hz;
  signal.provenance = h.provenance();
  const std::size_t m = h.wideband_samples;
  if (h.container == WidebandFormat::kWavF32) {
    if (h.planes != 1) throw ValidationError("WAV sidecar claims 2 planes");
    const WavData wav = decode_wav_f32(read_bytes(path));
    if (wav.samples.size() != m) {
      std::ostringstream msg;
      msg << "'" << path.string() << "' holds " << wav.samples.size()
          << " samples, sidecar says " << m;
      throw ValidationError(msg.str());
    }
    if (wav.sample_rate !=
        static_cast<std::uint32_t>(std::llround(h.target_rate_hz))) {
      throw ValidationError("WAV sample rate disagrees with the sidecar");
    }
    signal.samples.assign(wav.samples.begin(), wav.samples.end());
    signal.sample_epsilon = 0x1.0p-24;
  } else {
    auto flat = unpack_f64(read_bytes(path), m * h.planes, path);
    signal.samples.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(m));
    if (h.planes == 2) {
      signal.imag.assign(flat.begin() + static_cast<std::ptrdiff_t>(m), flat.end());
    }
  }
  return signal;
}

// ---------------------------------------------------------------------------
// Matrices

void write_matrix(const Matrix& matrix, const fs::path& path,
                  MatrixFormat format, const Metadata& metadata) {
  if (matrix.values.size() != matrix.rows * matrix.cols) {
    throw ValidationError("matrix storage does not match its dimensions");
  }
  for (std::size_t i = 0; i < matrix.values.size(); ++i) {
    if (!std::isfinite(matrix.values[i])) {
      std::ostringstream msg;
      msg << "matrix entry (" << i / std::max<std::size_t>(matrix.cols, 1) << ", "
          << i % std::max<std::size_t>(matrix.cols, 1) << ") is not finite";
      throw ValidationError(msg.str());
    }
  }
  Json meta(metadata);
  if (format == MatrixFormat::kCsv) {
    std::string out = "# rows=" + std::to_string(matrix.rows) +
                      " cols=" + std::to_string(matrix.cols) + "\n";
    if (!metadata.empty()) out += "# metadata=" + meta.dump() + "\n";
    for (std::size_t r = 0; r < matrix.rows; ++r) {
      for (std::size_t c = 0; c < matrix.cols; ++c) {
        if (c > 0) out += ',';
        out += format_double(matrix.at(r, c));
      }
      out += '\n';
    }
    write_text(path, out);
    return;
  }
  write_bytes(path, pack_f64(matrix.values));
  Json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = "matrix";
  j["rows"] = matrix.rows;
  j["cols"] = matrix.cols;
  j["metadata"] = meta;
  write_text(sidecar_path(path), j.dump(2) + "\n");
}

Matrix read_matrix(const fs::path& path, MatrixFormat format,
                   Metadata* metadata) {
  require_exists(path);
  if (format == MatrixFormat::kRawF64) {
    const Json j = load_sidecar(path);
    check_version_and_kind(j, "matrix");
    check_keys(j, {"format_version", "kind", "rows", "cols", "metadata"},
               {"rows", "cols"});
    Matrix m;
    m.rows = field<std::size_t>(j, "rows");
    m.cols = field<std::size_t>(j, "cols");
    m.values = unpack_f64(read_bytes(path), m.rows * m.cols, path);
    if (metadata && j.contains("metadata")) {
      *metadata = field<Metadata>(j, "metadata");
    }
    return m;
  }

  const std::string text = read_text(path);
  const auto lines = split_lines(text);
  std::optional<std::size_t> rows, cols;
  Matrix m;
  std::size_t data_rows = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string_view line = trim(lines[li]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      if (body.starts_with("rows=")) {
        std::istringstream ss{std::string(body)};
        std::string r, c;
        ss >> r >> c;
        rows = std::stoul(r.substr(5));
        if (c.starts_with("cols=")) cols = std::stoul(c.substr(5));
        if (!cols) throw ValidationError(path.string() + ": malformed dimension line");
        m = Matrix(*rows, *cols);
      } else if (body.starts_with("metadata=") && metadata) {
        *metadata = parse_json(std::string(body.substr(9))).get<Metadata>();
      }
      continue;
    }
    if (!rows) throw ValidationError(path.string() + ": missing '# rows= cols=' line");
    const auto cells = split_commas(line);
    if (cells.size() != *cols || data_rows >= *rows) {
      throw ValidationError(path.string() + ": row " + std::to_string(li + 1) +
                            " does not fit the declared dimensions");
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        throw ValidationError(path.string() + ": non-numeric value at row " +
                              std::to_string(li + 1) + ", column " +
                              std::to_string(c + 1));
      }
      m.at(data_rows, c) = *v;
    }
    ++data_rows;
  }
  if (!rows || data_rows != *rows) {
    throw ValidationError(path.string() + ": truncated matrix");
  }
  return m;
}

// ---------------------------------------------------------------------------
// WAV

std::vector<std::uint8_t> encode_wav_f32(std::span<const float> samples,
                                         std::uint32_t sample_rate) {
  constexpr std::uint16_t kFormatIeeeFloat = 3;
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 4);
  std::vector<std::uint8_t> out;
  out.reserve(58 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 4 + (8 + 18) + (8 + 4) + (8 + data_bytes));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 18);
  put_u16(out, kFormatIeeeFloat);
  put_u16(out, 1);            // channels
  put_u32(out, sample_rate);
  put_u32(out, sample_rate * 4);  // byte rate
  put_u16(out, 4);            // block align
  put_u16(out, 32);           // bits per sample
  put_u16(out, 0);            // cbSize
  put_tag(out, "fact");
  put_u32(out, 4);
  put_u32(out, static_cast<std::uint32_t>(samples.size()));
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (float s : samples) put_u32(out, std::bit_cast<std::uint32_t>(s));
  return out;
}

WavData decode_wav_f32(std::span<const std::uint8_t> bytes) {
  auto tag_at = [&](std::size_t at, std::string_view tag) {
    return at + 4 <= bytes.size() &&
           std::equal(tag.begin(), tag.end(), bytes.begin() + static_cast<std::ptrdiff_t>(at));
  };
  if (bytes.size() < 12 || !tag_at(0, "RIFF") || !tag_at(8, "WAVE")) {
    throw ValidationError("not a RIFF/WAVE file");
  }
  WavData wav;
  bool have_fmt = false;
  std::size_t at = 12;
  while (at + 8 <= bytes.size()) {
    const std::uint32_t size = get_u32(bytes, at + 4);
    const std::size_t body = at + 8;
    if (tag_at(at, "fmt ")) {
      if (size < 16 || body + size > bytes.size()) {
        throw ValidationError("truncated WAV fmt chunk");
      }
      const std::uint16_t tag = get_u16(bytes, body);
      const std::uint16_t channels = get_u16(bytes, body + 2);
      const std::uint16_t bits = get_u16(bytes, body + 14);
      if (tag != 3 || channels != 1 || bits != 32) {
        throw ValidationError(
            "WAV must be mono 32-bit IEEE float (format tag 3)");
      }
      wav.sample_rate = get_u32(bytes, body + 4);
      have_fmt = true;
    } else if (tag_at(at, "data")) {
      if (!have_fmt) throw ValidationError("WAV data chunk precedes fmt chunk");
      if (body + size > bytes.size() || size % 4 != 0) {
        throw ValidationError("truncated WAV data chunk");
      }
      wav.samples.resize(size / 4);
      for (std::size_t i = 0; i < wav.samples.size(); ++i) {
        wav.samples[i] = std::bit_cast<float>(get_u32(bytes, body + 4 * i));
      }
      return wav;
    }
    at = body + size + (size & 1u);
  }
  throw ValidationError("WAV file has no data chunk");
}

std::vector<std::pair<std::string, std::string>> describe_sidecar(
    const fs::path& sidecar) {
  require_exists(sidecar);
  const Json j = parse_json(read_text(sidecar));
  if (!j.is_object()) throw ValidationError("sidecar is not a JSON object");
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, value] : j.items()) {
    out.emplace_back(key, value.is_string() ? value.get<std::string>()
                                            : value.dump());
  }
  return out;
}

}  // namespace stackwave::io
