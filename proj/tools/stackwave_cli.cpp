// stackwave: multi-channel <-> single wideband channel transcoder.
//
//   stackwave encode in.csv out.wav --rate 1000 --target-rate 16000
//   stackwave decode out.wav restored.csv
//   stackwave verify in.csv --rate 1000 --target-rate 64000
//   stackwave spectrogram out.wav spec.f64 --paper-shape
//   stackwave synth noise.csv --channels 4 --samples 2500 --rate 250 --band alpha
//   stackwave info out.wav
//   stackwave bench
//
// Exit codes: 0 ok, 1 I/O, 2 validation/format, 3 infeasible configuration,
// 4 verify threshold exceeded.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "stackwave/errors.hpp"
#include "stackwave/features.hpp"
#include "stackwave/io.hpp"
#include "stackwave/mapping.hpp"
#include "stackwave/synth.hpp"
#include "stackwave/transform.hpp"

namespace fs = std::filesystem;
using namespace stackwave;

namespace {

std::vector<std::size_t> parse_order(const std::string& text) {
  std::vector<std::size_t> order;
  if (text.empty()) return order;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const long v = std::stol(item);
      if (v < 1) throw ValidationError("--order entries are 1-based channel numbers");
      order.push_back(static_cast<std::size_t>(v - 1));
    } catch (const std::logic_error&) {
      throw ValidationError("bad --order entry '" + item + "'");
    }
  }
  return order;
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << v;
  return ss.str();
}

void print_plan_summary(const BandPlan& plan) {
  const auto& g = plan.geometry;
  const double needed = static_cast<double>(g.channel_count) * g.source_rate_hz;
  std::cout << "channels p          : " << g.channel_count << "\n"
            << "samples N           : " << g.source_samples << "\n"
            << "f_s                 : " << fmt(g.source_rate_hz) << " Hz\n"
            << "F_s                 : " << fmt(g.target_rate_hz) << " Hz\n"
            << "f_band              : " << fmt(g.band_width_hz) << " Hz\n"
            << "N'                  : " << g.wideband_samples << "\n"
            << "mode                : " << to_string(plan.mode) << "\n"
            << "collision_count     : " << plan.collision_count << "\n"
            << "unrecoverable bins  : " << plan.unrecoverable_count << "\n"
            << "feasible F_s >= p*f_s = " << fmt(needed) << " : "
            << (plan.rate_feasible() ? "true" : "false") << "\n";
}

MultiChannelRecord load_record(const std::string& path, std::optional<double> rate) {
  return io::read_multichannel(path, io::record_format_for(path), rate);
}

int run_encode(const std::string& in, const std::string& out,
               std::optional<double> rate, double target, const std::string& mode,
               const std::string& order) {
  const auto format = io::wideband_format_for(out);
  TransformConfig config{target, parse_mode(mode), parse_order(order)};
  const auto record = load_record(in, rate);
  BandPlan plan;
  const auto signal = encode(record, config, plan);
  print_plan_summary(plan);
  if (!plan.lossless()) {
    std::cerr << "warning: " << plan.unrecoverable_count
              << " source bins are overwritten with no surviving mirror; "
                 "decode will not reproduce the input exactly\n";
  }
  io::write_wideband(signal, out, format);
  std::cout << "wrote " << out << " and " << io::sidecar_path(out).string() << "\n";
  return 0;
}

int run_decode(const std::string& in, const std::string& out,
               const std::string& compare, std::optional<double> rate) {
  const auto format = io::record_format_for(out);
  const auto signal = io::read_wideband(in);
  const auto record = decode(signal);
  io::write_multichannel(record, out, format);
  std::cout << "decoded " << record.channel_count() << " channels x "
            << record.sample_count() << " samples @ "
            << fmt(record.sample_rate_hz()) << " Hz\n";
  if (!compare.empty()) {
    const auto original =
        load_record(compare, rate ? rate : std::optional(record.sample_rate_hz()));
    if (original.channel_count() != record.channel_count() ||
        original.sample_count() != record.sample_count()) {
      throw ValidationError("--compare record has a different shape");
    }
    for (std::size_t c = 0; c < record.channel_count(); ++c) {
      double sum = 0.0;
      for (std::size_t i = 0; i < record.sample_count(); ++i) {
        const double d = record.channel(c)[i] - original.channel(c)[i];
        sum += d * d;
      }
      std::cout << "channel " << c + 1 << " rmse "
                << fmt(std::sqrt(sum / static_cast<double>(record.sample_count())), 3)
                << "\n";
    }
  }
  return 0;
}

int run_verify(const std::string& in, std::optional<double> rate, double target,
               const std::string& mode, const std::string& order,
               double threshold, bool json) {
  TransformConfig config{target, parse_mode(mode), parse_order(order)};
  const auto record = load_record(in, rate);
  const RoundtripReport report = roundtrip_report(record, config);
  const bool pass = report.relative_error < threshold;
  if (json) {
    nlohmann::ordered_json j;
    j["mode"] = to_string(report.mode);
    j["max_abs_error"] = report.max_abs_error;
    j["relative_error"] = report.relative_error;
    j["per_channel_rmse"] = report.per_channel_rmse;
    j["collision_count"] = report.collision_count;
    j["unrecoverable_count"] = report.unrecoverable_count;
    j["rate_feasible"] = report.rate_feasible;
    j["threshold"] = threshold;
    j["pass"] = pass;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "mode                : " << to_string(report.mode) << "\n"
              << "max_abs_error       : " << fmt(report.max_abs_error, 3) << "\n"
              << "relative_error      : " << fmt(report.relative_error, 3) << "\n"
              << "collision_count     : " << report.collision_count << "\n"
              << "unrecoverable bins  : " << report.unrecoverable_count << "\n"
              << "feasible F_s >= p*f_s : "
              << (report.rate_feasible ? "true" : "false") << "\n";
    for (std::size_t c = 0; c < report.per_channel_rmse.size(); ++c) {
      std::cout << "channel " << c + 1 << " rmse "
                << fmt(report.per_channel_rmse[c], 3) << "\n";
    }
    std::cout << (pass ? "PASS" : "FAIL") << " (threshold " << fmt(threshold, 3)
              << " relative)\n";
  }
  return pass ? 0 : static_cast<int>(ExitCode::kVerifyFailed);
}

int run_spectrogram(const std::string& in, const std::string& out,
                    const SpectrogramOptions& options) {
  const auto format = io::matrix_format_for(out);
  const auto signal = io::read_wideband(in);
  const Matrix m = spectrogram(signal, options);
  io::Metadata meta{
      {"window", "hann-periodic"},
      {"window_samples", std::to_string(options.window_samples)},
      {"overlap_samples", std::to_string(options.overlap_samples)},
      {"hop_samples", std::to_string(options.window_samples - options.overlap_samples)},
      {"values", options.log_magnitude ? "log-magnitude-db" : "magnitude"},
      {"paper_shape", options.paper_shape ? "true" : "false"},
      {"rate_hz", fmt(signal.rate_hz, 17)},
      {"layout", "rows=frequency cols=frame"},
  };
  io::write_matrix(m, out, format, meta);
  std::cout << m.rows << " x " << m.cols << "\n";
  return 0;
}

Tone parse_tone(const std::string& spec, std::size_t& channel) {
  // channel:freq[:amplitude[:phase]]
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 2 || parts.size() > 4) {
    throw ValidationError("--tone expects channel:freq[:amp[:phase]], got '" +
                          spec + "'");
  }
  try {
    const long ch = std::stol(parts[0]);
    if (ch < 1) throw ValidationError("--tone channel numbers are 1-based");
    channel = static_cast<std::size_t>(ch - 1);
    Tone t;
    t.frequency_hz = std::stod(parts[1]);
    if (parts.size() > 2) t.amplitude = std::stod(parts[2]);
    if (parts.size() > 3) t.phase_rad = std::stod(parts[3]);
    return t;
  } catch (const std::logic_error&) {
    throw ValidationError("bad --tone '" + spec + "'");
  }
}

int run_synth(const std::string& out, std::size_t channels, std::size_t samples,
              double rate, const std::string& band,
              const std::vector<std::string>& tones, std::uint64_t seed) {
  const auto format = io::record_format_for(out);
  if (!band.empty() && !tones.empty()) {
    throw ValidationError("use either --band or --tone, not both");
  }
  if (!band.empty()) {
    const BandNoise noise =
        make_bandnoise(channels, samples, rate, parse_band(band), seed);
    if (noise.truncated) {
      std::cerr << "warning: " << band << " band truncated at Nyquist ("
                << fmt(rate / 2.0) << " Hz)\n";
    }
    io::write_multichannel(noise.record, out, format);
  } else {
    std::vector<std::vector<Tone>> table(channels);
    for (const auto& spec : tones) {
      std::size_t ch = 0;
      Tone t = parse_tone(spec, ch);
      if (ch >= channels) throw ValidationError("--tone channel out of range");
      table[ch].push_back(t);
    }
    io::write_multichannel(make_tones(channels, samples, rate, table), out, format);
  }
  std::cout << "wrote " << channels << " channels x " << samples << " samples @ "
            << fmt(rate) << " Hz to " << out << "\n";
  return 0;
}

int run_info(const std::string& path) {
  fs::path side(path);
  if (side.extension() != ".sidecar") side = io::sidecar_path(path);
  if (!fs::exists(side)) throw IoError("no such file '" + side.string() + "'");
  for (const auto& [key, value] : io::describe_sidecar(side)) {
    std::cout << key << "=" << value << "\n";
  }
  return 0;
}

int run_bench(std::size_t channels, std::size_t samples, double rate, double target) {
  const PlanGeometry g = make_geometry(channels, samples, rate, target);
  std::cout << "stacking benchmark p=" << channels << " N=" << samples
            << " f_s=" << fmt(rate) << " F_s=" << fmt(target)
            << " N'=" << g.wideband_samples << "\n";
  const StackingBenchmark b = benchmark_stacking(g);
  std::cout << "oracle  : " << fmt(b.oracle_seconds, 4) << " s\n"
            << "fast    : " << fmt(b.fast_seconds, 4) << " s\n"
            << "speedup : " << fmt(b.speedup(), 4) << "x\n"
            << "identical assignments: " << (b.identical ? "yes" : "NO") << "\n";
  return b.identical ? 0 : static_cast<int>(ExitCode::kValidation);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-channel to single wideband channel transcoder"};
  app.require_subcommand(1);

  std::string in, out, mode = "real-hermitian", order, compare;
  std::optional<double> rate;
  double target = 16000.0;

  auto* enc = app.add_subcommand("encode", "Stack channels into one wideband signal");
  enc->add_option("input", in, "Record (.csv or .f64)")->required();
  enc->add_option("output", out, "Wideband output (.wav or .f64)")->required();
  enc->add_option("--rate", rate, "Source sample rate f_s in Hz");
  enc->add_option("--target-rate", target, "Wideband sample rate F_s in Hz");
  enc->add_option("--mode", mode, "paper-complex | real-hermitian | strict-lossless");
  enc->add_option("--order", order, "Stacking order, e.g. 3,1,2 (1-based)");

  auto* dec = app.add_subcommand("decode", "Recover channels from a wideband signal");
  dec->add_option("input", in, "Wideband file (.wav or .f64) with sidecar")->required();
  dec->add_option("output", out, "Record output (.csv or .f64)")->required();
  dec->add_option("--compare", compare, "Original record; prints per-channel RMSE");
  dec->add_option("--rate", rate, "Sample rate of the --compare CSV if not in file");

  double threshold = 1e-9;
  bool json = false;
  auto* ver = app.add_subcommand("verify", "Encode, decode and measure the error");
  ver->add_option("input", in, "Record (.csv or .f64)")->required();
  ver->add_option("--rate", rate, "Source sample rate f_s in Hz");
  ver->add_option("--target-rate", target, "Wideband sample rate F_s in Hz");
  ver->add_option("--mode", mode, "paper-complex | real-hermitian | strict-lossless");
  ver->add_option("--order", order, "Stacking order (1-based)");
  ver->add_option("--threshold", threshold, "Max relative error for exit 0");
  ver->add_flag("--json", json, "Machine-readable report");

  SpectrogramOptions spec_opts;
  auto* spc = app.add_subcommand("spectrogram", "Magnitude STFT of a wideband signal");
  spc->add_option("input", in, "Wideband file with sidecar")->required();
  spc->add_option("output", out, "Matrix output (.csv or .f64)")->required();
  spc->add_option("--window", spec_opts.window_samples, "Window length in samples");
  spc->add_option("--overlap", spec_opts.overlap_samples, "Overlap in samples");
  spc->add_flag("--paper-shape", spec_opts.paper_shape, "Drop the final frame");
  spc->add_flag("--log", spec_opts.log_magnitude, "20*log10 magnitude");

  std::size_t channels = 1, samples = 2500;
  double synth_rate = 250.0;
  std::string band;
  std::vector<std::string> tones;
  std::uint64_t seed = 1;
  auto* syn = app.add_subcommand("synth", "Generate a synthetic record");
  syn->add_option("output", out, "Record output (.csv or .f64)")->required();
  syn->add_option("--channels", channels, "Channel count p");
  syn->add_option("--samples", samples, "Samples per channel N");
  syn->add_option("--rate", synth_rate, "Sample rate f_s in Hz");
  syn->add_option("--band", band, "EEG band noise: delta|theta|alpha|sigma|beta|gamma");
  syn->add_option("--tone", tones, "channel:freq[:amp[:phase]], repeatable");
  syn->add_option("--seed", seed, "Noise seed");

  auto* inf = app.add_subcommand("info", "Print the sidecar of an artifact file");
  inf->add_option("path", in, "Artifact file or its .sidecar")->required();

  std::size_t bench_channels = 30, bench_samples = 10000;
  double bench_rate = 1000.0, bench_target = 16000.0;
  auto* bch = app.add_subcommand("bench", "Time the exhaustive vs closed-form stacking");
  bch->add_option("--channels", bench_channels, "Channel count p");
  bch->add_option("--samples", bench_samples, "Samples per channel N");
  bch->add_option("--rate", bench_rate, "Source sample rate f_s in Hz");
  bch->add_option("--target-rate", bench_target, "Wideband sample rate F_s in Hz");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::kValidation);
  }

  try {
    if (*enc) return run_encode(in, out, rate, target, mode, order);
    if (*dec) return run_decode(in, out, compare, rate);
    if (*ver) return run_verify(in, rate, target, mode, order, threshold, json);
    if (*spc) return run_spectrogram(in, out, spec_opts);
    if (*syn) return run_synth(out, channels, samples, synth_rate, band, tones, seed);
    if (*inf) return run_info(in);
    if (*bch) return run_bench(bench_channels, bench_samples, bench_rate, bench_target);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kIo);
  }
  return 0;
}
