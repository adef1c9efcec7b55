#pragma once

// The qwkt subcommands as library calls. Each returns a process exit code
// and reports problems on `err`; CLI parsing lives in tools/qwkt.cpp.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qwkt/hom.hpp"
#include "qwkt/io.hpp"

namespace qwkt::cli {

enum ExitCode : int { ok = 0, config_error = 2, input_error = 3, estimation_error = 4 };

/// Defaults follow the reference setup: 405 nm pump, 810 nm signal and
/// idler, 20 nm single-photon bandwidth.
struct SourceOptions {
  double sigma_nm = 20.0;
  double center_nm = 810.0;
  double pump_nm = 405.0;
  std::size_t bins = 4096;
};

struct SimulateOptions {
  SourceOptions source;
  std::vector<std::pair<double, double>> layers_ps;  ///< (delay ps, weight)
  bool ideal = false;
  std::uint64_t trials = 1000000;
  std::uint64_t seed = 1;
  double gamma = 0.0;
  double alpha = 1.0;
  double phi = 0.0;
  DetectionVariant variant = DetectionVariant::two_port;
  io::SpectrumSchema schema = io::SpectrumSchema::omega_intensity;
  std::filesystem::path out = "spectrum.csv";
  std::optional<std::filesystem::path> manifest;
};

struct EstimateOptions {
  SourceOptions source;
  std::filesystem::path input;
  std::filesystem::path out = "estimate.json";
  std::optional<std::filesystem::path> manifest;
  bool mle = false;
  std::size_t layers = 1;
  bool hann = false;
  double threshold = 0.02;
  double gamma = 0.0;
  double alpha = 1.0;
  std::optional<std::uint64_t> trials;  ///< for bounds; defaults to the total counts
};

struct FisherOptions {
  std::vector<double> sigma_nm{20.0};
  std::vector<double> tau_ps{0.5};
  std::vector<double> gamma{0.0};
  std::vector<double> alpha{1.0};
  double center_nm = 810.0;
  double pump_nm = 405.0;
  DetectionVariant variant = DetectionVariant::two_port;
  std::uint64_t trials = 1;
  std::size_t threads = 1;
  std::string command = "fisher";
  std::filesystem::path out = "fisher.csv";
  std::optional<std::filesystem::path> manifest;
};

struct WktDemoOptions {
  std::string waveform = "cosine";  ///< cosine, constant, gaussian-pulse, two-pulse
  std::size_t samples = 1024;
  double rate_hz = 1000.0;
  double frequency_hz = 50.0;      ///< cosine frequency
  double width_s = 0.01;           ///< pulse width
  double separation_s = 0.1;       ///< two-pulse spacing
  std::filesystem::path out_prefix = "wkt";
  std::optional<std::filesystem::path> manifest;
};

int run_simulate(const SimulateOptions& opts, std::ostream& err);
int run_estimate(const EstimateOptions& opts, std::ostream& err);
int run_fisher(const FisherOptions& opts, std::ostream& err);
int run_wkt_demo(const WktDemoOptions& opts, std::ostream& err);

/// `start:stop:count[unit]`, linearly spaced, in the caller's unit after
/// scaling by the unit factor. An empty unit is accepted when `units` holds
/// "". Count 0 gives an empty axis. Throws ConfigurationError.
std::vector<double> parse_axis(std::string_view spec,
                               const std::vector<std::pair<std::string, double>>& units);

/// `tau:weight,tau:weight,...` in ps; weights default to equal shares.
std::vector<std::pair<double, double>> parse_layers(std::string_view spec);

/// Accepts integer or exponent notation ("1e6"); throws ConfigurationError
/// unless the value is a whole number in 1..2^53.
std::uint64_t parse_count(std::string_view text, std::string_view field);

DetectionVariant parse_variant(std::string_view text);
std::string_view variant_name(DetectionVariant v);

}  // namespace qwkt::cli
