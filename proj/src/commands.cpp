#include "qwkt/commands.hpp"

#include <chrono>
#include <cmath>
#include <charconv>
#include <numbers>
#include <ostream>
#include "json.hpp"

#include "qwkt/biphoton.hpp"
#include "qwkt/errors.hpp"
#include "qwkt/estimator.hpp"
#include "qwkt/spectral.hpp"

#ifndef QWKT_VERSION
#define QWKT_VERSION "0.0.0"
#endif

namespace qwkt::cli {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

struct Artifact {
  fs::path path;
  std::string digest;
};

class Manifest {
 public:
  Manifest(std::string command, std::optional<fs::path> path, fs::path fallback)
      : command_(std::move(command)), start_(Clock::now()) {
    if (path) {
      path_ = *path;
    } else {
      path_ = fallback;
      path_ += ".manifest.json";
    }
  }

  json& config() { return config_; }
  void seed(std::uint64_t s) { seed_ = s; }
  void input(const fs::path& p, std::string_view content) { inputs_.push_back({p, io::sha256_hex(content)}); }

  void output(const fs::path& p, std::string_view content) {
    io::write_atomic(p, content);
    outputs_.push_back({p, io::sha256_hex(content)});
  }

  void write() const {
    json m;
    m["command"] = command_;
    m["software_version"] = QWKT_VERSION;
    m["configuration"] = config_;
    m["seed"] = seed_ ? json(*seed_) : json(nullptr);
    auto list = [](const std::vector<Artifact>& xs) {
      json a = json::array();
      for (const auto& x : xs) a.push_back({{"path", x.path.string()}, {"sha256", x.digest}});
      return a;
    };
    m["inputs"] = list(inputs_);
    m["outputs"] = list(outputs_);
    m["wall_clock_seconds"] = std::chrono::duration<double>(Clock::now() - start_).count();
    io::write_atomic(path_, m.dump(2) + "\n");
  }

 private:
  std::string command_;
  Clock::time_point start_;
  fs::path path_;
  json config_ = json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<Artifact> inputs_;
  std::vector<Artifact> outputs_;
};

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigurationError& e) {
    err << "configuration error: " << e.what() << '\n';
    return config_error;
  } catch (const DomainError& e) {
    err << "configuration error: " << e.what() << '\n';
    return config_error;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return input_error;
  } catch (const std::exception& e) {
    err << "estimation error: " << e.what() << '\n';
    return estimation_error;
  }
}

void require(bool ok, std::string_view field, std::string_view what) {
  if (!ok) throw ConfigurationError(std::string(field) + ": " + std::string(what));
}

BiphotonSource make_source(const SourceOptions& s) {
  require(s.sigma_nm > 0.0 && std::isfinite(s.sigma_nm), "--sigma-nm", "must be positive");
  require(s.center_nm > 0.0 && std::isfinite(s.center_nm), "--center-nm", "must be positive");
  require(s.pump_nm > 0.0 && std::isfinite(s.pump_nm), "--pump-nm", "must be positive");
  require(std::abs(2.0 / s.center_nm - 1.0 / s.pump_nm) <= 1e-6 / s.pump_nm, "--pump-nm",
          "must be half the center wavelength (energy conservation)");
  require(s.bins >= 16 && s.bins % 2 == 0, "--bins", "must be even and at least 16");
  return BiphotonSource::from_bandwidth_nm(s.sigma_nm, s.center_nm, s.pump_nm);
}

json source_json(const BiphotonSource& src, const SourceOptions& s) {
  return {{"sigma_rad_per_s", src.sigma_spectral()},
          {"center_wavelength_m", src.center_wavelength_signal()},
          {"pump_wavelength_m", src.pump_wavelength()},
          {"bins", s.bins}};
}

double parse_double(std::string_view text, std::string_view field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigurationError(std::string(field) + ": not a number: '" + std::string(text) + "'");
  }
  return v;
}

fs::path with_suffix(fs::path p, std::string_view suffix) {
  p += suffix;
  return p;
}

}  // namespace

std::string_view variant_name(DetectionVariant v) {
  return v == DetectionVariant::two_port ? "two-port" : "paper-eq16";
}

DetectionVariant parse_variant(std::string_view text) {
  if (text == "two-port") return DetectionVariant::two_port;
  if (text == "paper-eq16") return DetectionVariant::paper_eq16;
  throw ConfigurationError("--variant: expected two-port or paper-eq16, got '" + std::string(text) + "'");
}

std::uint64_t parse_count(std::string_view text, std::string_view field) {
  const double v = parse_double(text, field);
  require(v >= 1.0 && v <= 9007199254740992.0 && v == std::floor(v), field,
          "must be a whole number between 1 and 2^53");
  return static_cast<std::uint64_t>(v);
}

std::vector<double> parse_axis(std::string_view spec,
                               const std::vector<std::pair<std::string, double>>& units) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    throw ConfigurationError("axis '" + std::string(spec) + "': expected start:stop:count[unit]");
  }
  std::string_view tail = spec.substr(c2 + 1);
  std::size_t digits = 0;
  while (digits < tail.size() && tail[digits] >= '0' && tail[digits] <= '9') ++digits;
  const std::string unit(tail.substr(digits));
  double scale = 0.0;
  for (const auto& [name, factor] : units) {
    if (name == unit) scale = factor;
  }
  if (scale == 0.0) throw ConfigurationError("axis '" + std::string(spec) + "': unknown unit '" + unit + "'");
  if (digits == 0) throw ConfigurationError("axis '" + std::string(spec) + "': missing count");

  const double start = parse_double(spec.substr(0, c1), "axis start");
  const double stop = parse_double(spec.substr(c1 + 1, c2 - c1 - 1), "axis stop");
  std::size_t count = 0;
  std::from_chars(tail.data(), tail.data() + digits, count);
  if (count > 256) throw ConfigurationError("axis '" + std::string(spec) + "': at most 256 points");

  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out.push_back((start + t * (stop - start)) * scale);
  }
  return out;
}

std::vector<std::pair<double, double>> parse_layers(std::string_view spec) {
  std::vector<std::pair<double, double>> out;
  bool any_weight = false;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    const auto item = spec.substr(0, comma);
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
    const auto colon = item.find(':');
    const double tau = parse_double(item.substr(0, colon), "--layers delay");
    double weight = 1.0;
    if (colon != std::string_view::npos) {
      weight = parse_double(item.substr(colon + 1), "--layers weight");
      any_weight = true;
    }
    require(tau > 0.0, "--layers", "delays must be positive");
    require(weight > 0.0, "--layers", "weights must be positive");
    out.emplace_back(tau, weight);
  }
  require(!out.empty(), "--layers", "needs at least one delay");
  if (!any_weight) {
    for (auto& l : out) l.second = 1.0 / static_cast<double>(out.size());
  }
  return out;
}

int run_simulate(const SimulateOptions& o, std::ostream& err) {
  return guarded(err, [&] {
    Manifest manifest("simulate", o.manifest, o.out);
    const auto source = make_source(o.source);
    require(!o.layers_ps.empty(), "--tau-ps/--layers", "give a delay or a layer list");
    require(o.gamma >= 0.0 && o.gamma < 1.0, "--gamma", "must satisfy 0 <= gamma < 1");
    require(o.alpha >= 0.0 && o.alpha <= 1.0, "--alpha", "must satisfy 0 <= alpha <= 1");
    require(std::isfinite(o.phi), "--phi", "must be finite");

    std::vector<Layer> layers;
    for (const auto& [tau, w] : o.layers_ps) layers.push_back({tau / 1e12, w});
    const auto profile = DelayProfile::normalized(layers);
    const auto grid = FrequencyGrid::for_source(source, o.source.bins);
    const DetectionModel model(grid, o.gamma, o.alpha, o.trials, o.variant);
    const auto table = outcome_probabilities(model, source, profile, {o.phi, FringeSign::plus});
    const auto pattern = o.ideal ? SpectralPattern(grid, table.coincidence, SpectrumKind::ideal_density)
                                 : sample_counts(table, o.trials, o.seed).coincidence_spectrum();

    auto file = io::from_pattern(pattern, o.schema, source.pump_wavelength());
    file.comments.push_back("qwkt simulate " + std::string(QWKT_VERSION));
    file.comments.push_back(o.schema == io::SpectrumSchema::omega_intensity
                                ? "abscissa: difference frequency 2*omega_s - omega_p in rad/s"
                                : "abscissa: signal wavelength in nm");
    file.comments.push_back(std::string("values: ") +
                            (o.ideal ? "coincidence probability per bin" : "sampled coincidence counts"));
    file.comments.push_back("source: bandwidth " + io::format_double(o.source.sigma_nm) + " nm at " +
                            io::format_double(o.source.center_nm) + " nm, pump " +
                            io::format_double(o.source.pump_nm) + " nm");
    std::string lay = "layers (delay ps:weight):";
    for (const auto& l : profile.layers()) {
      lay += " " + io::format_double(l.tau * 1e12) + ":" + io::format_double(l.weight);
    }
    file.comments.push_back(lay);

    auto& cfg = manifest.config();
    cfg["source"] = source_json(source, o.source);
    cfg["layers"] = json::array();
    for (const auto& l : profile.layers()) cfg["layers"].push_back({{"tau_s", l.tau}, {"weight", l.weight}});
    cfg["ideal"] = o.ideal;
    cfg["n_trials"] = o.trials;
    cfg["gamma"] = o.gamma;
    cfg["alpha"] = o.alpha;
    cfg["phi_rad"] = o.phi;
    cfg["variant"] = variant_name(o.variant);
    cfg["schema"] = o.schema == io::SpectrumSchema::omega_intensity ? "omega_rad_per_s,intensity"
                                                                    : "wavelength_nm,counts";
    if (!o.ideal) manifest.seed(o.seed);

    manifest.output(o.out, io::render_spectrum(file));
    manifest.write();
    return int{ok};
  });
}

int run_estimate(const EstimateOptions& o, std::ostream& err) {
  return guarded(err, [&] {
    Manifest manifest("estimate", o.manifest, o.out);
    const auto source = make_source(o.source);
    require(o.layers >= 1 && o.layers <= 4, "--layers", "must be between 1 and 4");
    require(o.threshold > 0.0 && o.threshold < 1.0, "--threshold", "must lie in (0, 1)");
    require(o.gamma >= 0.0 && o.gamma < 1.0, "--gamma", "must satisfy 0 <= gamma < 1");
    require(o.alpha >= 0.0 && o.alpha <= 1.0, "--alpha", "must satisfy 0 <= alpha <= 1");

    const std::string text = io::read_text(o.input);
    manifest.input(o.input, text);
    const auto file = io::parse_spectrum(text);
    const auto pattern = io::to_pattern(file, source.pump_wavelength());

    auto& cfg = manifest.config();
    cfg["source"] = source_json(source, o.source);
    cfg["input"] = o.input.string();
    cfg["mle"] = o.mle;
    cfg["layers"] = o.layers;
    cfg["hann_window"] = o.hann;
    cfg["threshold"] = o.threshold;
    cfg["gamma"] = o.gamma;
    cfg["alpha"] = o.alpha;

    json result;
    result["schema_version"] = 1;
    result["command"] = "estimate";
    result["input"] = o.input.string();
    result["source"] = source_json(source, o.source);

    PeakOptions peak_opts;
    peak_opts.threshold = o.threshold;
    peak_opts.inverse.hann_window = o.hann;
    const auto r = inverse_qwkt(pattern, peak_opts.inverse);
    {
      std::string csv = "# R(T) from the inverse transform of '" + o.input.string() + "'\n# T in seconds\n";
      csv += "T_s,real,imag,magnitude\n";
      const auto& tg = r.grid();
      const auto v = r.values();
      for (std::size_t k = 0; k < tg.size(); ++k) {
        csv += io::format_double(tg[k]) + "," + io::format_double(v[k].real()) + "," +
               io::format_double(v[k].imag()) + "," + io::format_double(std::abs(v[k])) + "\n";
      }
      const auto sidecar = with_suffix(o.out, ".correlation.csv");
      manifest.output(sidecar, csv);
      result["correlation_csv"] = sidecar.string();
    }

    auto finish = [&](int code) {
      manifest.output(o.out, result.dump(2) + "\n");
      manifest.write();
      return code;
    };

    PeakReport peaks;
    try {
      peaks = extract_delays(pattern, source, peak_opts);
    } catch (const MalformedSpectrumError& e) {
      result["error"] = e.what();
      err << "estimation error: " << e.what() << '\n';
      return finish(estimation_error);
    }
    json pj;
    pj["grid_resolution_s"] = peaks.grid_resolution;
    pj["ambiguity_flag"] = peaks.ambiguity_flag;
    pj["delays"] = json::array();
    for (const auto& d : peaks.delays) {
      pj["delays"].push_back({{"tau_s", d.tau}, {"weight", d.weight}, {"height", d.height}});
    }
    result["peaks"] = pj;

    const std::uint64_t n_trials =
        o.trials ? *o.trials
                 : (pattern.kind() == SpectrumKind::counts
                        ? std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(pattern.total())))
                        : 1);
    cfg["n_trials"] = n_trials;

    try {
      const DetectionModel model(pattern.grid(), o.gamma, o.alpha, n_trials, DetectionVariant::two_port);
      const auto qfi = quantum_fisher_information(source, n_trials);
      json bounds;
      bounds["n_trials"] = n_trials;
      bounds["q"] = qfi.q;
      bounds["q_quadrature"] = qfi.q_quadrature;
      bounds["qcrb_s"] = qfi.qcrb;
      bounds["per_delay"] = json::array();
      for (const auto& d : peaks.delays) {
        const auto fr = fisher_information(source, d.tau, model);
        bounds["per_delay"].push_back({{"tau_s", d.tau}, {"g_omega", fr.g_omega}, {"crb_s", fr.crb}});
      }
      result["bounds"] = bounds;

      if (o.mle) {
        if (pattern.kind() != SpectrumKind::counts) {
          throw InputError("--mle needs a counts spectrum (integer values)");
        }
        OutcomeCounts counts;
        counts.n_trials = n_trials;
        for (double v : pattern.intensity()) counts.coincidence.push_back(static_cast<std::uint64_t>(v));
        OutcomeTable table{DetectionVariant::two_port, pattern.grid(),
                           std::vector<double>(pattern.grid().size(), 0.0), {}, {}, 0.0, 0.0, counts};
        const auto fit = mle_fit(table, model, source, o.layers, peaks);
        json mj;
        mj["likelihood"] = "coincidence-conditional multinomial";
        mj["log_likelihood"] = fit.log_likelihood;
        mj["converged"] = fit.converged;
        mj["iterations"] = fit.iterations;
        mj["near_zero_weight"] = fit.near_zero_weight;
        mj["layers"] = json::array();
        for (const auto& l : fit.layers) {
          mj["layers"].push_back({{"tau_s", l.tau},
                                  {"weight", l.weight},
                                  {"tau_stderr_s", std::isfinite(l.tau_stderr) ? json(l.tau_stderr) : json(nullptr)},
                                  {"weight_stderr",
                                   std::isfinite(l.weight_stderr) ? json(l.weight_stderr) : json(nullptr)}});
        }
        result["mle"] = mj;
      }
    } catch (const InputError& e) {
      result["error"] = e.what();
      err << "input error: " << e.what() << '\n';
      return finish(input_error);
    } catch (const Error& e) {
      result["error"] = e.what();
      err << "estimation error: " << e.what() << '\n';
      return finish(estimation_error);
    }
    return finish(ok);
  });
}

int run_fisher(const FisherOptions& o, std::ostream& err) {
  return guarded(err, [&] {
    Manifest manifest(o.command, o.manifest, o.out);
    require(o.center_nm > 0.0, "--center-nm", "must be positive");
    require(std::abs(2.0 / o.center_nm - 1.0 / o.pump_nm) <= 1e-6 / o.pump_nm, "--pump-nm",
            "must be half the center wavelength (energy conservation)");
    for (double v : o.sigma_nm) require(v > 0.0 && std::isfinite(v), "--sigma-nm", "bandwidths must be positive");
    for (double v : o.tau_ps) require(std::isfinite(v), "--tau-ps", "delays must be finite");
    for (double v : o.gamma) require(v >= 0.0 && v < 1.0, "--gamma", "must satisfy 0 <= gamma < 1");
    for (double v : o.alpha) require(v >= 0.0 && v <= 1.0, "--alpha", "must satisfy 0 <= alpha <= 1");

    SweepAxes axes;
    for (double v : o.sigma_nm) axes.sigma.push_back(bandwidth_nm_to_rads(v / 1e9, o.center_nm / 1e9));
    for (double v : o.tau_ps) axes.tau.push_back(v / 1e12);
    axes.gamma = o.gamma;
    axes.alpha = o.alpha;

    SweepOptions so;
    so.variant = o.variant;
    so.n_trials = o.trials;
    so.center_wavelength = o.center_nm / 1e9;
    so.pump_wavelength = o.pump_nm / 1e9;
    so.threads = std::max<std::size_t>(1, o.threads);
    const auto table = sweep(axes, so);

    std::vector<double> qcrb;
    for (double s : axes.sigma) {
      qcrb.push_back(quantum_fisher_information(
                         BiphotonSource(s, so.center_wavelength, so.center_wavelength, so.pump_wavelength),
                         o.trials)
                         .qcrb);
    }

    std::string csv = "# qwkt " + o.command + " " + QWKT_VERSION + "\n";
    csv += "# sigma in rad/s from bandwidth in nm at center " + io::format_double(o.center_nm) +
           " nm; tau in s from ps; g_omega in 1/s^2 per trial; crb and qcrb in s for n_trials " +
           std::to_string(o.trials) + "\n";
    csv += "sigma_rad_per_s,tau_s,gamma,alpha,variant,g_omega,crb,qcrb,error\n";
    for (const auto& cell : table.cells) {
      csv += io::format_double(axes.sigma[cell.sigma_index]) + "," + io::format_double(axes.tau[cell.tau_index]) +
             "," + io::format_double(axes.gamma[cell.gamma_index]) + "," +
             io::format_double(axes.alpha[cell.alpha_index]) + "," + std::string(variant_name(o.variant)) + ",";
      if (cell.ok()) {
        const auto& r = std::get<FisherReport>(cell.result);
        csv += io::format_double(r.g_omega) + "," + io::format_double(r.crb) + "," +
               io::format_double(qcrb[cell.sigma_index]) + ",\n";
      } else {
        std::string msg = std::get<std::string>(cell.result);
        for (auto& ch : msg) {
          if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
        }
        csv += ",," + io::format_double(qcrb[cell.sigma_index]) + "," + msg + "\n";
      }
    }

    static constexpr const char* kTrend[] = {"constant", "increasing", "decreasing",
                                             "nondecreasing", "nonincreasing", "mixed"};
    static constexpr const char* kAxis[] = {"sigma", "tau", "gamma", "alpha"};
    std::string trends = "# g_omega along one axis with the other indices fixed; the moving index is -1\n";
    trends += "axis,sigma_index,tau_index,gamma_index,alpha_index,trend\n";
    for (const auto& t : table.trends) {
      auto idx = [&](std::size_t axis, std::size_t v) { return t.axis == axis ? std::string("-1") : std::to_string(v); };
      trends += std::string(kAxis[t.axis]) + "," + idx(0, t.sigma_index) + "," + idx(1, t.tau_index) + "," +
                idx(2, t.gamma_index) + "," + idx(3, t.alpha_index) + "," + kTrend[static_cast<int>(t.trend)] +
                "\n";
    }

    auto& cfg = manifest.config();
    cfg["variant"] = variant_name(o.variant);
    cfg["n_trials"] = o.trials;
    cfg["center_wavelength_m"] = so.center_wavelength;
    cfg["pump_wavelength_m"] = so.pump_wavelength;
    cfg["sigma_rad_per_s"] = axes.sigma;
    cfg["tau_s"] = axes.tau;
    cfg["gamma"] = axes.gamma;
    cfg["alpha"] = axes.alpha;

    manifest.output(o.out, csv);
    manifest.output(with_suffix(o.out, ".trends.csv"), trends);
    manifest.write();

    if (table.cells.empty() || table.ok_count() > 0) return int{ok};
    err << "estimation error: every cell failed; see the error column\n";
    return int{estimation_error};
  });
}

int run_wkt_demo(const WktDemoOptions& o, std::ostream& err) {
  return guarded(err, [&] {
    Manifest manifest("wkt-demo", o.manifest, o.out_prefix);
    require(o.rate_hz > 0.0 && std::isfinite(o.rate_hz), "--rate-hz", "must be positive");
    require(o.samples >= 16, "--samples", "must be at least 16");
    require(o.width_s > 0.0, "--width-s", "must be positive");

    const double t_center = 0.5 * static_cast<double>(o.samples) / o.rate_hz;
    auto pulse = [&](double t) { return std::exp(-t * t / (2.0 * o.width_s * o.width_s)); };
    std::vector<double> x(o.samples);
    for (std::size_t i = 0; i < o.samples; ++i) {
      const double t = static_cast<double>(i) / o.rate_hz;
      if (o.waveform == "cosine") {
        x[i] = std::cos(2.0 * std::numbers::pi * o.frequency_hz * t);
      } else if (o.waveform == "constant") {
        x[i] = 1.0;
      } else if (o.waveform == "gaussian-pulse") {
        x[i] = pulse(t - t_center);
      } else if (o.waveform == "two-pulse") {
        x[i] = pulse(t - t_center + 0.5 * o.separation_s) + pulse(t - t_center - 0.5 * o.separation_s);
      } else {
        throw ConfigurationError("--waveform: expected cosine, constant, gaussian-pulse or two-pulse, got '" +
                                 o.waveform + "'");
      }
    }
    const auto wkt = classical_wkt(x, o.rate_hz);

    std::string signal = "# time in s\nt_s,x\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
      signal += io::format_double(static_cast<double>(i) / o.rate_hz) + "," + io::format_double(x[i]) + "\n";
    }
    std::string acf = "# biased lag-sum autocorrelation; lag in s\nlag_s,autocorrelation\n";
    for (std::size_t m = 0; m < wkt.autocorrelation.size(); ++m) {
      acf += io::format_double(wkt.lag_time(m)) + "," + io::format_double(wkt.autocorrelation[m]) + "\n";
    }
    std::string psd = "# power spectrum of the autocorrelation; frequency in Hz\nfrequency_hz,power\n";
    for (std::size_t k = 0; k < wkt.power.size(); ++k) {
      psd += io::format_double(wkt.frequency(k)) + "," + io::format_double(wkt.power[k]) + "\n";
    }

    auto& cfg = manifest.config();
    cfg["waveform"] = o.waveform;
    cfg["samples"] = o.samples;
    cfg["sample_rate_hz"] = o.rate_hz;
    cfg["frequency_hz"] = o.frequency_hz;
    cfg["width_s"] = o.width_s;
    cfg["separation_s"] = o.separation_s;

    manifest.output(with_suffix(o.out_prefix, ".signal.csv"), signal);
    manifest.output(with_suffix(o.out_prefix, ".autocorrelation.csv"), acf);
    manifest.output(with_suffix(o.out_prefix, ".power.csv"), psd);
    manifest.write();
    return int{ok};
  });
}

}  // namespace qwkt::cli
