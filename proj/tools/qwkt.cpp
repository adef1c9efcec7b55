// qwkt: simulate, estimate, fisher, sweep, wkt-demo.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>

#include "qwkt/commands.hpp"
#include "qwkt/errors.hpp"

namespace {

using namespace qwkt::cli;

void add_source(CLI::App* cmd, SourceOptions& s) {
  cmd->add_option("--sigma-nm", s.sigma_nm, "Single-photon bandwidth in nm");
  cmd->add_option("--center-nm", s.center_nm, "Signal/idler center wavelength in nm");
  cmd->add_option("--pump-nm", s.pump_nm, "Pump wavelength in nm");
  cmd->add_option("--bins", s.bins, "Frequency bins over ±6·(2σ)");
}

struct AxisFlags {
  std::string spec;
  CLI::Option* scalar = nullptr;
  CLI::Option* axis = nullptr;
};

struct FisherFlags {
  FisherOptions opts;
  std::string variant = "two-port";
  std::string trials = "1";
  std::string out = "fisher.csv";
  std::string manifest;
  AxisFlags sigma, tau, gamma, alpha;
  double sigma_v = 20.0, tau_v = 0.5, gamma_v = 0.0, alpha_v = 1.0;
};

void add_fisher(CLI::App* cmd, FisherFlags& f) {
  cmd->add_option("--variant", f.variant, "two-port or paper-eq16");
  f.sigma.scalar = cmd->add_option("--sigma-nm", f.sigma_v, "Bandwidth in nm");
  f.sigma.axis = cmd->add_option("--sigma-axis", f.sigma.spec, "start:stop:count[nm]");
  f.tau.scalar = cmd->add_option("--tau-ps", f.tau_v, "Delay in ps");
  f.tau.axis = cmd->add_option("--tau-axis", f.tau.spec, "start:stop:count(ps|fs|s)");
  f.gamma.scalar = cmd->add_option("--gamma", f.gamma_v, "Loss γ");
  f.gamma.axis = cmd->add_option("--gamma-axis", f.gamma.spec, "start:stop:count");
  f.alpha.scalar = cmd->add_option("--alpha", f.alpha_v, "Visibility α");
  f.alpha.axis = cmd->add_option("--alpha-axis", f.alpha.spec, "start:stop:count");
  for (auto* a : {&f.sigma, &f.tau, &f.gamma, &f.alpha}) a->scalar->excludes(a->axis);
  cmd->add_option("--center-nm", f.opts.center_nm, "Center wavelength in nm");
  cmd->add_option("--pump-nm", f.opts.pump_nm, "Pump wavelength in nm");
  cmd->add_option("--trials", f.trials, "N for the bounds");
  cmd->add_option("--out", f.out, "Table CSV; trends go to <out>.trends.csv");
  cmd->add_option("--manifest", f.manifest, "Manifest path (default: <out>.manifest.json)");
}

std::vector<double> resolve(const AxisFlags& f, double scalar,
                            const std::vector<std::pair<std::string, double>>& units) {
  return *f.axis ? parse_axis(f.spec, units) : std::vector<double>{scalar};
}

// Threads for sweep cells: hardware concurrency, capped by QWKT_THREADS.
std::size_t sweep_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QWKT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) {
      throw qwkt::ConfigurationError("QWKT_THREADS: expected a positive integer, got '" + std::string(env) + "'");
    }
    n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrally resolved two-photon interference: simulation, delay estimation, Fisher bounds"};
  app.set_version_flag("--version", QWKT_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  // simulate
  SimulateOptions sim;
  double sim_tau_ps = 0.0;
  std::string sim_layers, sim_trials = "1e6", sim_variant = "two-port", sim_schema = "omega";
  std::string sim_out = sim.out.string(), sim_manifest;
  auto* simulate = app.add_subcommand("simulate", "Forward model: ideal or sampled coincidence spectrum");
  add_source(simulate, sim.source);
  auto* tau_opt = simulate->add_option("--tau-ps", sim_tau_ps, "Single-layer delay in ps");
  auto* layers_opt = simulate->add_option("--layers", sim_layers, "Layers as tau_ps:weight,... ");
  tau_opt->excludes(layers_opt);
  simulate->add_flag("--ideal", sim.ideal, "Write probabilities instead of sampled counts");
  simulate->add_option("--trials", sim_trials, "Trials to sample (accepts 1e6)");
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--gamma", sim.gamma, "Loss γ");
  simulate->add_option("--alpha", sim.alpha, "Visibility α");
  simulate->add_option("--phi", sim.phi, "Fringe phase in rad");
  simulate->add_option("--variant", sim_variant, "two-port or paper-eq16");
  simulate->add_option("--schema", sim_schema, "omega or wavelength");
  simulate->add_option("--out", sim_out, "Spectrum CSV");
  simulate->add_option("--manifest", sim_manifest, "Manifest path (default: <out>.manifest.json)");

  // estimate
  EstimateOptions est;
  std::string est_input, est_out = est.out.string(), est_manifest, est_trials;
  auto* estimate = app.add_subcommand("estimate", "Recover delays from a spectrum file");
  add_source(estimate, est.source);
  estimate->add_option("--input", est_input, "Spectrum CSV")->required();
  estimate->add_option("--out", est_out, "Result JSON; R(T) goes to <out>.correlation.csv");
  estimate->add_option("--manifest", est_manifest, "Manifest path (default: <out>.manifest.json)");
  estimate->add_flag("--mle", est.mle, "Refine by maximum likelihood (counts files)");
  estimate->add_option("--layers", est.layers, "Layers to fit with --mle");
  estimate->add_flag("--hann", est.hann, "Hann window before inversion");
  estimate->add_option("--threshold", est.threshold, "Peak threshold relative to the main peak");
  estimate->add_option("--gamma", est.gamma, "Loss γ for bounds");
  estimate->add_option("--alpha", est.alpha, "Visibility α for bounds and the fit");
  estimate->add_option("--trials", est_trials, "Trials for bounds (default: total counts)");

  // fisher and sweep take the same flags
  FisherFlags fisher_flags, sweep_flags;
  auto* fisher = app.add_subcommand("fisher", "Fisher information and Cramér-Rao bounds");
  add_fisher(fisher, fisher_flags);
  auto* sweep_cmd = app.add_subcommand("sweep", "Fisher information over at least one axis");
  add_fisher(sweep_cmd, sweep_flags);

  // wkt-demo
  WktDemoOptions demo;
  std::string demo_prefix = demo.out_prefix.string(), demo_manifest;
  auto* wkt = app.add_subcommand("wkt-demo", "Classical autocorrelation and power spectrum");
  wkt->add_option("--waveform", demo.waveform, "cosine, constant, gaussian-pulse or two-pulse");
  wkt->add_option("--samples", demo.samples, "Series length");
  wkt->add_option("--rate-hz", demo.rate_hz, "Sample rate in Hz");
  wkt->add_option("--frequency-hz", demo.frequency_hz, "Cosine frequency in Hz");
  wkt->add_option("--width-s", demo.width_s, "Pulse width in s");
  wkt->add_option("--separation-s", demo.separation_s, "Two-pulse spacing in s");
  wkt->add_option("--out-prefix", demo_prefix, "Writes <prefix>.signal/.autocorrelation/.power.csv");
  wkt->add_option("--manifest", demo_manifest, "Manifest path (default: <prefix>.manifest.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : config_error;
  }

  try {
    if (*simulate) {
      if (*tau_opt) {
        sim.layers_ps = {{sim_tau_ps, 1.0}};
      } else if (*layers_opt) {
        sim.layers_ps = parse_layers(sim_layers);
      }
      sim.trials = parse_count(sim_trials, "--trials");
      sim.variant = parse_variant(sim_variant);
      if (sim_schema == "omega") {
        sim.schema = qwkt::io::SpectrumSchema::omega_intensity;
      } else if (sim_schema == "wavelength") {
        sim.schema = qwkt::io::SpectrumSchema::wavelength_counts;
      } else {
        throw qwkt::ConfigurationError("--schema: expected omega or wavelength, got '" + sim_schema + "'");
      }
      sim.out = sim_out;
      if (!sim_manifest.empty()) sim.manifest = sim_manifest;
      return run_simulate(sim, std::cerr);
    }
    if (*estimate) {
      est.input = est_input;
      est.out = est_out;
      if (!est_manifest.empty()) est.manifest = est_manifest;
      if (!est_trials.empty()) est.trials = parse_count(est_trials, "--trials");
      return run_estimate(est, std::cerr);
    }
    if (*fisher || *sweep_cmd) {
      const bool is_sweep = static_cast<bool>(*sweep_cmd);
      auto& f = is_sweep ? sweep_flags : fisher_flags;
      auto& opts = f.opts;
      opts.command = is_sweep ? "sweep" : "fisher";
      opts.variant = parse_variant(f.variant);
      opts.trials = parse_count(f.trials, "--trials");
      opts.threads = sweep_threads();
      const std::vector<std::pair<std::string, double>> bare{{"", 1.0}};
      opts.sigma_nm = resolve(f.sigma, f.sigma_v, {{"nm", 1.0}, {"", 1.0}});
      opts.tau_ps = resolve(f.tau, f.tau_v, {{"ps", 1.0}, {"fs", 1e-3}, {"s", 1e12}, {"", 1.0}});
      opts.gamma = resolve(f.gamma, f.gamma_v, bare);
      opts.alpha = resolve(f.alpha, f.alpha_v, bare);
      if (is_sweep && !*f.sigma.axis && !*f.tau.axis && !*f.gamma.axis && !*f.alpha.axis) {
        throw qwkt::ConfigurationError(
            "sweep: give at least one of --sigma-axis, --tau-axis, --gamma-axis, --alpha-axis");
      }
      opts.out = f.out;
      if (!f.manifest.empty()) opts.manifest = f.manifest;
      return run_fisher(opts, std::cerr);
    }
    if (*wkt) {
      demo.out_prefix = demo_prefix;
      if (!demo_manifest.empty()) demo.manifest = demo_manifest;
      return run_wkt_demo(demo, std::cerr);
    }
  } catch (const qwkt::ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return config_error;
  }
  return config_error;
}
