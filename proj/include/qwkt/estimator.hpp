#pragma once

// Delay inference from spectrally resolved coincidences: Fourier-inversion
// peak picking, maximum-likelihood refinement, classical and quantum Fisher
// information, and Cartesian parameter sweeps.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qwkt/biphoton.hpp"
#include "qwkt/hom.hpp"
#include "qwkt/spectral.hpp"

namespace qwkt {

struct RecoveredDelay {
  double tau;     ///< seconds
  double weight;  ///< renormalized over all recovered delays
  double height;  ///< |R| at the peak relative to the main peak
};

struct PeakReport {
  std::vector<RecoveredDelay> delays;  ///< ascending in tau
  bool ambiguity_flag = false;
  double grid_resolution = 0.0;  ///< temporal grid step, seconds
};

struct PeakOptions {
  double threshold = 0.02;           ///< relative to the main-peak height
  std::size_t min_separation = 2;    ///< grid steps between accepted maxima
  double overlap_widths = 3.0;       ///< side peaks below this many 1/Δ overlap the main peak
  InverseOptions inverse{};
};

/// Inverts the spectrum and picks the side peaks of |R(T)| for T > 0.
///
/// Throws MalformedSpectrumError when the largest |R| is not within two
/// grid steps of T = 0 (or the spectrum is empty).
PeakReport extract_delays(const SpectralPattern& spectrum, const BiphotonSource& source,
                          const PeakOptions& options = {});

struct FittedLayer {
  double tau;
  double weight;
  double tau_stderr;
  double weight_stderr;
};

struct MleResult {
  std::vector<FittedLayer> layers;  ///< ascending in tau, weights sum to 1
  double log_likelihood = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  /// Any fitted weight below 1e-3: more layers than the data supports.
  bool near_zero_weight = false;
};

struct MleOptions {
  std::size_t grid_half_steps = 10;  ///< coarse search ±this many temporal grid steps
  std::size_t max_iterations = 500;
  double tolerance_widths = 1e-4;    ///< parameter tolerance in units of 1/Δ
  ForwardModelConfig fringe{};
};

/// Multinomial maximum-likelihood fit of k layers to sampled counts.
///
/// Delays and weights are fitted; loss, visibility, bandwidth and trial
/// count are taken from the inputs. A table without bunched counts is
/// fitted with the coincidence-conditional likelihood, which does not
/// depend on loss. Throws InputError for tables without counts or with
/// zero total counts, or k outside 1..4.
MleResult mle_fit(const OutcomeTable& counts, const DetectionModel& model,
                  const BiphotonSource& source, std::size_t k_layers,
                  const std::optional<PeakReport>& init = std::nullopt,
                  const MleOptions& options = {});

/// Multinomial log-likelihood of the counts at given delays and weights.
double log_likelihood(const OutcomeTable& counts, const DetectionModel& model,
                      const BiphotonSource& source, std::span<const double> taus,
                      std::span<const double> weights, const ForwardModelConfig& fringe = {});

struct FisherReport {
  double g_omega = 0.0;  ///< per-trial Fisher information, 1/s²
  double crb = 0.0;      ///< 1/√(N·g_omega), +inf when g_omega is 0
  DetectionVariant variant;
  double sigma;
  double tau;
  double gamma;
  double alpha;
  std::uint64_t n_trials;
};

/// Fisher information about a single delay, integrated over |ω| <= 6·(2σ).
///
/// two_port integrates (1-γ)²·env_pdf·α²ω²sin²(ωτ)/(1 - α²cos²(ωτ));
/// paper_eq16 sums the printed P2, P1 and P0 terms with the peak-1
/// envelope. Throws NumericalError if the quadrature misses 1e-8 relative.
FisherReport fisher_information(const BiphotonSource& source, double tau,
                                const DetectionModel& model);

struct QfiReport {
  double q;             ///< 1/s², closed-form variance of the Gaussian model
  double q_quadrature;  ///< the same variance by adaptive quadrature
  double qcrb;          ///< 1/(2√(N·q)), seconds
  std::uint64_t n_trials;
};

/// Quantum Fisher information of the delay phase e^{-iω_i τ}: the variance
/// of the idler frequency over the joint spectral density in the
/// monochromatic-pump limit, (2σ)²/4 = σ², also integrated numerically.
QfiReport quantum_fisher_information(const BiphotonSource& source, std::uint64_t n_trials);

struct SweepAxes {
  std::vector<double> sigma;  ///< rad/s
  std::vector<double> tau;    ///< seconds
  std::vector<double> gamma;
  std::vector<double> alpha;
};

struct SweepCell {
  std::size_t sigma_index, tau_index, gamma_index, alpha_index;
  std::variant<FisherReport, std::string> result;  ///< report or error text

  bool ok() const noexcept { return std::holds_alternative<FisherReport>(result); }
};

enum class Trend { constant, increasing, decreasing, nondecreasing, nonincreasing, mixed };

/// Trend of g_omega along one axis with the other three indices fixed.
struct LineTrend {
  std::size_t axis;  ///< 0 sigma, 1 tau, 2 gamma, 3 alpha
  std::size_t sigma_index, tau_index, gamma_index, alpha_index;  ///< the moving one is unused
  Trend trend;
};

struct SweepTable {
  DetectionVariant variant;
  std::vector<SweepCell> cells;  ///< sigma-major, then tau, gamma, alpha
  std::vector<LineTrend> trends;

  std::size_t ok_count() const noexcept;
};

struct SweepOptions {
  DetectionVariant variant = DetectionVariant::two_port;
  std::uint64_t n_trials = 1;
  double center_wavelength = 810e-9;
  double pump_wavelength = 405e-9;
  std::size_t threads = 1;  ///< cells evaluated concurrently; results do not depend on it
};

/// Cartesian evaluation of fisher_information. Failing cells carry their
/// error text instead of aborting the sweep. Any empty axis gives an empty
/// table. Throws DomainError for axes longer than 256 or non-finite values.
SweepTable sweep(const SweepAxes& axes, const SweepOptions& options = {});

/// Classifies a sequence; values within 1e-6 relative of each other count as equal.
Trend classify_trend(std::span<const double> values);

}  // namespace qwkt
