#pragma once

// Hong–Ou–Mandel interferometer physics: the biphoton spectral amplitude, the
// beam-splitter anti-bunching amplitude, the coincidence probability, the
// loss/visibility outcome model and Monte-Carlo count generation.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qwkt/biphoton.hpp"
#include "qwkt/grid.hpp"
#include "qwkt/spectral.hpp"

namespace qwkt {

/// Gaussian biphoton spectral amplitude f(ω_s, ω_i), unit-normalized.
///
/// |f|² is Gaussian in the difference frequency Ω = ω_s - ω_i with standard
/// deviation 2σ about Ω0 = ω_s0 - ω_i0, and Gaussian in the sum frequency
/// with the pump bandwidth about ω_p. When @p symmetrize is set and Ω0 ≠ 0
/// the amplitude is the normalized sum of the lobes at ±Ω0.
class JointAmplitude {
 public:
  /// A non-positive @p pump_bandwidth selects the narrowband default 1e-3·σ.
  explicit JointAmplitude(const BiphotonSource& source, double pump_bandwidth = 0.0,
                          bool symmetrize = false);

  double operator()(double omega_s, double omega_i) const noexcept;

  bool symmetric() const noexcept { return symmetrize_ || center_difference_ == 0.0; }
  double difference_sigma() const noexcept { return difference_sigma_; }
  double pump_bandwidth() const noexcept { return pump_bandwidth_; }
  double center_difference() const noexcept { return center_difference_; }
  double pump_frequency() const noexcept { return pump_frequency_; }

 private:
  double difference_sigma_;
  double pump_bandwidth_;
  double center_difference_;
  double pump_frequency_;
  bool symmetrize_;
  double amplitude_;
};

/// Anti-bunched (one photon per output port) amplitude after the beam
/// splitter: (1/2)[f(ω_s, ω_i) - f(ω_i, ω_s) e^{-i(ω_s - ω_i)τ}].
std::complex<double> antibunch_amplitude(const JointAmplitude& f, double tau, double omega_s,
                                         double omega_i) noexcept;

/// Normalized coincidence probability of the symmetric Gaussian state,
/// (1 - exp(-2σ²τ²))/2.
double coincidence_probability(const BiphotonSource& source, double tau) noexcept;

enum class DetectionVariant {
  /// Three outcomes per ω exactly as printed (coincidence, bunching, total
  /// loss) with the envelope scaled to peak 1; every ω is its own trinomial.
  paper_eq16,
  /// One distribution over spectrally resolved anti-bunched and bunched
  /// pairs plus single-click and no-click aggregates.
  two_port,
};

struct DetectionModel {
  /// Throws DomainError unless 0 <= gamma < 1, 0 <= alpha <= 1 and n_trials >= 1.
  DetectionModel(FrequencyGrid grid, double gamma = 0.0, double alpha = 1.0,
                 std::uint64_t n_trials = 1, DetectionVariant variant = DetectionVariant::two_port);

  FrequencyGrid grid;
  double gamma;
  double alpha;
  std::uint64_t n_trials;
  DetectionVariant variant;
};

struct OutcomeCounts {
  std::uint64_t n_trials = 0;
  std::vector<std::uint64_t> coincidence;
  std::vector<std::uint64_t> bunched;
  std::vector<std::uint64_t> lost;  ///< per-bin total loss, paper_eq16 only
  std::uint64_t single_click = 0;
  std::uint64_t no_click = 0;

  std::uint64_t total() const noexcept;
};

/// Outcome probabilities on a frequency grid, optionally with sampled counts.
///
/// two_port: coincidence[j] and bunched[j] are per-bin probabilities; with
/// single_click and no_click the table sums to 1.
/// paper_eq16: coincidence[j] = P2(ω_j), bunched[j] = P1(ω_j), lost[j] = P0;
/// each bin sums to 1 on its own.
struct OutcomeTable {
  DetectionVariant variant;
  FrequencyGrid grid;
  std::vector<double> coincidence;
  std::vector<double> bunched;
  std::vector<double> lost;
  double single_click = 0.0;
  double no_click = 0.0;
  std::optional<OutcomeCounts> counts;

  /// Sum over every outcome (two_port), or the worst per-bin sum (paper_eq16).
  double total_probability() const noexcept;

  /// Coincidence channel as a spectrum: counts when sampled, probabilities otherwise.
  SpectralPattern coincidence_spectrum() const;
};

/// Masses of env_pdf over each grid bin, renormalized to sum to 1 over the window.
std::vector<double> envelope_bin_masses(const BiphotonSource& source, const FrequencyGrid& grid);

/// Asymmetric windows never reach here: FrequencyGrid rejects them with a
/// ConfigurationError when it is built.
OutcomeTable outcome_probabilities(const DetectionModel& model, const BiphotonSource& source,
                                   const DelayProfile& profile,
                                   const ForwardModelConfig& cfg = {});

/// Multinomial draw of @p n_trials by sequential binomial splitting.
///
/// two_port outcome order: coincidence bins ascending, bunched bins
/// ascending, single click, no click. paper_eq16 draws an independent
/// trinomial (P2, P1, P0) of @p n_trials per bin, bins ascending. Throws
/// InputError when n_trials is 0 or above 2^53.
OutcomeTable sample_counts(const OutcomeTable& table, std::uint64_t n_trials, std::uint64_t seed);

}  // namespace qwkt
