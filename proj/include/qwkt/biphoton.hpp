#pragma once

// Closed-form biphoton models: temporal modes, two-photon cross-correlation
// functions, joint spectral intensities and the unit conversions needed to
// move between spectrometer units (nm) and angular frequency (rad/s).

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace qwkt {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact

/// Spectral and temporal envelope of a frequency-entangled photon pair.
///
/// The temporal bandwidth is tied to the spectral one as Δ = √2·σ, which is
/// the relation under which the Fourier transform of the correlation
/// envelope exp(-Δ²T²) is the spectral envelope exp(-ω²/8σ²).
class BiphotonSource {
 public:
  /// @p sigma_spectral in rad/s, wavelengths in meters. Throws DomainError on
  /// non-positive values or when the line centers violate energy
  /// conservation (1/λs + 1/λi = 1/λp) by more than 1e-6 relative.
  BiphotonSource(double sigma_spectral, double center_wavelength_signal = 810e-9,
                 double center_wavelength_idler = 810e-9, double pump_wavelength = 405e-9);

  /// Builds the source from an RMS bandwidth given in wavelength units.
  static BiphotonSource from_bandwidth_nm(double bandwidth_nm, double center_nm = 810.0,
                                          double pump_nm = 405.0);

  double sigma_spectral() const noexcept { return sigma_; }
  double delta_temporal() const noexcept { return delta_; }
  double center_wavelength_signal() const noexcept { return lambda_s_; }
  double center_wavelength_idler() const noexcept { return lambda_i_; }
  double pump_wavelength() const noexcept { return lambda_p_; }

  double signal_frequency() const noexcept { return 2.0 * std::numbers::pi * kSpeedOfLight / lambda_s_; }
  double idler_frequency() const noexcept { return 2.0 * std::numbers::pi * kSpeedOfLight / lambda_i_; }
  double pump_frequency() const noexcept { return 2.0 * std::numbers::pi * kSpeedOfLight / lambda_p_; }

 private:
  double sigma_;
  double delta_;
  double lambda_s_;
  double lambda_i_;
  double lambda_p_;
};

struct Layer {
  double tau;     ///< relative delay, seconds
  double weight;  ///< intensity weight
};

/// Sample-induced delays with normalized weights. Delays are nonnegative and
/// strictly increasing, weights positive and summing to 1 within 1e-12.
class DelayProfile {
 public:
  explicit DelayProfile(std::vector<Layer> layers);

  static DelayProfile single(double tau) { return DelayProfile({{tau, 1.0}}); }

  /// Rescales the weights to unit sum before validating.
  static DelayProfile normalized(std::vector<Layer> layers);

  std::span<const Layer> layers() const noexcept { return layers_; }
  std::size_t size() const noexcept { return layers_.size(); }
  double max_delay() const noexcept { return layers_.back().tau; }

 private:
  std::vector<Layer> layers_;
};

enum class FringeSign : int { minus = -1, plus = +1 };

/// Phase and cosine-sign convention of the spectral fringe.
///
/// The default (φ = 0, sign +1) gives the "1 - cos" fringe with the HOM dip
/// at zero difference frequency. φ = π reproduces the "1 + cos" pattern
/// obtained by Fourier-transforming the cross-correlation function.
struct ForwardModelConfig {
  double phi = 0.0;
  FringeSign fringe_sign = FringeSign::plus;

  double sign() const noexcept { return static_cast<double>(static_cast<int>(fringe_sign)); }
};

struct TemporalModes {
  double signal;
  double idler;
};

/// Time-bin amplitudes of the signal photon and of the delayed idler photon.
TemporalModes temporal_modes(const BiphotonSource& source, const DelayProfile& profile, double t);

/// Symmetrized two-photon cross-correlation with unit main-peak coefficient:
/// R(T) = exp(-Δ²T²) + Σ (a_i/2)[exp(-Δ²(T+τ_i)²) + exp(-Δ²(T-τ_i)²)].
double cross_correlation(const BiphotonSource& source, const DelayProfile& profile, double T);

/// Gaussian difference-frequency density with standard deviation 2σ; unit integral.
double envelope_pdf(const BiphotonSource& source, double omega);

/// Same envelope scaled to peak 1.
double envelope_peak_normalized(const BiphotonSource& source, double omega);

/// Σ a_i cos(ω τ_i + φ) for raw delay/weight vectors.
double fringe_sum(std::span<const double> taus, std::span<const double> weights, double omega,
                  double phi = 0.0);

/// Joint spectral intensity of the anti-bunched pair at difference frequency
/// ω = ω_s - ω_i, in s/rad:
/// F(ω) = env_pdf(ω)·[1 - sign·Σ a_i cos(ωτ_i + φ)]/2.
double joint_spectral_intensity(const BiphotonSource& source, const DelayProfile& profile,
                                const ForwardModelConfig& cfg, double omega);

/// Converts a wavelength bandwidth to angular frequency: 2πc·Δλ/λ².
/// Zero bandwidth maps to zero; negative bandwidth or non-positive center
/// wavelength throws DomainError.
double bandwidth_nm_to_rads(double delta_lambda, double center_lambda);

/// Signal wavelength (m) to difference frequency ω = ω_s - ω_i under a
/// monochromatic pump, i.e. ω = 2ω_s - ω_p.
double wavelength_to_difference_frequency(double signal_wavelength, double pump_wavelength);

/// Inverse of wavelength_to_difference_frequency.
double difference_frequency_to_wavelength(double omega, double pump_wavelength);

}  // namespace qwkt
