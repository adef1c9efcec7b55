#include "qwkt/biphoton.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "qwkt/errors.hpp"

namespace qwkt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double gaussian(double x_sq_scaled) { return std::exp(-x_sq_scaled); }

}  // namespace

BiphotonSource::BiphotonSource(double sigma_spectral, double center_wavelength_signal,
                               double center_wavelength_idler, double pump_wavelength)
    : sigma_(sigma_spectral),
      delta_(std::numbers::sqrt2 * sigma_spectral),
      lambda_s_(center_wavelength_signal),
      lambda_i_(center_wavelength_idler),
      lambda_p_(pump_wavelength) {
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
    throw DomainError("spectral bandwidth must be positive and finite");
  }
  if (!(lambda_s_ > 0.0) || !(lambda_i_ > 0.0) || !(lambda_p_ > 0.0)) {
    throw DomainError("center and pump wavelengths must be positive");
  }
  const double lhs = 1.0 / lambda_s_ + 1.0 / lambda_i_;
  const double rhs = 1.0 / lambda_p_;
  if (std::abs(lhs - rhs) > 1e-6 * rhs) {
    throw DomainError("line centers violate energy conservation: 1/ls + 1/li != 1/lp");
  }
}

BiphotonSource BiphotonSource::from_bandwidth_nm(double bandwidth_nm, double center_nm,
                                                 double pump_nm) {
  if (!(bandwidth_nm > 0.0)) throw DomainError("bandwidth must be positive");
  const double sigma = bandwidth_nm_to_rads(bandwidth_nm / 1e9, center_nm / 1e9);
  return BiphotonSource(sigma, center_nm / 1e9, center_nm / 1e9, pump_nm / 1e9);
}

DelayProfile::DelayProfile(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw DomainError("delay profile needs at least one layer");
  double sum = 0.0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (!std::isfinite(l.tau) || l.tau < 0.0) throw DomainError("delays must be finite and >= 0");
    if (!(l.weight > 0.0)) throw DomainError("layer weights must be positive");
    if (i > 0 && !(l.tau > layers_[i - 1].tau)) {
      throw DomainError("delays must be strictly increasing");
    }
    sum += l.weight;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw DomainError("layer weights must sum to 1 (got " + std::to_string(sum) + ")");
  }
}

DelayProfile DelayProfile::normalized(std::vector<Layer> layers) {
  double sum = 0.0;
  for (const auto& l : layers) sum += l.weight;
  if (!(sum > 0.0)) throw DomainError("layer weights must be positive");
  for (auto& l : layers) l.weight /= sum;
  return DelayProfile(std::move(layers));
}

TemporalModes temporal_modes(const BiphotonSource& source, const DelayProfile& profile, double t) {
  const double d2 = source.delta_temporal() * source.delta_temporal();
  const double fs = gaussian(0.5 * d2 * t * t);
  double fi = fs;
  for (const auto& l : profile.layers()) {
    const double u = t + l.tau;
    fi += l.weight * gaussian(0.5 * d2 * u * u);
  }
  return {fs, fi};
}

double cross_correlation(const BiphotonSource& source, const DelayProfile& profile, double T) {
  const double d2 = source.delta_temporal() * source.delta_temporal();
  double r = gaussian(d2 * T * T);
  for (const auto& l : profile.layers()) {
    const double up = T + l.tau;
    const double um = T - l.tau;
    r += 0.5 * l.weight * (gaussian(d2 * up * up) + gaussian(d2 * um * um));
  }
  return r;
}

double envelope_pdf(const BiphotonSource& source, double omega) {
  const double s = 2.0 * source.sigma_spectral();
  return std::exp(-omega * omega / (2.0 * s * s)) / std::sqrt(kTwoPi * s * s);
}

double envelope_peak_normalized(const BiphotonSource& source, double omega) {
  const double sigma = source.sigma_spectral();
  return std::exp(-omega * omega / (8.0 * sigma * sigma));
}

double fringe_sum(std::span<const double> taus, std::span<const double> weights, double omega,
                  double phi) {
  double s = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) s += weights[i] * std::cos(omega * taus[i] + phi);
  return s;
}

double joint_spectral_intensity(const BiphotonSource& source, const DelayProfile& profile,
                                const ForwardModelConfig& cfg, double omega) {
  double fringe = 0.0;
  for (const auto& l : profile.layers()) fringe += l.weight * std::cos(omega * l.tau + cfg.phi);
  // Σa = 1 keeps the bracket in [0, 2]; clamp the rounding residue at the dip.
  const double bracket = std::max(0.0, 1.0 - cfg.sign() * fringe);
  return envelope_pdf(source, omega) * bracket / 2.0;
}

double bandwidth_nm_to_rads(double delta_lambda, double center_lambda) {
  if (!(center_lambda > 0.0)) throw DomainError("center wavelength must be positive");
  if (delta_lambda < 0.0 || !std::isfinite(delta_lambda)) {
    throw DomainError("bandwidth must be nonnegative");
  }
  return kTwoPi * kSpeedOfLight * delta_lambda / (center_lambda * center_lambda);
}

double wavelength_to_difference_frequency(double signal_wavelength, double pump_wavelength) {
  if (!(signal_wavelength > 0.0) || !(pump_wavelength > 0.0)) {
    throw DomainError("wavelengths must be positive");
  }
  const double ws = kTwoPi * kSpeedOfLight / signal_wavelength;
  const double wp = kTwoPi * kSpeedOfLight / pump_wavelength;
  return 2.0 * ws - wp;
}

double difference_frequency_to_wavelength(double omega, double pump_wavelength) {
  if (!(pump_wavelength > 0.0)) throw DomainError("pump wavelength must be positive");
  const double wp = kTwoPi * kSpeedOfLight / pump_wavelength;
  const double ws = 0.5 * (wp + omega);
  if (!(ws > 0.0)) throw DomainError("difference frequency exceeds the pump frequency");
  return kTwoPi * kSpeedOfLight / ws;
}

}  // namespace qwkt
