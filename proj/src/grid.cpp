#include "qwkt/grid.hpp"

#include <cmath>
#include <numbers>

#include "qwkt/biphoton.hpp"
#include "qwkt/errors.hpp"

namespace qwkt {

namespace {

double checked_half_width(double lo, double hi, std::size_t n, const char* what) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigurationError(std::string(what) + " grid needs min < max");
  }
  if (std::abs(lo + hi) > 1e-12 * hi) {
    throw ConfigurationError(std::string(what) + " grid must be symmetric about zero");
  }
  if (n < 16 || n % 2 != 0) {
    throw ConfigurationError(std::string(what) + " grid needs an even bin count >= 16");
  }
  return hi;
}

}  // namespace

FrequencyGrid::FrequencyGrid(double omega_min, double omega_max, std::size_t n_bins)
    : half_width_(checked_half_width(omega_min, omega_max, n_bins, "frequency")), n_(n_bins) {}

FrequencyGrid FrequencyGrid::for_source(const BiphotonSource& source, std::size_t n_bins,
                                        double half_width_sigmas) {
  const double w = half_width_sigmas * 2.0 * source.sigma_spectral();
  return FrequencyGrid(-w, w, n_bins);
}

std::vector<double> FrequencyGrid::values() const {
  std::vector<double> v(n_);
  for (std::size_t j = 0; j < n_; ++j) v[j] = (*this)[j];
  return v;
}

TemporalGrid FrequencyGrid::paired() const {
  const double dt = 2.0 * std::numbers::pi / (2.0 * half_width_);
  const double half = 0.5 * dt * static_cast<double>(n_);
  return TemporalGrid(-half, half, n_);
}

TemporalGrid::TemporalGrid(double t_min, double t_max, std::size_t n_bins)
    : half_width_(checked_half_width(t_min, t_max, n_bins, "temporal")), n_(n_bins) {}

std::vector<double> TemporalGrid::values() const {
  std::vector<double> v(n_);
  for (std::size_t k = 0; k < n_; ++k) v[k] = (*this)[k];
  return v;
}

FrequencyGrid TemporalGrid::paired() const {
  const double dw = 2.0 * std::numbers::pi / (2.0 * half_width_);
  const double half = 0.5 * dw * static_cast<double>(n_);
  return FrequencyGrid(-half, half, n_);
}

bool nyquist_paired(const FrequencyGrid& frequency, const TemporalGrid& temporal) {
  if (frequency.size() != temporal.size()) return false;
  const double product = frequency.step() * temporal.step() * static_cast<double>(frequency.size());
  return std::abs(product - 2.0 * std::numbers::pi) <= 1e-9 * 2.0 * std::numbers::pi;
}

}  // namespace qwkt
