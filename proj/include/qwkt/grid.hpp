#pragma once

#include <cstddef>
#include <vector>

namespace qwkt {

class BiphotonSource;
class TemporalGrid;

/// Uniform difference-frequency grid, symmetric about zero, sampled at bin
/// centers. Zero itself falls on a bin edge since the bin count is even.
class FrequencyGrid {
 public:
  /// Throws ConfigurationError unless omega_min = -omega_max < 0 and n_bins is even and >= 16.
  FrequencyGrid(double omega_min, double omega_max, std::size_t n_bins);

  /// ±half_width_sigmas·(2σ) window; the defaults capture 1 - 2e-9 of the envelope mass.
  static FrequencyGrid for_source(const BiphotonSource& source, std::size_t n_bins = 4096,
                                  double half_width_sigmas = 6.0);

  double omega_min() const noexcept { return -half_width_; }
  double omega_max() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return n_; }
  double step() const noexcept { return 2.0 * half_width_ / static_cast<double>(n_); }
  double operator[](std::size_t j) const noexcept {
    return -half_width_ + (static_cast<double>(j) + 0.5) * step();
  }
  double lower_edge(std::size_t j) const noexcept {
    return -half_width_ + static_cast<double>(j) * step();
  }
  std::vector<double> values() const;

  /// The Nyquist-paired temporal grid: same bin count, ΔT = 2π/(ω span).
  TemporalGrid paired() const;

  bool operator==(const FrequencyGrid&) const = default;

 private:
  double half_width_;
  std::size_t n_;
};

/// Uniform relative-delay grid, symmetric about zero, sampled at bin centers.
class TemporalGrid {
 public:
  TemporalGrid(double t_min, double t_max, std::size_t n_bins);

  double t_min() const noexcept { return -half_width_; }
  double t_max() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return n_; }
  double step() const noexcept { return 2.0 * half_width_ / static_cast<double>(n_); }
  double operator[](std::size_t k) const noexcept {
    return -half_width_ + (static_cast<double>(k) + 0.5) * step();
  }
  std::vector<double> values() const;

  FrequencyGrid paired() const;

  bool operator==(const TemporalGrid&) const = default;

 private:
  double half_width_;
  std::size_t n_;
};

/// True when both grids have the same bin count and dω·dT·n = 2π within 1e-9.
bool nyquist_paired(const FrequencyGrid& frequency, const TemporalGrid& temporal);

}  // namespace qwkt
