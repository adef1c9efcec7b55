#pragma once

// Sampled spectra and correlations, and the transform pair linking them:
//   F(ω) = (1/2π) ∫ R(T) e^{iωT} dT        R(T) = ∫ F(ω) e^{-iωT} dω
// plus the classical autocorrelation / power-spectrum pair for sampled
// real time series.

#include <complex>
#include <span>
#include <vector>

#include "qwkt/grid.hpp"

namespace qwkt {

enum class SpectrumKind { ideal_density, counts };

/// Per-bin nonnegative spectral values on a difference-frequency grid.
class SpectralPattern {
 public:
  /// Throws InputError on size mismatch, negative or non-finite values, or
  /// non-integer values for the counts kind.
  SpectralPattern(FrequencyGrid grid, std::vector<double> intensity, SpectrumKind kind);

  const FrequencyGrid& grid() const noexcept { return grid_; }
  std::span<const double> intensity() const noexcept { return intensity_; }
  SpectrumKind kind() const noexcept { return kind_; }
  double total() const noexcept;

 private:
  FrequencyGrid grid_;
  std::vector<double> intensity_;
  SpectrumKind kind_;
};

/// Sampled R(T). Values are kept complex so that spectra which are not exactly
/// symmetric (noisy counts) can still be inverted; for symmetric spectra the
/// imaginary part is rounding residue.
class TemporalCorrelation {
 public:
  TemporalCorrelation(TemporalGrid grid, std::vector<std::complex<double>> values);
  TemporalCorrelation(TemporalGrid grid, std::span<const double> real_values);

  const TemporalGrid& grid() const noexcept { return grid_; }
  std::span<const std::complex<double>> values() const noexcept { return values_; }
  std::vector<double> real() const;
  std::vector<double> magnitude() const;
  /// max |Im R| / max |R|, or 0 for an all-zero correlation.
  double imag_residue() const noexcept;

 private:
  TemporalGrid grid_;
  std::vector<std::complex<double>> values_;
};

/// Complex forward transform on the Nyquist-paired frequency grid.
std::vector<std::complex<double>> forward_qwkt_complex(const TemporalCorrelation& r);

/// Forward transform to a spectral density on the paired grid.
///
/// Throws InputError when the result is not a real nonnegative spectrum
/// (imaginary residue above 1e-6 of the peak, or negative lobes beyond the
/// same tolerance); smaller negatives, such as window-edge aliasing, are
/// clamped to zero.
SpectralPattern forward_qwkt(const TemporalCorrelation& r);

/// As above; throws ConfigurationError unless @p out is Nyquist-paired to the input grid.
SpectralPattern forward_qwkt(const TemporalCorrelation& r, const FrequencyGrid& out);

struct InverseOptions {
  /// Apply a Hann window across the spectral window before inverting, for
  /// measured spectra with truncation artifacts.
  bool hann_window = false;
};

TemporalCorrelation inverse_qwkt(const SpectralPattern& f, const InverseOptions& options = {});

/// As above; throws ConfigurationError unless @p out is Nyquist-paired to the spectrum's grid.
TemporalCorrelation inverse_qwkt(const SpectralPattern& f, const TemporalGrid& out,
                                 const InverseOptions& options = {});

/// Classical autocorrelation and power spectrum of a sampled real series.
struct ClassicalWkt {
  double sample_rate = 1.0;
  /// Biased (1/n) lag-sum estimate for lags -(n-1) .. n-1, index m + n - 1.
  std::vector<double> autocorrelation;
  /// Discrete transform of the autocorrelation at f_k = k·fs/n, k = 0 .. n-1.
  std::vector<double> power;

  std::size_t series_length() const noexcept { return power.size(); }
  double lag_time(std::size_t index) const noexcept;
  double frequency(std::size_t k) const noexcept;
};

/// Throws InputError for fewer than 16 samples or non-finite values.
ClassicalWkt classical_wkt(std::span<const double> x, double sample_rate = 1.0);

/// P(f) = Σ_m R[m] e^{-2πi f m/fs} evaluated at an arbitrary frequency.
double power_spectrum_at(const ClassicalWkt& wkt, double f);

}  // namespace qwkt
