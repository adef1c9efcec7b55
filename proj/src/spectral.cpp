#include "qwkt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qwkt/errors.hpp"
#include "qwkt/fourier.hpp"

namespace qwkt {

using fourier::Complex;

SpectralPattern::SpectralPattern(FrequencyGrid grid, std::vector<double> intensity,
                                 SpectrumKind kind)
    : grid_(grid), intensity_(std::move(intensity)), kind_(kind) {
  if (intensity_.size() != grid_.size()) {
    throw InputError("spectrum has " + std::to_string(intensity_.size()) + " values for " +
                     std::to_string(grid_.size()) + " bins");
  }
  for (double v : intensity_) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("spectral values must be finite and >= 0");
    if (kind_ == SpectrumKind::counts && v != std::floor(v)) {
      throw InputError("counts spectrum holds a non-integer value");
    }
  }
}

double SpectralPattern::total() const noexcept {
  return std::accumulate(intensity_.begin(), intensity_.end(), 0.0);
}

TemporalCorrelation::TemporalCorrelation(TemporalGrid grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw InputError("correlation size does not match its grid");
}

TemporalCorrelation::TemporalCorrelation(TemporalGrid grid, std::span<const double> real_values)
    : TemporalCorrelation(grid, std::vector<Complex>(real_values.begin(), real_values.end())) {}

std::vector<double> TemporalCorrelation::real() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](Complex c) { return c.real(); });
  return out;
}

std::vector<double> TemporalCorrelation::magnitude() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](Complex c) { return std::abs(c); });
  return out;
}

double TemporalCorrelation::imag_residue() const noexcept {
  double peak = 0.0;
  double imag = 0.0;
  for (const auto& c : values_) {
    peak = std::max(peak, std::abs(c));
    imag = std::max(imag, std::abs(c.imag()));
  }
  return peak > 0.0 ? imag / peak : 0.0;
}

std::vector<Complex> forward_qwkt_complex(const TemporalCorrelation& r) {
  return fourier::centered_forward(r.values(), r.grid().step());
}

SpectralPattern forward_qwkt(const TemporalCorrelation& r) {
  return forward_qwkt(r, r.grid().paired());
}

SpectralPattern forward_qwkt(const TemporalCorrelation& r, const FrequencyGrid& out) {
  if (!nyquist_paired(out, r.grid())) {
    throw ConfigurationError("frequency grid is not Nyquist-paired to the correlation grid");
  }
  const auto f = forward_qwkt_complex(r);
  double peak = 0.0;
  for (const auto& c : f) peak = std::max(peak, std::abs(c));
  // Half-offset sampling gives aliases alternating signs, so the e^{-18}
  // window tail can dip below zero at the edges.
  const double tol = 1e-6 * peak;
  std::vector<double> values(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (std::abs(f[j].imag()) > tol) {
      throw InputError("correlation is not symmetric: transform has an imaginary part");
    }
    double v = f[j].real();
    if (v < 0.0) {
      if (v < -tol) throw InputError("transform has negative lobes; not a spectral density");
      v = 0.0;
    }
    values[j] = v;
  }
  return SpectralPattern(out, std::move(values), SpectrumKind::ideal_density);
}

TemporalCorrelation inverse_qwkt(const SpectralPattern& f, const InverseOptions& options) {
  return inverse_qwkt(f, f.grid().paired(), options);
}

TemporalCorrelation inverse_qwkt(const SpectralPattern& f, const TemporalGrid& out,
                                 const InverseOptions& options) {
  if (!nyquist_paired(f.grid(), out)) {
    throw ConfigurationError("temporal grid is not Nyquist-paired to the spectrum grid");
  }
  const auto n = f.grid().size();
  std::vector<Complex> in(n);
  for (std::size_t j = 0; j < n; ++j) {
    double w = 1.0;
    if (options.hann_window) {
      w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) /
                                static_cast<double>(n)));
    }
    in[j] = f.intensity()[j] * w;
  }
  return TemporalCorrelation(out, fourier::centered_inverse(in, f.grid().step()));
}

double ClassicalWkt::lag_time(std::size_t index) const noexcept {
  const auto n = static_cast<double>(series_length());
  return (static_cast<double>(index) - (n - 1.0)) / sample_rate;
}

double ClassicalWkt::frequency(std::size_t k) const noexcept {
  return static_cast<double>(k) * sample_rate / static_cast<double>(series_length());
}

ClassicalWkt classical_wkt(std::span<const double> x, double sample_rate) {
  const std::size_t n = x.size();
  if (n < 16) throw InputError("classical WKT needs at least 16 samples");
  if (!(sample_rate > 0.0)) throw InputError("sample rate must be positive");
  for (double v : x) {
    if (!std::isfinite(v)) throw InputError("time series holds a non-finite value");
  }

  // Linear (non-circular) lag sums through a zero-padded transform.
  const std::size_t m = 2 * n;
  std::vector<Complex> padded(m, 0.0);
  std::copy(x.begin(), x.end(), padded.begin());
  auto spectrum = fourier::dft(padded, -1);
  for (auto& c : spectrum) c = std::norm(c);
  const auto circular = fourier::dft(spectrum, +1);

  ClassicalWkt out;
  out.sample_rate = sample_rate;
  out.autocorrelation.resize(2 * n - 1);
  const double scale = 1.0 / (static_cast<double>(m) * static_cast<double>(n));
  for (std::size_t lag = 0; lag < n; ++lag) {
    const double v = circular[lag].real() * scale;
    out.autocorrelation[n - 1 + lag] = v;
    out.autocorrelation[n - 1 - lag] = v;
  }

  // P(f_k) = Σ_lag R[lag] e^{-2πi k·lag/n}; lags fold onto n points.
  std::vector<Complex> folded(n, 0.0);
  for (std::size_t i = 0; i < out.autocorrelation.size(); ++i) {
    const auto lag = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(n - 1);
    const auto idx = static_cast<std::size_t>((lag % static_cast<std::ptrdiff_t>(n) +
                                               static_cast<std::ptrdiff_t>(n)) %
                                              static_cast<std::ptrdiff_t>(n));
    folded[idx] += out.autocorrelation[i];
  }
  const auto p = fourier::dft(folded, -1);
  out.power.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.power[k] = p[k].real();
  return out;
}

double power_spectrum_at(const ClassicalWkt& wkt, double f) {
  const std::size_t n = wkt.series_length();
  double p = wkt.autocorrelation[n - 1];
  for (std::size_t lag = 1; lag < n; ++lag) {
    p += 2.0 * wkt.autocorrelation[n - 1 + lag] *
         std::cos(2.0 * std::numbers::pi * f * static_cast<double>(lag) / wkt.sample_rate);
  }
  return p;
}

}  // namespace qwkt
