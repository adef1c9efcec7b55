#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "qwkt/errors.hpp"
#include "qwkt/estimator.hpp"
#include "qwkt/quadrature.hpp"

namespace qwkt {

namespace {

constexpr double kWindowSigmas = 12.0;  // ±6·(2σ)
constexpr double kFisherTolerance = 1e-8;
constexpr std::size_t kMaxSegments = 4000;
constexpr std::size_t kMaxAxis = 256;

// Segment edges on [0, 12σ]: the zeros of sin(ωτ) and cos(ωτ), where the
// visibility-limited integrand has its narrow features.
std::vector<double> half_window_breakpoints(double sigma, double tau, bool features) {
  const double top = kWindowSigmas * sigma;
  std::vector<double> b{0.0};
  const double quarter = std::numbers::pi / (2.0 * std::abs(tau));
  if (!features || !(std::abs(tau) > 0.0) || top / quarter > static_cast<double>(kMaxSegments)) {
    const std::size_t pieces = features && std::abs(tau) > 0.0 ? kMaxSegments : 16;
    for (std::size_t i = 1; i <= pieces; ++i) b.push_back(top * static_cast<double>(i) / static_cast<double>(pieces));
    return b;
  }
  for (double w = quarter; w < top; w += quarter) b.push_back(w);
  b.push_back(top);
  // Keep the edges smooth away from the features.
  if (b.size() < 17) {
    std::vector<double> fine{0.0};
    for (std::size_t i = 1; i < b.size(); ++i) {
      for (int s = 1; s <= 4; ++s) fine.push_back(b[i - 1] + (b[i] - b[i - 1]) * s / 4.0);
    }
    return fine;
  }
  return b;
}

double two_port_density(double omega, double tau, double alpha, double env) {
  if (alpha == 1.0) return env * omega * omega;
  const double s = std::sin(omega * tau);
  const double c = std::cos(omega * tau);
  return env * alpha * alpha * omega * omega * s * s / (1.0 - alpha * alpha * c * c);
}

// Printed P2/P1 terms with the peak-1 envelope e:
//   P2 = K/2·e(1+αc), P1 = K/2·(2(1+γ)/(1-γ) - e(1+αc)), ∂τP2 = -K/2·e·α·ω·s.
double eq16_density(double omega, double tau, double alpha, double gamma, double e, double x) {
  const double k = (1.0 - gamma) * (1.0 - gamma);
  const double s = std::sin(omega * tau);
  const double c = std::cos(omega * tau);
  const double half_sin = std::sin(0.5 * omega * tau);
  const double d = 0.5 * k * e * alpha * omega * s;
  const double num = d * d;

  double p2_term;
  if (alpha == 1.0) {
    p2_term = 0.5 * k * e * omega * omega * (1.0 - c);
  } else {
    const double p2 = 0.5 * k * e * (1.0 + alpha * c);
    p2_term = p2 > 0.0 ? num / p2 : 0.0;
  }
  // 2(1+γ)/(1-γ) - e(1+αc) = 4γ/(1-γ) + (1-e)(1+αc) + (1-α) + 2α sin²(ωτ/2)
  const double gap = 4.0 * gamma / (1.0 - gamma) - std::expm1(-x) * (1.0 + alpha * c) + (1.0 - alpha) +
                     2.0 * alpha * half_sin * half_sin;
  const double p1 = 0.5 * k * gap;
  const double p1_term = p1 > 0.0 ? num / p1 : 0.0;
  const double p0_term = 0.0;  // ∂τ γ² = 0
  return p2_term + p1_term + p0_term;
}

}  // namespace

FisherReport fisher_information(const BiphotonSource& source, double tau, const DetectionModel& model) {
  if (!std::isfinite(tau)) throw DomainError("delay must be finite");
  const double sigma = source.sigma_spectral();
  const double gamma = model.gamma;
  const double alpha = model.alpha;

  FisherReport report{};
  report.variant = model.variant;
  report.sigma = sigma;
  report.tau = tau;
  report.gamma = gamma;
  report.alpha = alpha;
  report.n_trials = model.n_trials;

  double g = 0.0;
  if (model.variant == DetectionVariant::two_port) {
    const double loss = (1.0 - gamma) * (1.0 - gamma);
    const auto b = half_window_breakpoints(sigma, tau, alpha != 1.0);
    auto f = [&](double w) { return two_port_density(w, tau, alpha, envelope_pdf(source, w)); };
    g = alpha == 0.0 ? 0.0 : 2.0 * loss * integrate_piecewise(f, b, kFisherTolerance).value;
  } else {
    const double var = 4.0 * sigma * sigma;
    const auto b = half_window_breakpoints(sigma, tau, true);
    auto f = [&](double w) {
      const double x = w * w / (2.0 * var);
      return eq16_density(w, tau, alpha, gamma, std::exp(-x), x);
    };
    g = alpha == 0.0 ? 0.0 : 2.0 * integrate_piecewise(f, b, kFisherTolerance).value;
  }
  report.g_omega = std::max(0.0, g);
  report.crb = report.g_omega > 0.0
                   ? 1.0 / std::sqrt(static_cast<double>(model.n_trials) * report.g_omega)
                   : std::numeric_limits<double>::infinity();
  return report;
}

QfiReport quantum_fisher_information(const BiphotonSource& source, std::uint64_t n_trials) {
  if (n_trials < 1) throw DomainError("trial count must be >= 1");
  // With a monochromatic pump ω_i = (ω_p - Ω)/2, so Var(ω_i) = Var(Ω)/4
  // over the difference-frequency density.
  const double sigma = source.sigma_spectral();
  const double top = kWindowSigmas * sigma;
  std::vector<double> b;
  for (int i = -16; i <= 16; ++i) b.push_back(top * i / 16.0);

  const double m0 = integrate_piecewise([&](double w) { return envelope_pdf(source, w); }, b, 1e-12).value;
  const double m1 =
      integrate_piecewise([&](double w) { return 0.5 * w * envelope_pdf(source, w); }, b, 1e-12).value;
  const double m2 =
      integrate_piecewise([&](double w) { return 0.25 * w * w * envelope_pdf(source, w); }, b, 1e-12).value;

  QfiReport out{};
  const double mean = m1 / m0;
  const double d = 2.0 * sigma;
  out.q = d * d / 4.0;
  out.q_quadrature = m2 / m0 - mean * mean;
  out.n_trials = n_trials;
  out.qcrb = 1.0 / (2.0 * std::sqrt(out.q) * std::sqrt(static_cast<double>(n_trials)));
  return out;
}

std::size_t SweepTable::ok_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) { return c.ok(); }));
}

Trend classify_trend(std::span<const double> values) {
  bool up = false;
  bool down = false;
  bool flat = false;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double a = values[i - 1];
    const double b = values[i];
    const double scale = std::max(std::abs(a), std::abs(b));
    if (std::abs(b - a) <= 1e-6 * scale) {
      flat = true;
    } else if (b > a) {
      up = true;
    } else {
      down = true;
    }
  }
  if (up && down) return Trend::mixed;
  if (up) return flat ? Trend::nondecreasing : Trend::increasing;
  if (down) return flat ? Trend::nonincreasing : Trend::decreasing;
  return Trend::constant;
}

SweepTable sweep(const SweepAxes& axes, const SweepOptions& options) {
  const std::vector<const std::vector<double>*> all{&axes.sigma, &axes.tau, &axes.gamma, &axes.alpha};
  for (const auto* axis : all) {
    if (axis->size() > kMaxAxis) throw DomainError("sweep axes are limited to 256 points");
    for (double v : *axis) {
      if (!std::isfinite(v)) throw DomainError("sweep axis values must be finite");
    }
  }

  SweepTable table;
  table.variant = options.variant;
  const std::size_t ns = axes.sigma.size(), nt = axes.tau.size(), ng = axes.gamma.size(),
                    na = axes.alpha.size();
  const std::size_t total = ns * nt * ng * na;
  if (total == 0) return table;

  table.cells.resize(total);
  auto index = [&](std::size_t s, std::size_t t, std::size_t g, std::size_t a) {
    return ((s * nt + t) * ng + g) * na + a;
  };

  auto evaluate = [&](std::size_t i) {
    const std::size_t a = i % na;
    const std::size_t g = (i / na) % ng;
    const std::size_t t = (i / (na * ng)) % nt;
    const std::size_t s = i / (na * ng * nt);
    SweepCell& cell = table.cells[i];
    cell.sigma_index = s;
    cell.tau_index = t;
    cell.gamma_index = g;
    cell.alpha_index = a;
    try {
      const BiphotonSource source(axes.sigma[s], options.center_wavelength, options.center_wavelength,
                                  options.pump_wavelength);
      const DetectionModel model(FrequencyGrid::for_source(source), axes.gamma[g], axes.alpha[a],
                                 options.n_trials, options.variant);
      cell.result = fisher_information(source, axes.tau[t], model);
    } catch (const std::exception& e) {
      cell.result = std::string(e.what());
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, total);
  if (threads == 1) {
    for (std::size_t i = 0; i < total; ++i) evaluate(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < total; i += threads) evaluate(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  // One trend per line along each axis with more than one point.
  const std::size_t sizes[4] = {ns, nt, ng, na};
  for (std::size_t axis = 0; axis < 4; ++axis) {
    if (sizes[axis] < 2) continue;
    for (std::size_t s = 0; s < (axis == 0 ? 1 : ns); ++s) {
      for (std::size_t t = 0; t < (axis == 1 ? 1 : nt); ++t) {
        for (std::size_t g = 0; g < (axis == 2 ? 1 : ng); ++g) {
          for (std::size_t a = 0; a < (axis == 3 ? 1 : na); ++a) {
            std::vector<double> line;
            bool complete = true;
            for (std::size_t m = 0; m < sizes[axis]; ++m) {
              const std::size_t idx[4] = {axis == 0 ? m : s, axis == 1 ? m : t, axis == 2 ? m : g,
                                          axis == 3 ? m : a};
              const auto& cell = table.cells[index(idx[0], idx[1], idx[2], idx[3])];
              if (!cell.ok()) {
                complete = false;
                break;
              }
              line.push_back(std::get<FisherReport>(cell.result).g_omega);
            }
            if (!complete) continue;
            table.trends.push_back({axis, s, t, g, a, classify_trend(line)});
          }
        }
      }
    }
  }
  return table;
}

}  // namespace qwkt
