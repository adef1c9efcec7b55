#include "qwkt/hom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qwkt/errors.hpp"
#include "qwkt/random.hpp"

namespace qwkt {

namespace {

constexpr std::uint64_t kMaxTrials = std::uint64_t{1} << 53;

// Φ(b) - Φ(a) for a zero-mean normal with standard deviation s, using the
// tail on the side away from zero so far-tail bins keep their precision.
double normal_mass(double a, double b, double s) {
  const double k = 1.0 / (std::numbers::sqrt2 * s);
  if (a >= 0.0) return 0.5 * (std::erfc(a * k) - std::erfc(b * k));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * k) - std::erfc(-a * k));
  return 0.5 * (std::erf(b * k) - std::erf(a * k));
}

}  // namespace

JointAmplitude::JointAmplitude(const BiphotonSource& source, double pump_bandwidth,
                               bool symmetrize)
    : difference_sigma_(2.0 * source.sigma_spectral()),
      pump_bandwidth_(pump_bandwidth > 0.0 ? pump_bandwidth : 1e-3 * source.sigma_spectral()),
      center_difference_(source.signal_frequency() - source.idler_frequency()),
      pump_frequency_(source.pump_frequency()),
      symmetrize_(symmetrize) {
  // ∫∫|f|² dω_s dω_i = (1/2) ∫∫|f|² dΩ dS
  const double root2pi = std::sqrt(2.0 * std::numbers::pi);
  double lobes = 1.0;
  if (symmetrize_ && center_difference_ != 0.0) {
    const double s = difference_sigma_;
    lobes = 2.0 * (1.0 + std::exp(-center_difference_ * center_difference_ / (2.0 * s * s)));
  }
  const double integral = 0.5 * root2pi * difference_sigma_ * lobes * root2pi * pump_bandwidth_;
  amplitude_ = 1.0 / std::sqrt(integral);
}

double JointAmplitude::operator()(double omega_s, double omega_i) const noexcept {
  const double diff = omega_s - omega_i;
  const double sum = omega_s + omega_i - pump_frequency_;
  const double s2 = 4.0 * difference_sigma_ * difference_sigma_;
  double g = std::exp(-(diff - center_difference_) * (diff - center_difference_) / s2);
  if (symmetrize_ && center_difference_ != 0.0) {
    g += std::exp(-(diff + center_difference_) * (diff + center_difference_) / s2);
  }
  const double h = std::exp(-sum * sum / (4.0 * pump_bandwidth_ * pump_bandwidth_));
  return amplitude_ * g * h;
}

std::complex<double> antibunch_amplitude(const JointAmplitude& f, double tau, double omega_s,
                                         double omega_i) noexcept {
  const std::complex<double> phase = std::polar(1.0, -(omega_s - omega_i) * tau);
  return 0.5 * (f(omega_s, omega_i) - f(omega_i, omega_s) * phase);
}

double coincidence_probability(const BiphotonSource& source, double tau) noexcept {
  const double s = source.sigma_spectral();
  return -0.5 * std::expm1(-2.0 * s * s * tau * tau);
}

DetectionModel::DetectionModel(FrequencyGrid grid_, double gamma_, double alpha_,
                               std::uint64_t n_trials_, DetectionVariant variant_)
    : grid(grid_), gamma(gamma_), alpha(alpha_), n_trials(n_trials_), variant(variant_) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw DomainError("loss must satisfy 0 <= gamma < 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("visibility must satisfy 0 <= alpha <= 1");
  if (n_trials < 1) throw DomainError("trial count must be >= 1");
}

std::uint64_t OutcomeCounts::total() const noexcept {
  std::uint64_t t = single_click + no_click;
  for (auto v : coincidence) t += v;
  for (auto v : bunched) t += v;
  for (auto v : lost) t += v;
  return t;
}

double OutcomeTable::total_probability() const noexcept {
  if (variant == DetectionVariant::paper_eq16) {
    double worst = 1.0;
    for (std::size_t j = 0; j < coincidence.size(); ++j) {
      const double s = coincidence[j] + bunched[j] + lost[j];
      if (std::abs(s - 1.0) > std::abs(worst - 1.0)) worst = s;
    }
    return worst;
  }
  double t = single_click + no_click;
  for (double v : coincidence) t += v;
  for (double v : bunched) t += v;
  return t;
}

SpectralPattern OutcomeTable::coincidence_spectrum() const {
  if (counts) {
    std::vector<double> v(counts->coincidence.begin(), counts->coincidence.end());
    return SpectralPattern(grid, std::move(v), SpectrumKind::counts);
  }
  return SpectralPattern(grid, coincidence, SpectrumKind::ideal_density);
}

std::vector<double> envelope_bin_masses(const BiphotonSource& source, const FrequencyGrid& grid) {
  const double s = 2.0 * source.sigma_spectral();
  std::vector<double> m(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    m[j] = normal_mass(grid.lower_edge(j), grid.lower_edge(j) + grid.step(), s);
  }
  const double window = std::accumulate(m.begin(), m.end(), 0.0);
  for (auto& v : m) v /= window;
  return m;
}

OutcomeTable outcome_probabilities(const DetectionModel& model, const BiphotonSource& source,
                                   const DelayProfile& profile, const ForwardModelConfig& cfg) {
  const auto& grid = model.grid;
  const std::size_t n = grid.size();
  const double survive = (1.0 - model.gamma) * (1.0 - model.gamma);

  std::vector<double> taus;
  std::vector<double> weights;
  for (const auto& l : profile.layers()) {
    taus.push_back(l.tau);
    weights.push_back(l.weight);
  }

  OutcomeTable table{model.variant, grid, std::vector<double>(n), std::vector<double>(n), {},
                     0.0, 0.0, std::nullopt};

  if (model.variant == DetectionVariant::paper_eq16) {
    table.lost.assign(n, model.gamma * model.gamma);
    const double single_floor = 2.0 * (1.0 + model.gamma) / (1.0 - model.gamma);
    for (std::size_t j = 0; j < n; ++j) {
      const double w = grid[j];
      const double shaped = envelope_peak_normalized(source, w) *
                            (1.0 + model.alpha * fringe_sum(taus, weights, w));
      table.coincidence[j] = 0.5 * survive * shaped;
      table.bunched[j] = 0.5 * survive * (single_floor - shaped);
    }
    return table;
  }

  const auto env = envelope_bin_masses(source, grid);
  for (std::size_t j = 0; j < n; ++j) {
    const double fringe = cfg.sign() * model.alpha * fringe_sum(taus, weights, grid[j], cfg.phi);
    table.coincidence[j] = survive * env[j] * std::max(0.0, 1.0 - fringe) / 2.0;
    table.bunched[j] = survive * env[j] * std::max(0.0, 1.0 + fringe) / 2.0;
  }
  table.single_click = 2.0 * model.gamma * (1.0 - model.gamma);
  table.no_click = model.gamma * model.gamma;
  return table;
}

OutcomeTable sample_counts(const OutcomeTable& table, std::uint64_t n_trials, std::uint64_t seed) {
  if (n_trials == 0) throw InputError("cannot sample zero trials");
  if (n_trials > kMaxTrials) {
    throw InputError("trial count exceeds the exactly representable range (2^53)");
  }

  Xoshiro256 rng(seed);
  OutcomeTable out = table;
  OutcomeCounts counts;
  counts.n_trials = n_trials;
  const std::size_t n = table.grid.size();

  if (table.variant == DetectionVariant::paper_eq16) {
    counts.coincidence.resize(n);
    counts.bunched.resize(n);
    counts.lost.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double p2 = table.coincidence[j];
      const double p1 = table.bunched[j];
      const double rest = p1 + table.lost[j];
      const auto k2 = sample_binomial(rng, n_trials, std::clamp(p2 / (p2 + rest), 0.0, 1.0));
      const auto left = n_trials - k2;
      const auto k1 = rest > 0.0 ? sample_binomial(rng, left, std::clamp(p1 / rest, 0.0, 1.0)) : 0;
      counts.coincidence[j] = k2;
      counts.bunched[j] = k1;
      counts.lost[j] = left - k1;
    }
    out.counts = std::move(counts);
    return out;
  }

  std::vector<double> p;
  p.reserve(2 * n + 2);
  p.insert(p.end(), table.coincidence.begin(), table.coincidence.end());
  p.insert(p.end(), table.bunched.begin(), table.bunched.end());
  p.push_back(table.single_click);
  p.push_back(table.no_click);

  std::vector<double> suffix(p.size() + 1, 0.0);
  for (std::size_t i = p.size(); i-- > 0;) suffix[i] = suffix[i + 1] + p[i];

  std::vector<std::uint64_t> k(p.size(), 0);
  std::uint64_t remaining = n_trials;
  for (std::size_t i = 0; i < p.size() && remaining > 0; ++i) {
    if (i + 1 == p.size()) {
      k[i] = remaining;
      break;
    }
    const double cond = suffix[i] > 0.0 ? std::clamp(p[i] / suffix[i], 0.0, 1.0) : 1.0;
    k[i] = sample_binomial(rng, remaining, cond);
    remaining -= k[i];
  }

  counts.coincidence.assign(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(n));
  counts.bunched.assign(k.begin() + static_cast<std::ptrdiff_t>(n),
                        k.begin() + static_cast<std::ptrdiff_t>(2 * n));
  counts.single_click = k[2 * n];
  counts.no_click = k[2 * n + 1];
  out.counts = std::move(counts);
  return out;
}

}  // namespace qwkt
