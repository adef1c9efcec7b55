#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qwkt/errors.hpp"
#include "qwkt/estimator.hpp"
#include "qwkt/nelder_mead.hpp"

namespace qwkt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double xlogp(double n, double p) {
  if (n == 0.0) return 0.0;
  return p > 0.0 ? n * std::log(p) : kNegInf;
}

// Multinomial log-likelihood as a function of the fringe sum
// F_j = Σ a_i cos(ω_j τ_i + φ) on the table's grid.
class Likelihood {
 public:
  Likelihood(const OutcomeTable& table, const DetectionModel& model, const BiphotonSource& source,
             const ForwardModelConfig& fringe)
      : eq16_(table.variant == DetectionVariant::paper_eq16),
        omega_(table.grid.values()),
        survive_((1.0 - model.gamma) * (1.0 - model.gamma)),
        alpha_(model.alpha),
        sign_(eq16_ ? -1.0 : fringe.sign()),
        phi_(eq16_ ? 0.0 : fringe.phi),
        single_floor_(2.0 * (1.0 + model.gamma) / (1.0 - model.gamma)) {
    if (!table.counts) throw InputError("outcome table carries no counts");
    const auto& c = *table.counts;
    if (c.coincidence.size() != omega_.size()) {
      throw InputError("coincidence counts do not match the grid");
    }
    if (c.total() == 0) throw InputError("outcome table has zero counts; no likelihood mass");
    if (table.variant != model.variant) throw InputError("counts and detection model disagree on variant");

    coincidence_.assign(c.coincidence.begin(), c.coincidence.end());
    conditional_ = c.bunched.empty();
    if (!conditional_) bunched_.assign(c.bunched.begin(), c.bunched.end());
    if (eq16_) {
      env_.resize(omega_.size());
      for (std::size_t j = 0; j < omega_.size(); ++j) {
        env_[j] = envelope_peak_normalized(source, omega_[j]);
      }
      double lost = 0.0;
      for (auto v : c.lost) lost += static_cast<double>(v);
      constant_ = conditional_ ? 0.0 : xlogp(lost, model.gamma * model.gamma);
    } else {
      env_ = envelope_bin_masses(source, table.grid);
      constant_ = conditional_ ? 0.0
                               : xlogp(static_cast<double>(c.single_click),
                                       2.0 * model.gamma * (1.0 - model.gamma)) +
                                     xlogp(static_cast<double>(c.no_click), model.gamma * model.gamma);
    }
    total_coincidence_ = std::accumulate(coincidence_.begin(), coincidence_.end(), 0.0);
    if (conditional_ && total_coincidence_ == 0.0) {
      throw InputError("outcome table has zero coincidence counts; no likelihood mass");
    }
  }

  std::span<const double> omega() const noexcept { return omega_; }
  double phi() const noexcept { return phi_; }

  std::vector<double> fringe(std::span<const double> taus, std::span<const double> weights) const {
    std::vector<double> f(omega_.size(), 0.0);
    for (std::size_t i = 0; i < taus.size(); ++i) {
      for (std::size_t j = 0; j < f.size(); ++j) f[j] += weights[i] * std::cos(omega_[j] * taus[i] + phi_);
    }
    return f;
  }

  double operator()(std::span<const double> fringe) const {
    double ll = constant_;
    double coincidence_mass = 0.0;
    for (std::size_t j = 0; j < omega_.size(); ++j) {
      const double shaped = eq16_ ? env_[j] * (1.0 + alpha_ * fringe[j])
                                  : env_[j] * (1.0 - sign_ * alpha_ * fringe[j]);
      const double p2 = 0.5 * survive_ * shaped;
      coincidence_mass += p2;
      ll += xlogp(coincidence_[j], p2);
      if (!conditional_) {
        const double p1 = eq16_ ? 0.5 * survive_ * (single_floor_ - shaped)
                                : 0.5 * survive_ * env_[j] * (1.0 + sign_ * alpha_ * fringe[j]);
        ll += xlogp(bunched_[j], p1);
      }
      if (ll == kNegInf) return ll;
    }
    if (conditional_) ll -= total_coincidence_ * std::log(coincidence_mass);
    return ll;
  }

  double operator()(std::span<const double> taus, std::span<const double> weights) const {
    return (*this)(fringe(taus, weights));
  }

 private:
  bool eq16_;
  bool conditional_ = false;
  std::vector<double> omega_;
  std::vector<double> env_;
  std::vector<double> coincidence_;
  std::vector<double> bunched_;
  double survive_;
  double alpha_;
  double sign_;
  double phi_;
  double single_floor_;
  double constant_ = 0.0;
  double total_coincidence_ = 0.0;
};

std::vector<double> softmax_weights(std::span<const double> logits) {
  // The last logit is pinned at zero.
  std::vector<double> a(logits.begin(), logits.end());
  a.push_back(0.0);
  const double top = *std::max_element(a.begin(), a.end());
  double sum = 0.0;
  for (auto& v : a) sum += (v = std::exp(v - top));
  for (auto& v : a) v /= sum;
  return a;
}

std::vector<Layer> initial_layers(const OutcomeTable& table, const BiphotonSource& source,
                                  const Likelihood& ll, std::size_t k,
                                  const std::optional<PeakReport>& init) {
  PeakReport report;
  if (init) {
    report = *init;
  } else {
    try {
      report = extract_delays(table.coincidence_spectrum(), source);
    } catch (const MalformedSpectrumError&) {
    }
  }
  const auto tgrid = table.grid.paired();
  const double dt = tgrid.step();

  auto delays = report.delays;
  std::sort(delays.begin(), delays.end(),
            [](const RecoveredDelay& a, const RecoveredDelay& b) { return a.height > b.height; });
  if (delays.size() > k) delays.resize(k);

  std::vector<Layer> layers;
  for (const auto& d : delays) layers.push_back({d.tau, std::max(d.weight, 1e-3)});

  if (layers.empty()) {
    // No usable peak: scan a single delay across the temporal window.
    double best_tau = dt;
    double best = kNegInf;
    const double one = 1.0;
    for (double tau = 2.0 * dt; tau < 0.8 * tgrid.t_max(); tau += dt) {
      const double v = ll(std::span<const double>(&tau, 1), std::span<const double>(&one, 1));
      if (v > best) {
        best = v;
        best_tau = tau;
      }
    }
    layers.push_back({best_tau, 1.0});
  }
  while (layers.size() < k) {
    auto strongest = std::max_element(layers.begin(), layers.end(),
                                      [](const Layer& a, const Layer& b) { return a.weight < b.weight; });
    const Layer s = *strongest;
    *strongest = {std::max(dt, s.tau - 2.0 * dt), 0.5 * s.weight};
    layers.push_back({s.tau + 2.0 * dt, 0.5 * s.weight});
  }
  double sum = 0.0;
  for (const auto& l : layers) sum += l.weight;
  for (auto& l : layers) l.weight /= sum;
  std::sort(layers.begin(), layers.end(), [](const Layer& a, const Layer& b) { return a.tau < b.tau; });
  return layers;
}

// Coarse search: ±half_steps grid steps around each delay, Cartesian for up
// to two layers and coordinate-wise beyond, then a coordinate grid on the
// weight logits.
void coarse_search(const Likelihood& ll, std::vector<double>& taus, std::vector<double>& logits,
                   double dt, std::size_t half_steps) {
  const std::size_t k = taus.size();
  const std::size_t points = 2 * half_steps + 1;
  const auto omega = ll.omega();
  const std::size_t n = omega.size();

  std::vector<std::vector<double>> candidates(k, std::vector<double>(points));
  std::vector<std::vector<std::vector<double>>> cos_rows(k);
  for (std::size_t i = 0; i < k; ++i) {
    cos_rows[i].resize(points);
    for (std::size_t o = 0; o < points; ++o) {
      const double tau = std::abs(taus[i] + (static_cast<double>(o) - static_cast<double>(half_steps)) * dt);
      candidates[i][o] = tau;
      auto& row = cos_rows[i][o];
      row.resize(n);
      for (std::size_t j = 0; j < n; ++j) row[j] = std::cos(omega[j] * tau + ll.phi());
    }
  }

  auto weights = softmax_weights(logits);
  std::vector<std::size_t> pick(k, half_steps);
  auto evaluate = [&](const std::vector<std::size_t>& idx, const std::vector<double>& a) {
    std::vector<double> f(n, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      const auto& row = cos_rows[i][idx[i]];
      for (std::size_t j = 0; j < n; ++j) f[j] += a[i] * row[j];
    }
    return ll(f);
  };

  double best = evaluate(pick, weights);
  if (k <= 2) {
    std::vector<std::size_t> idx(k, 0);
    const std::size_t combos = k == 1 ? points : points * points;
    for (std::size_t c = 0; c < combos; ++c) {
      idx[0] = c % points;
      if (k == 2) idx[1] = c / points;
      const double v = evaluate(idx, weights);
      if (v > best) {
        best = v;
        pick = idx;
      }
    }
  } else {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < k; ++i) {
        auto idx = pick;
        for (std::size_t o = 0; o < points; ++o) {
          idx[i] = o;
          const double v = evaluate(idx, weights);
          if (v > best) {
            best = v;
            pick = idx;
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < k; ++i) taus[i] = candidates[i][pick[i]];

  for (std::size_t i = 0; i + 1 < k; ++i) {
    const double centre = logits[i];
    for (std::size_t o = 0; o < points; ++o) {
      auto trial = logits;
      trial[i] = centre + 0.3 * (static_cast<double>(o) - static_cast<double>(half_steps));
      const double v = evaluate(pick, softmax_weights(trial));
      if (v > best) {
        best = v;
        logits = trial;
      }
    }
  }
}

// Observed information in (τ_1..τ_k, a_1..a_{k-1}) with a_k = 1 - Σ a_i,
// by central differences of the log-likelihood.
std::vector<double> standard_errors(const Likelihood& ll, std::span<const double> taus,
                                    std::span<const double> weights, double delta) {
  const std::size_t k = taus.size();
  const std::size_t m = 2 * k - 1;
  std::vector<double> p(m);
  std::vector<double> h(m);
  for (std::size_t i = 0; i < k; ++i) {
    p[i] = taus[i];
    h[i] = 1e-3 / delta;
  }
  for (std::size_t i = 0; i + 1 < k; ++i) {
    p[k + i] = weights[i];
    h[k + i] = std::min({1e-3, 0.25 * weights[i], 0.25 * weights[k - 1]});
  }
  auto f = [&](const std::vector<double>& q) {
    std::vector<double> a(k);
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < k; ++i) rest -= (a[i] = q[k + i]);
    a[k - 1] = rest;
    return ll(std::span<const double>(q.data(), k), a);
  };

  Eigen::MatrixXd info(m, m);
  const double f0 = f(p);
  for (std::size_t i = 0; i < m; ++i) {
    auto up = p;
    auto dn = p;
    up[i] += h[i];
    dn[i] -= h[i];
    info(i, i) = -(f(up) - 2.0 * f0 + f(dn)) / (h[i] * h[i]);
    for (std::size_t j = 0; j < i; ++j) {
      auto pp = p, pm = p, mp = p, mm = p;
      pp[i] += h[i], pp[j] += h[j];
      pm[i] += h[i], pm[j] -= h[j];
      mp[i] -= h[i], mp[j] += h[j];
      mm[i] -= h[i], mm[j] -= h[j];
      info(i, j) = info(j, i) = -(f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h[i] * h[j]);
    }
  }

  std::vector<double> se(2 * k, std::numeric_limits<double>::quiet_NaN());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !info.allFinite()) return se;
  const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m),
                                                                    static_cast<Eigen::Index>(m)));
  for (std::size_t i = 0; i < k; ++i) se[i] = std::sqrt(cov(i, i));
  double last = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    se[k + i] = std::sqrt(cov(k + i, k + i));
    for (std::size_t j = 0; j + 1 < k; ++j) last += cov(k + i, k + j);
  }
  se[2 * k - 1] = k > 1 ? std::sqrt(std::max(0.0, last)) : 0.0;
  return se;
}

}  // namespace

double log_likelihood(const OutcomeTable& counts, const DetectionModel& model,
                      const BiphotonSource& source, std::span<const double> taus,
                      std::span<const double> weights, const ForwardModelConfig& fringe) {
  if (taus.size() != weights.size()) throw InputError("delays and weights differ in length");
  return Likelihood(counts, model, source, fringe)(taus, weights);
}

MleResult mle_fit(const OutcomeTable& counts, const DetectionModel& model,
                  const BiphotonSource& source, std::size_t k_layers,
                  const std::optional<PeakReport>& init, const MleOptions& options) {
  if (k_layers < 1 || k_layers > 4) throw InputError("layer count must be between 1 and 4");
  const Likelihood ll(counts, model, source, options.fringe);
  const double delta = source.delta_temporal();
  const double dt = counts.grid.paired().step();

  const auto start = initial_layers(counts, source, ll, k_layers, init);
  std::vector<double> taus;
  std::vector<double> logits;
  for (const auto& l : start) taus.push_back(l.tau);
  for (std::size_t i = 0; i + 1 < k_layers; ++i) {
    logits.push_back(std::log(start[i].weight / start.back().weight));
  }
  coarse_search(ll, taus, logits, dt, options.grid_half_steps);

  // Local descent in (τΔ, logits) so one tolerance fits both kinds of parameter.
  const std::size_t dim = 2 * k_layers - 1;
  std::vector<double> x(dim);
  std::vector<double> step(dim);
  for (std::size_t i = 0; i < k_layers; ++i) {
    x[i] = taus[i] * delta;
    step[i] = 0.5 * dt * delta;
  }
  for (std::size_t i = 0; i + 1 < k_layers; ++i) {
    x[k_layers + i] = logits[i];
    step[k_layers + i] = 0.25;
  }
  auto objective = [&](std::span<const double> v) {
    std::vector<double> t(k_layers);
    for (std::size_t i = 0; i < k_layers; ++i) t[i] = std::abs(v[i]) / delta;
    return -ll(t, softmax_weights(v.subspan(k_layers)));
  };

  auto nm = nelder_mead(objective, x, step, options.tolerance_widths, options.max_iterations);
  std::size_t iterations = nm.iterations;
  if (nm.converged && iterations < options.max_iterations) {
    // One restart from the optimum guards against a collapsed simplex.
    for (auto& s : step) s *= 0.1;
    auto again = nelder_mead(objective, nm.x, step, options.tolerance_widths,
                             options.max_iterations - iterations);
    iterations += again.iterations;
    if (again.value <= nm.value) {
      nm.x = again.x;
      nm.value = again.value;
    }
    nm.converged = again.converged;
  }

  MleResult result;
  result.iterations = iterations;
  result.converged = nm.converged;
  result.log_likelihood = -nm.value;

  std::vector<double> fit_taus(k_layers);
  for (std::size_t i = 0; i < k_layers; ++i) fit_taus[i] = std::abs(nm.x[i]) / delta;
  const auto fit_weights = softmax_weights(std::span<const double>(nm.x).subspan(k_layers));
  const auto se = standard_errors(ll, fit_taus, fit_weights, delta);

  for (std::size_t i = 0; i < k_layers; ++i) {
    result.layers.push_back({fit_taus[i], fit_weights[i], se[i], k_layers > 1 ? se[k_layers + i] : 0.0});
    if (fit_weights[i] < 1e-3) result.near_zero_weight = true;
  }
  std::sort(result.layers.begin(), result.layers.end(),
            [](const FittedLayer& a, const FittedLayer& b) { return a.tau < b.tau; });
  if (result.converged && !std::isfinite(result.log_likelihood)) result.converged = false;
  return result;
}

}  // namespace qwkt
