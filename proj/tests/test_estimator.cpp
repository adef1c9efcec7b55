#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "qwkt/errors.hpp"
#include "qwkt/estimator.hpp"
#include "qwkt/nelder_mead.hpp"

using namespace qwkt;

namespace {

SpectralPattern ideal_spectrum(const BiphotonSource& src, const DelayProfile& p) {
  const auto grid = FrequencyGrid::for_source(src);
  const DetectionModel m(grid);
  return SpectralPattern(grid, outcome_probabilities(m, src, p).coincidence, SpectrumKind::ideal_density);
}

// Σ_j (∂p_j/∂τ)²/p_j from central differences of the binned outcome table.
double binned_fisher(const BiphotonSource& src, double tau, const DetectionModel& m) {
  const double h = 1e-4 / src.delta_temporal();
  const auto up = outcome_probabilities(m, src, DelayProfile::single(tau + h));
  const auto dn = outcome_probabilities(m, src, DelayProfile::single(tau - h));
  const auto at = outcome_probabilities(m, src, DelayProfile::single(tau));
  double g = 0.0;
  for (std::size_t j = 0; j < at.coincidence.size(); ++j) {
    for (int port = 0; port < 2; ++port) {
      const double p = port ? at.bunched[j] : at.coincidence[j];
      const double d = ((port ? up.bunched[j] : up.coincidence[j]) - (port ? dn.bunched[j] : dn.coincidence[j])) / (2 * h);
      if (p > 0) g += d * d / p;
    }
  }
  return g;
}

}  // namespace

TEST_CASE("single delays are recovered within one grid step") {
  const auto src = BiphotonSource::from_bandwidth_nm(20.0);
  const auto tg = FrequencyGrid::for_source(src).paired();
  const double lo = 5.0 / src.delta_temporal();
  const double hi = 0.8 * tg.t_max();
  for (int i = 0; i <= 24; ++i) {
    const double tau = lo + (hi - lo) * i / 24.0;
    const auto r = extract_delays(ideal_spectrum(src, DelayProfile::single(tau)), src);
    REQUIRE(r.delays.size() == 1);
    CHECK(std::abs(r.delays[0].tau - tau) <= tg.step());
    CHECK(r.delays[0].weight == doctest::Approx(1.0));
    CHECK(r.delays[0].height == doctest::Approx(0.5).epsilon(0.01));
    CHECK_FALSE(r.ambiguity_flag);
    CHECK(r.grid_resolution == tg.step());
  }
}

TEST_CASE("two separated layers give two delays and equal weights") {
  const auto src = BiphotonSource::from_bandwidth_nm(20.0);
  const auto r = extract_delays(ideal_spectrum(src, DelayProfile({{0.120e-12, 0.5}, {0.267e-12, 0.5}})), src);
  REQUIRE(r.delays.size() == 2);
  CHECK(std::abs(r.delays[0].tau - 0.120e-12) <= r.grid_resolution);
  CHECK(std::abs(r.delays[1].tau - 0.267e-12) <= r.grid_resolution);
  CHECK(std::abs(r.delays[0].weight - 0.5) <= 0.05);
  CHECK(std::abs(r.delays[1].weight - 0.5) <= 0.05);
  CHECK(r.delays[0].weight + r.delays[1].weight == doctest::Approx(1.0));
}

TEST_CASE("unequal weights follow the side-peak heights") {
  const auto src = BiphotonSource::from_bandwidth_nm(20.0);
  const auto r = extract_delays(ideal_spectrum(src, DelayProfile({{0.15e-12, 0.3}, {0.4e-12, 0.7}})), src);
  REQUIRE(r.delays.size() == 2);
  CHECK(r.delays[0].weight == doctest::Approx(0.3).epsilon(0.02));
  CHECK(r.delays[1].weight == doctest::Approx(0.7).epsilon(0.02));
}

TEST_CASE("closely spaced layers are flagged or resolved") {
  const auto src = BiphotonSource::from_bandwidth_nm(20.0);
  const auto r = extract_delays(ideal_spectrum(src, DelayProfile({{0.120e-12, 0.5}, {0.200e-12, 0.5}})), src);
  if (!r.ambiguity_flag) {
    REQUIRE(r.delays.size() == 2);
    CHECK(std::abs(r.delays[0].tau - 0.120e-12) <= r.grid_resolution);
    CHECK(std::abs(r.delays[1].tau - 0.200e-12) <= r.grid_resolution);
  }
  // A delay inside the main peak always raises the flag.
  const auto near = extract_delays(ideal_spectrum(src, DelayProfile::single(2.5 / src.delta_temporal())), src);
  CHECK(near.ambiguity_flag);
}

TEST_CASE("malformed spectra") {
  const auto src = BiphotonSource::from_bandwidth_nm(20.0);
  const auto grid = FrequencyGrid::for_source(src);
  CHECK_THROWS_AS(extract_delays(SpectralPattern(grid, std::vector<double>(grid.size(), 0.0), SpectrumKind::ideal_density), src),
                  MalformedSpectrumError);
}

TEST_CASE("nelder-mead minimizes the Rosenbrock function") {
  auto rosen = [](std::span<const double> x) {
    return 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1 - x[0]) * (1 - x[0]);
  };
  const std::vector<double> step{0.5, 0.5};
  const auto r = nelder_mead(rosen, {-1.2, 1.0}, step, 1e-8, 5000);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
  const auto capped = nelder_mead(rosen, {-1.2, 1.0}, step, 1e-12, 10);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 10);
}

TEST_CASE("maximum likelihood fit") {
  const auto src = BiphotonSource::from_bandwidth_nm(10.0);
  const auto grid = FrequencyGrid::for_source(src);
  const DetectionModel m(grid, 0.0, 1.0, 100000);

  SUBCASE("zero counts are rejected") {
    auto t = outcome_probabilities(m, src, DelayProfile::single(0.267e-12));
    CHECK_THROWS_AS(mle_fit(t, m, src, 1), InputError);
    t.counts = OutcomeCounts{};
    t.counts->coincidence.assign(grid.size(), 0);
    t.counts->bunched.assign(grid.size(), 0);
    CHECK_THROWS_AS(mle_fit(t, m, src, 1), InputError);
    CHECK_THROWS_AS(mle_fit(sample_counts(t, 10, 1), m, src, 5), InputError);
  }

  SUBCASE("single layer") {
    const auto t = sample_counts(outcome_probabilities(m, src, DelayProfile::single(0.267e-12)), 100000, 11);
    const auto fit = mle_fit(t, m, src, 1);
    REQUIRE(fit.layers.size() == 1);
    CHECK(fit.converged);
    CHECK(std::isfinite(fit.log_likelihood));
    const double crb = 1.0 / (2.0 * src.sigma_spectral() * std::sqrt(1e5));
    CHECK(std::abs(fit.layers[0].tau - 0.267e-12) <= 5.0 * crb);
    CHECK(fit.layers[0].weight == 1.0);
    CHECK(fit.layers[0].tau_stderr == doctest::Approx(crb).epsilon(0.2));
  }

  SUBCASE("superfluous layer is flagged by a small weight or lands on the true delay") {
    const auto t = sample_counts(outcome_probabilities(m, src, DelayProfile::single(0.3e-12)), 100000, 5);
    const auto fit = mle_fit(t, m, src, 2);
    REQUIRE(fit.layers.size() == 2);
    CHECK(fit.layers[0].weight + fit.layers[1].weight == doctest::Approx(1.0).epsilon(1e-9));
    const double crb = 1.0 / (2.0 * src.sigma_spectral() * std::sqrt(1e5));
    bool ok = fit.near_zero_weight;
    if (!ok) ok = std::abs(fit.layers[0].tau - 0.3e-12) < 20 * crb && std::abs(fit.layers[1].tau - 0.3e-12) < 20 * crb;
    CHECK(ok);
  }

  SUBCASE("coincidence-only counts use the conditional likelihood") {
    auto t = sample_counts(outcome_probabilities(m, src, DelayProfile::single(0.2e-12)), 100000, 8);
    t.counts->bunched.clear();
    const auto fit = mle_fit(t, m, src, 1);
    CHECK(std::abs(fit.layers[0].tau - 0.2e-12) <= 10.0 / (2.0 * src.sigma_spectral() * std::sqrt(5e4)));
    // Loss drops out of the conditional likelihood.
    const DetectionModel lossy(grid, 0.3, 1.0, 100000);
    const std::vector<double> tau{0.2e-12}, w{1.0};
    CHECK(log_likelihood(t, m, src, tau, w) == doctest::Approx(log_likelihood(t, lossy, src, tau, w)));
  }

  SUBCASE("likelihood at the truth beats perturbed parameters") {
    int wins = 0;
    const int seeds = 40;
    const double crb = 1.0 / (2.0 * src.sigma_spectral() * std::sqrt(1e5));
    for (int s = 0; s < seeds; ++s) {
      const auto t = sample_counts(outcome_probabilities(m, src, DelayProfile::single(0.25e-12)), 100000, 100 + s);
      const std::vector<double> w{1.0}, truth{0.25e-12}, off{0.25e-12 + 10 * crb};
      if (log_likelihood(t, m, src, truth, w) >= log_likelihood(t, m, src, off, w)) ++wins;
    }
    CHECK(wins >= 0.95 * seeds);
  }
}

TEST_CASE("two-port Fisher information") {
  const auto src = BiphotonSource::from_bandwidth_nm(10.0);
  const double s = src.sigma_spectral();
  const auto grid = FrequencyGrid::for_source(src);

  for (double tau : {0.05e-12, 0.5e-12, 2e-12}) {
    const auto r = fisher_information(src, tau, DetectionModel(grid, 0.0, 1.0, 10000));
    CHECK(r.g_omega == doctest::Approx(4 * s * s).epsilon(1e-6));
    CHECK(r.crb * std::sqrt(10000 * r.g_omega) == doctest::Approx(1.0).epsilon(1e-15));
    const auto lossy = fisher_information(src, tau, DetectionModel(grid, 0.2, 1.0));
    CHECK(lossy.g_omega == doctest::Approx(0.64 * 4 * s * s).epsilon(1e-6));
  }

  const auto small = fisher_information(src, 1e-4 / s, DetectionModel(grid, 0.0, 0.9));
  CHECK(small.g_omega <= 1e-4 * 4 * s * s);
  CHECK(fisher_information(src, 0.3e-12, DetectionModel(grid, 0.0, 0.0)).g_omega == 0.0);
  CHECK(std::isinf(fisher_information(src, 0.3e-12, DetectionModel(grid, 0.0, 0.0)).crb));

  // Against the binned outcome table.
  for (double alpha : {1.0, 0.9, 0.6}) {
    const DetectionModel m(grid, 0.1, alpha);
    const double g = fisher_information(src, 0.2e-12, m).g_omega;
    CHECK(g == doctest::Approx(binned_fisher(src, 0.2e-12, m)).epsilon(1e-4));
  }
}

TEST_CASE("printed-model Fisher information against pointwise differences") {
  const auto src = BiphotonSource::from_bandwidth_nm(10.0);
  const auto grid = FrequencyGrid::for_source(src);
  const double s = src.sigma_spectral();
  for (double gamma : {0.0, 0.2}) {
    for (double alpha : {1.0, 0.9}) {
      for (double tau : {0.1e-12, 0.4e-12}) {
        const oracle::Eq16 e{s, gamma, alpha};
        const double h = 1e-5 / src.delta_temporal();
        auto density = [&](double w) {
          const double d = (e.p2(w, tau + h) - e.p2(w, tau - h)) / (2 * h);
          const double p2 = e.p2(w, tau), p1 = e.p1(w, tau);
          return (p2 > 0 ? d * d / p2 : 0.0) + (p1 > 0 ? d * d / p1 : 0.0);
        };
        const double ref = oracle::simpson(density, -12 * s, 12 * s, 200000);
        const auto r = fisher_information(src, tau, DetectionModel(grid, gamma, alpha, 1, DetectionVariant::paper_eq16));
        CHECK(r.variant == DetectionVariant::paper_eq16);
        CHECK(r.g_omega == doctest::Approx(ref).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("quantum Fisher information") {
  const auto src = BiphotonSource::from_bandwidth_nm(10.0);
  const double s = src.sigma_spectral();
  const auto q = quantum_fisher_information(src, 10000);
  CHECK(q.q == s * s);
  CHECK(q.q_quadrature == doctest::Approx(s * s).epsilon(1e-6));
  CHECK(q.qcrb == 1.0 / (2.0 * s * std::sqrt(10000.0)));
  CHECK(q.qcrb == doctest::Approx(1.0 / (2 * s * 100)).epsilon(1e-12));
  CHECK(q.qcrb == doctest::Approx(1.74e-16).epsilon(1e-3));
  const auto q2 = quantum_fisher_information(BiphotonSource(2 * s), 10000);
  CHECK(q2.qcrb == doctest::Approx(0.5 * q.qcrb).epsilon(1e-9));

  // Idler-frequency variance over the two-dimensional density with a finite pump width.
  const JointAmplitude f(src, 0.3 * s);
  const double wp = f.pump_frequency(), sd = f.difference_sigma(), sp = f.pump_bandwidth();
  auto moment = [&](int k) {
    return oracle::simpson(
        [&](double big) {
          return oracle::simpson(
              [&](double sum) {
                const double v = f(0.5 * (wp + sum + big), 0.5 * (wp + sum - big));
                const double wi = 0.5 * (sum - big);  // relative to ω_p/2
                return v * v * std::pow(wi, k);
              },
              -10 * sp, 10 * sp, 200);
        },
        -10 * sd, 10 * sd, 400);
  };
  const double m0 = moment(0), m1 = moment(1), m2 = moment(2);
  CHECK(m2 / m0 - (m1 / m0) * (m1 / m0) == doctest::Approx(s * s + sp * sp / 4).epsilon(1e-6));
}

TEST_CASE("classical information never exceeds the quantum bound") {
  const auto src = BiphotonSource::from_bandwidth_nm(10.0);
  const auto grid = FrequencyGrid::for_source(src);
  const double q4 = 4 * quantum_fisher_information(src, 1).q;
  for (double gamma : {0.0, 0.1, 0.2, 0.4, 0.6}) {
    for (double alpha : {1.0, 0.95, 0.9, 0.7, 0.5}) {
      for (double tau : {1e-15, 0.05e-12, 0.2e-12, 0.5e-12, 2e-12}) {
        const double g = fisher_information(src, tau, DetectionModel(grid, gamma, alpha)).g_omega;
        CHECK(g <= q4 * (1 + 1e-9));
        if (gamma == 0.0 && alpha == 1.0) CHECK(g == doctest::Approx(q4).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("sweep tables and trends") {
  const double s10 = oracle::sigma_from_nm(10, 810);
  SUBCASE("empty axis") {
    CHECK(sweep({{}, {1e-13}, {0.0}, {1.0}}).cells.empty());
  }
  SUBCASE("limits") {
    CHECK_THROWS_AS(sweep({std::vector<double>(257, s10), {1e-13}, {0.0}, {1.0}}), DomainError);
    CHECK_THROWS_AS(sweep({{s10}, {std::nan("")}, {0.0}, {1.0}}), DomainError);
  }
  SUBCASE("bandwidth and delay trends") {
    SweepAxes ax;
    for (int i = 0; i < 20; ++i) ax.sigma.push_back(s10 * (0.5 + 0.1 * i));
    ax.tau = {0.5e-12};
    ax.gamma = {0.0};
    ax.alpha = {1.0, 0.9};
    const auto t = sweep(ax);
    CHECK(t.ok_count() == 40);
    int seen = 0;
    for (const auto& tr : t.trends) {
      if (tr.axis == 0) {
        CHECK(tr.trend == Trend::increasing);
        ++seen;
      }
    }
    CHECK(seen == 2);

    SweepAxes tx{{s10}, {}, {0.0}, {1.0, 0.9}};
    for (int i = 0; i < 12; ++i) tx.tau.push_back(1e-4 / s10 * std::pow(10.0, 0.3 * i));
    SweepOptions opt;
    opt.threads = 3;
    const auto tt = sweep(tx, opt);
    const auto serial = sweep(tx);
    for (std::size_t i = 0; i < tt.cells.size(); ++i) {
      CHECK(std::get<FisherReport>(tt.cells[i].result).g_omega ==
            std::get<FisherReport>(serial.cells[i].result).g_omega);
    }
    for (const auto& tr : tt.trends) {
      if (tr.axis == 1 && tr.alpha_index == 0) CHECK(tr.trend == Trend::constant);
    }
    for (std::size_t i = 0; i < tt.cells.size(); i += 2) {
      const double g1 = std::get<FisherReport>(tt.cells[i].result).g_omega;
      const double g09 = std::get<FisherReport>(tt.cells[i + 1].result).g_omega;
      CHECK(g09 < g1);
    }
  }
  SUBCASE("failing cells carry their error") {
    const auto t = sweep({{s10, -1.0}, {1e-13}, {0.0}, {1.0}});
    CHECK(t.ok_count() == 1);
    CHECK_FALSE(t.cells[1].ok());
    CHECK_FALSE(std::get<std::string>(t.cells[1].result).empty());
  }
}

TEST_CASE("trend classification") {
  CHECK(classify_trend(std::vector<double>{1, 2, 3}) == Trend::increasing);
  CHECK(classify_trend(std::vector<double>{3, 2, 1}) == Trend::decreasing);
  CHECK(classify_trend(std::vector<double>{1, 1 + 1e-9, 1}) == Trend::constant);
  CHECK(classify_trend(std::vector<double>{1, 1, 2}) == Trend::nondecreasing);
  CHECK(classify_trend(std::vector<double>{2, 2, 1}) == Trend::nonincreasing);
  CHECK(classify_trend(std::vector<double>{1, 3, 2}) == Trend::mixed);
  CHECK(classify_trend(std::vector<double>{}) == Trend::constant);
}
