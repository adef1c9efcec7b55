#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "oracles.hpp"
#include "qwkt/errors.hpp"
#include "qwkt/hom.hpp"
#include "qwkt/random.hpp"

using namespace qwkt;

namespace {

// ∫∫|A(ω_s, ω_i)|² / ∫∫|f|² over rotated coordinates Ω = ω_s - ω_i and
// S = ω_s + ω_i - ω_p, with Simpson in both directions.
double coincidence_2d(const JointAmplitude& f, double tau) {
  const double sd = f.difference_sigma();
  const double sp = f.pump_bandwidth();
  const double wp = f.pump_frequency();
  auto integrate = [&](auto&& g) {
    return oracle::simpson(
        [&](double big) {
          return oracle::simpson(
              [&](double s) {
                const double ws = 0.5 * (wp + s + big);
                const double wi = 0.5 * (wp + s - big);
                return g(ws, wi);
              },
              -10.0 * sp, 10.0 * sp, 80);
        },
        -10.0 * sd, 10.0 * sd, 2000);
  };
  const double num = integrate([&](double ws, double wi) { return std::norm(antibunch_amplitude(f, tau, ws, wi)); });
  const double den = integrate([&](double ws, double wi) {
    const double v = f(ws, wi);
    return v * v;
  });
  return num / den;
}

}  // namespace

TEST_CASE("joint amplitude is normalized") {
  const auto src = BiphotonSource::from_bandwidth_nm(10.0);
  const JointAmplitude f(src);
  CHECK(f.symmetric());
  CHECK(f.difference_sigma() == doctest::Approx(2.0 * src.sigma_spectral()));
  const double sd = f.difference_sigma(), sp = f.pump_bandwidth(), wp = f.pump_frequency();
  // Jacobian of (ω_s, ω_i) → (Ω, S) is 1/2.
  const double norm = 0.5 * oracle::simpson(
                                [&](double big) {
                                  return oracle::simpson(
                                      [&](double s) {
                                        const double v = f(0.5 * (wp + s + big), 0.5 * (wp + s - big));
                                        return v * v;
                                      },
                                      -10 * sp, 10 * sp, 80);
                                },
                                -10 * sd, 10 * sd, 400);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("HOM dip against two-dimensional quadrature") {
  const auto src = BiphotonSource::from_bandwidth_nm(10.0);
  CHECK(coincidence_probability(src, 0.0) == 0.0);
  const JointAmplitude f(src);
  const double s = src.sigma_spectral();
  for (double tau : {0.01e-12, 0.03e-12, 0.05e-12, 0.1e-12, 0.3e-12}) {
    const double closed = (1.0 - std::exp(-2.0 * s * s * tau * tau)) / 2.0;
    CHECK(coincidence_probability(src, tau) == doctest::Approx(closed).epsilon(1e-12));
    CHECK(std::abs(coincidence_2d(f, tau) - coincidence_probability(src, tau)) <= 1e-6);
  }
  CHECK(coincidence_probability(src, 10e-12) == doctest::Approx(0.5));
}

TEST_CASE("detection model validation") {
  const FrequencyGrid g(-1e14, 1e14, 64);
  CHECK_THROWS_AS(DetectionModel(g, 1.0), DomainError);
  CHECK_THROWS_AS(DetectionModel(g, -0.1), DomainError);
  CHECK_THROWS_AS(DetectionModel(g, 0.0, 1.1), DomainError);
  CHECK_THROWS_AS(DetectionModel(g, 0.0, 1.0, 0), DomainError);
}

TEST_CASE("two-port outcome table") {
  const auto src = BiphotonSource::from_bandwidth_nm(10.0);
  const auto grid = FrequencyGrid::for_source(src);
  const double s = src.sigma_spectral();

  SUBCASE("probabilities sum to one and match the closed form") {
    const DetectionModel m(grid, 0.2, 0.9);
    const auto t = outcome_probabilities(m, src, DelayProfile::single(0.267e-12));
    CHECK(t.total_probability() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t.single_click == doctest::Approx(2 * 0.2 * 0.8));
    CHECK(t.no_click == doctest::Approx(0.04));
    for (std::size_t j = 0; j < grid.size(); j += 311) {
      const double w = grid[j];
      const double mass = std::erf((w + 0.5 * grid.step()) / (2 * std::sqrt(2.0) * s)) / 2 -
                          std::erf((w - 0.5 * grid.step()) / (2 * std::sqrt(2.0) * s)) / 2;
      const double expect = 0.64 * mass * (1 - 0.9 * std::cos(w * 0.267e-12)) / 2;
      CHECK(t.coincidence[j] == doctest::Approx(expect).epsilon(1e-6));
    }
  }

  SUBCASE("zero delay, unit visibility gives a perfect dip") {
    const DetectionModel m(grid, 0.0, 1.0);
    const auto t = outcome_probabilities(m, src, DelayProfile::single(0.0));
    CHECK(std::accumulate(t.coincidence.begin(), t.coincidence.end(), 0.0) <= 1e-15);
  }

  SUBCASE("coincidence mass equals the HOM probability") {
    const DetectionModel m(grid, 0.0, 1.0);
    for (double tau : {0.02e-12, 0.05e-12, 0.2e-12}) {
      const auto t = outcome_probabilities(m, src, DelayProfile::single(tau));
      const double sum = std::accumulate(t.coincidence.begin(), t.coincidence.end(), 0.0);
      CHECK(sum == doctest::Approx(coincidence_probability(src, tau)).epsilon(1e-6));
    }
  }
}

TEST_CASE("paper-eq16 outcome table is normalized per bin") {
  const auto src = BiphotonSource::from_bandwidth_nm(10.0);
  const auto grid = FrequencyGrid::for_source(src);
  const DetectionModel m(grid, 0.2, 0.9, 1, DetectionVariant::paper_eq16);
  const auto t = outcome_probabilities(m, src, DelayProfile::single(0.2e-12));
  CHECK(t.total_probability() == doctest::Approx(1.0).epsilon(1e-12));
  const oracle::Eq16 e{src.sigma_spectral(), 0.2, 0.9};
  for (std::size_t j = 0; j < grid.size(); j += 509) {
    CHECK(t.coincidence[j] == doctest::Approx(e.p2(grid[j], 0.2e-12)).epsilon(1e-12));
    CHECK(t.bunched[j] == doctest::Approx(e.p1(grid[j], 0.2e-12)).epsilon(1e-12));
    CHECK(t.lost[j] == doctest::Approx(0.04));
  }
}

TEST_CASE("sampled counts") {
  const auto src = BiphotonSource::from_bandwidth_nm(10.0);
  const auto grid = FrequencyGrid::for_source(src);
  const DetectionModel m(grid, 0.1, 0.95);
  const auto t = outcome_probabilities(m, src, DelayProfile::single(0.2e-12));

  CHECK_THROWS_AS(sample_counts(t, 0, 1), InputError);
  CHECK_THROWS_AS(sample_counts(t, (1ull << 53) + 1, 1), InputError);

  const std::uint64_t n = 1000000;
  const auto a = sample_counts(t, n, 42);
  const auto b = sample_counts(t, n, 42);
  REQUIRE(a.counts);
  CHECK(a.counts->total() == n);
  CHECK(a.counts->coincidence == b.counts->coincidence);
  CHECK(a.counts->single_click == b.counts->single_click);
  CHECK(sample_counts(t, n, 43).counts->coincidence != a.counts->coincidence);

  // Aggregate channels against their binomial spread.
  auto near = [&](double count, double p) {
    return std::abs(count - n * p) <= 5.0 * std::sqrt(n * p * (1 - p));
  };
  const double pc = std::accumulate(t.coincidence.begin(), t.coincidence.end(), 0.0);
  const double nc = static_cast<double>(
      std::accumulate(a.counts->coincidence.begin(), a.counts->coincidence.end(), std::uint64_t{0}));
  CHECK(near(nc, pc));
  CHECK(near(static_cast<double>(a.counts->single_click), t.single_click));
  CHECK(near(static_cast<double>(a.counts->no_click), t.no_click));

  // Per-bin chi-square over well-populated bins.
  double chi2 = 0.0;
  int dof = 0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double e = n * t.bunched[j];
    if (e < 50) continue;
    const double d = static_cast<double>(a.counts->bunched[j]) - e;
    chi2 += d * d / e;
    ++dof;
  }
  REQUIRE(dof > 100);
  CHECK(chi2 < dof + 5.0 * std::sqrt(2.0 * dof));
}

TEST_CASE("paper-eq16 sampling draws a trinomial per bin") {
  const auto src = BiphotonSource::from_bandwidth_nm(10.0);
  const auto grid = FrequencyGrid(-12 * src.sigma_spectral(), 12 * src.sigma_spectral(), 64);
  const DetectionModel m(grid, 0.2, 0.9, 1, DetectionVariant::paper_eq16);
  const auto t = outcome_probabilities(m, src, DelayProfile::single(0.2e-12));
  const auto s = sample_counts(t, 10000, 3);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(s.counts->coincidence[j] + s.counts->bunched[j] + s.counts->lost[j] == 10000);
  }
  CHECK(s.counts->total() == 10000 * grid.size());
}
