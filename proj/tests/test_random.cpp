#include <doctest.h>

#include <cmath>
#include <vector>

#include "qwkt/random.hpp"

using namespace qwkt;

TEST_CASE("generator is reproducible and uniform") {
  Xoshiro256 a(1), b(1), c(2);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CHECK(a() != c());

  Xoshiro256 g(99);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = g.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sq += u * u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(sq / n - (sum / n) * (sum / n) == doctest::Approx(1.0 / 12).epsilon(0.02));
}

TEST_CASE("binomial moments across both samplers") {
  struct Case {
    std::uint64_t n;
    double p;
  };
  for (const auto& c : {Case{20, 0.1}, Case{5, 0.5}, Case{1000, 0.3}, Case{1000000, 0.01}, Case{1000, 0.97},
                        Case{100000000, 0.4}}) {
    Xoshiro256 g(c.n + 17);
    const int draws = 20000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < draws; ++i) {
      const auto k = sample_binomial(g, c.n, c.p);
      REQUIRE(k <= c.n);
      sum += static_cast<double>(k);
      sq += static_cast<double>(k) * static_cast<double>(k);
    }
    const double mean = sum / draws;
    const double var = sq / draws - mean * mean;
    const double mu = c.n * c.p, v = c.n * c.p * (1 - c.p);
    CHECK(std::abs(mean - mu) <= 5.0 * std::sqrt(v / draws));
    CHECK(var == doctest::Approx(v).epsilon(0.05));
  }
}

TEST_CASE("binomial edge cases") {
  Xoshiro256 g(5);
  CHECK(sample_binomial(g, 0, 0.5) == 0);
  CHECK(sample_binomial(g, 100, 0.0) == 0);
  CHECK(sample_binomial(g, 100, 1.0) == 100);
}

TEST_CASE("small-mean binomial matches the exact pmf") {
  Xoshiro256 g(11);
  const std::uint64_t n = 12;
  const double p = 0.25;
  std::vector<double> hist(n + 1, 0.0);
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) hist[sample_binomial(g, n, p)] += 1.0;
  double chi2 = 0.0;
  int dof = 0;
  for (std::uint64_t k = 0; k <= n; ++k) {
    const double pmf = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                                k * std::log(p) + (n - k) * std::log1p(-p));
    const double e = draws * pmf;
    if (e < 5) continue;
    chi2 += (hist[k] - e) * (hist[k] - e) / e;
    ++dof;
  }
  CHECK(chi2 < dof + 5.0 * std::sqrt(2.0 * dof));
}
