#include "qwkt/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qwkt {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, std::span<const double> step,
                             double tolerance, std::size_t max_iterations) {
  const std::size_t dim = start.size();
  auto eval = [&](const std::vector<double>& x) {
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += step[i];
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  NelderMeadResult result;
  auto converged = [&] {
    const auto& best = simplex[order[0]];
    for (std::size_t v = 1; v <= dim; ++v) {
      for (std::size_t i = 0; i < dim; ++i) {
        if (std::abs(simplex[order[v]][i] - best[i]) > tolerance) return false;
      }
    }
    return true;
  };

  std::size_t it = 0;
  for (;; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    if (converged()) {
      result.converged = true;
      break;
    }
    if (it >= max_iterations) break;

    const std::size_t worst = order[dim];
    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v < dim; ++v) {
      for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[order[v]][i] / dim;
    }
    auto along = [&](double t) {
      std::vector<double> x(dim);
      for (std::size_t i = 0; i < dim; ++i) x[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
      return x;
    };

    auto reflected = along(-1.0);
    const double fr = eval(reflected);
    if (fr < values[order[0]]) {
      auto expanded = along(-2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[worst] = std::move(expanded);
        values[worst] = fe;
      } else {
        simplex[worst] = std::move(reflected);
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[order[dim - 1]]) {
      simplex[worst] = std::move(reflected);
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    auto contracted = along(outside ? -0.5 : 0.5);
    const double fc = eval(contracted);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = std::move(contracted);
      values[worst] = fc;
      continue;
    }
    const auto& best = simplex[order[0]];
    for (std::size_t v = 1; v <= dim; ++v) {
      auto& x = simplex[order[v]];
      for (std::size_t i = 0; i < dim; ++i) x[i] = best[i] + 0.5 * (x[i] - best[i]);
      values[order[v]] = eval(x);
    }
  }

  result.x = simplex[order[0]];
  result.value = values[order[0]];
  result.iterations = it;
  return result;
}

}  // namespace qwkt
