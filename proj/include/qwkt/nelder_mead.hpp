#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qwkt {

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Derivative-free minimization with the standard reflection / expansion /
/// contraction / shrink coefficients (1, 2, 1/2, 1/2).
///
/// Converges when every vertex lies within @p tolerance of the best vertex
/// in every coordinate. Non-finite objective values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, std::span<const double> step,
                             double tolerance, std::size_t max_iterations);

}  // namespace qwkt
