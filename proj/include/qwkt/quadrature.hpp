#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace qwkt {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;        ///< summed Kronrod error estimates
  std::size_t segments = 0;  ///< number of breakpoint intervals
};

/// Adaptive Gauss–Kronrod integration over consecutive breakpoint intervals.
///
/// Breakpoints must be sorted ascending. Placing them at the integrand's
/// oscillation nodes keeps every interval smooth. Throws NumericalError
/// with the reached error when the estimate exceeds rel_tol·∫|f|.
QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     std::span<const double> breakpoints, double rel_tol = 1e-10);

}  // namespace qwkt
