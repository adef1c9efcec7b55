#include "qwkt/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "qwkt/errors.hpp"

namespace qwkt {

QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     std::span<const double> breakpoints, double rel_tol) {
  using boost::math::quadrature::gauss_kronrod;
  if (breakpoints.size() < 2) throw NumericalError("quadrature needs at least two breakpoints");

  QuadratureResult out;
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    double err = 0.0;
    double seg_l1 = 0.0;
    out.value += gauss_kronrod<double, 31>::integrate(f, a, b, 12, rel_tol * 1e-2, &err, &seg_l1);
    out.error += err;
    l1 += seg_l1;
    ++out.segments;
  }
  if (!std::isfinite(out.value) || out.error > rel_tol * l1 + 1e-300) {
    std::ostringstream msg;
    msg << "adaptive quadrature missed tolerance " << rel_tol << ": value " << out.value
        << ", error estimate " << out.error << ", L1 " << l1 << ", segments " << out.segments;
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace qwkt
