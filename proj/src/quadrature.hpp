#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>

#include "errors.hpp"

namespace cksd {

// Adaptive quadrature on a finite interval. tanh-sinh tolerates integrable
// endpoint singularities, which show up in hazard-weighted integrands.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10) {
  if (!(a < b)) return 0.0;
  boost::math::quadrature::tanh_sinh<double> quad;
  double error = 0.0, l1 = 0.0;
  double v = quad.integrate(f, a, b, tol, &error, &l1);
  if (!std::isfinite(v)) {
    fail(ErrorCode::numeric, "quadrature did not converge on the interval");
  }
  return v;
}

// Sum of tanh-sinh integrals over subintervals of bounded length. The level
// doubling inside a single long interval can terminate before it has seen a
// localized or oscillatory feature; short chunks remove that failure mode.
inline double integrate_chunked(const std::function<double(double)>& f,
                                double a, double b, double tol = 1e-11,
                                double chunk = 0.0) {
  if (!(a < b)) return 0.0;
  if (chunk <= 0.0) chunk = std::max(0.5, (b - a) / 256.0);
  double total = 0.0;
  for (double lo = a; lo < b; lo += chunk) {
    total += integrate(f, lo, std::min(lo + chunk, b), tol);
  }
  return total;
}

}  // namespace cksd
