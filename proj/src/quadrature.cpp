#include "lvr/quadrature.hpp"

#include "lvr/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>

namespace lvr {

std::complex<double> integrate_half_line(const std::function<std::complex<double>(double)>& f, double tol,
                                         double* error) {
  boost::math::quadrature::exp_sinh<double> es;
  double err[2] = {0.0, 0.0}, l1[2] = {0.0, 0.0}, v[2];
  for (int part = 0; part < 2; ++part)
    v[part] = es.integrate(
        [&](double t) {
          if (t > 745.0) return 0.0;
          const std::complex<double> y = f(t);
          return part ? y.imag() : y.real();
        },
        tol, &err[part], &l1[part]);
  // Judged against the combined size, so a vanishing part does not fail.
  if (!std::isfinite(v[0]) || !std::isfinite(v[1]) ||
      err[0] + err[1] > 1e3 * tol * std::max(l1[0] + l1[1], 1e-300))
    throw NumericError("quadrature on [0, inf) did not converge");
  if (error) *error = err[0] + err[1];
  return {v[0], v[1]};
}

}  // namespace lvr
