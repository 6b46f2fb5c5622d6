#pragma once

#include <complex>
#include <functional>

namespace lvr {

// int_0^inf f(t) dt by exp_sinh, real and imaginary parts separately. The
// integrand is taken as 0 past t = 745, so it must carry a factor e^{-t}
// or faster decay. Throws NumericError when the estimate does not reach
// 1e3 * tol relative to the L1 norm. `error` receives the estimate.
std::complex<double> integrate_half_line(const std::function<std::complex<double>(double)>& f, double tol,
                                         double* error = nullptr);

}  // namespace lvr
