#pragma once

#include "lvr/power_series.hpp"
#include "lvr/rational.hpp"

#include <json.hpp>

#include <complex>

namespace lvr {

using cdouble = std::complex<double>;
using RationalSeries = PowerSeries<Rational>;
using ComplexSeries = PowerSeries<cdouble>;

// n-th coefficient of the formal solution of T = 1 + z T^p.
Rational fuss_catalan(int p, int n);

// First `length` Fuss-Catalan coefficients as a series in z.
RationalSeries fuss_catalan_series(int p, int length);

// Branch point of T_p: (p-1)^{p-1} / p^p.
double tp_branch_point(int p);

// Principal branch of T_p(z) (analytic at 0, T_p(0) = 1), continued along the
// segment [0, z]. Throws NumericError on stall or on landing on the cut.
cdouble tp_eval(int p, cdouble z);

// Closed form for p = 3 by radicals. Throws NumericError within 1e-6 of the
// cut [4/27, inf).
cdouble tp_eval_cardano(cdouble z);

// T = u + x T^p, equal to u * T_p(x u^{p-1}).
cdouble tp_bivariate(int p, cdouble x, cdouble u);

// a(lambda, u) = u T_p(-lambda u^{p-1}); solves u = a + lambda a^p.
cdouble scalar_a(int p, cdouble lambda, cdouble u);

nlohmann::json to_json(const RationalSeries& s);
nlohmann::json to_json(const ComplexSeries& s);
RationalSeries rational_series_from_json(const nlohmann::json& j);
ComplexSeries complex_series_from_json(const nlohmann::json& j);

ComplexSeries to_complex(const RationalSeries& s);

}  // namespace lvr
