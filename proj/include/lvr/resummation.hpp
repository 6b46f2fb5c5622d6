#pragma once

#include "lvr/series.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lvr {

// b_n = a_n / (qn)!.
RationalSeries borel_transform(const RationalSeries& a, int q);
ComplexSeries borel_transform(const ComplexSeries& a, int q);

// a_n = (-1)^n (pn)! / n!, the expansion of int_0^inf exp(-t - lambda t^p) dt.
RationalSeries toy_series(int p, int length);

// P(t) / Q(t) with Q(0) = 1, deg P <= L, deg Q <= M.
struct PadeApproximant {
  int L = 0, M = 0;
  std::vector<cdouble> num, den;  // ascending powers
  std::vector<cdouble> poles;     // roots of Q

  cdouble operator()(cdouble t) const;
  // Poles with |Im| <= tol * max(1, |pole|) and Re > 0.
  std::vector<cdouble> poles_on_positive_axis(double tol = 1e-8) const;
  // Smallest distance from a pole to [0, inf).
  double distance_to_positive_axis() const;
};

// Requires L + M + 1 <= series length. Exact solve for rational input.
PadeApproximant pade_continuation(const RationalSeries& b, int L, int M);
PadeApproximant pade_continuation(const ComplexSeries& b, int L, int M);

struct BorelSummation {
  int q = 1;
  RationalSeries series;
  RationalSeries transform;
  std::function<cdouble(cdouble)> B;  // continuation of the transform
  std::string description;
  // Optional lower-order continuation; its disagreement enters the error.
  std::function<cdouble(cdouble)> B_check;
};

// Continuation by the [L/M] Padé approximant, with [L-1/M-1] as the check.
BorelSummation borel_pade(const RationalSeries& series, int q, int L, int M);
// Continuation by a known closed form.
BorelSummation borel_closed_form(const RationalSeries& series, int q, std::function<cdouble(cdouble)> B,
                                 std::string description);

struct BorelValue {
  cdouble value = 0.0;
  double error_estimate = 0.0;
};

// F(z) = int_0^inf B(z s^q) e^{-s} ds. Throws NumericError when the Padé
// continuation has a pole on the integration ray.
BorelValue borel_sum(const BorelSummation& s, cdouble z);
// F(z) = (1/q) int_0^inf B(z r) r^{1/q - 1} exp(-r^{1/q}) dr, the t-form on
// the ray t = z r.
BorelValue borel_sum_t_form(const BorelSummation& s, cdouble z);

struct RemainderFit {
  int q = 1;
  std::vector<double> panel;
  int n_max = 0;
  double sigma = 0.0;                          // max of sigma_needed over n >= 1
  std::vector<std::vector<double>> remainder;  // [n][panel index], n = 0..n_max
  std::vector<std::vector<double>> sigma_needed;
  std::vector<std::vector<double>> slack;  // sigma^n (qn)! |lambda|^{n+1} - |R_n|
  std::vector<int> failure_rows;           // n with some negative slack
};

// |R_n(lambda)| = |oracle(lambda) - sum_{m<=n} a_m lambda^m| on the panel;
// q >= 0. The n = 0 row uses sigma^0 = 1 and is not part of the fit.
RemainderFit remainder_bound_fit(const std::function<double(double)>& oracle, const RationalSeries& series, int q,
                                 const std::vector<double>& panel, int n_max);

// max over [0, T] of |B(t)| e^{-t/R}, on a uniform grid.
double growth_constant(const std::function<cdouble(cdouble)>& B, double T, double R, int samples = 2001);

}  // namespace lvr
