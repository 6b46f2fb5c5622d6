#include "lvr/resummation.hpp"

#include "lvr/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace lvr {

RationalSeries borel_transform(const RationalSeries& a, int q) {
  require(q >= 1, "borel_transform: q must be >= 1");
  std::vector<Rational> b;
  for (std::size_t n = 0; n < a.coeffs().size(); ++n) b.push_back(a.coeffs()[n] / Rational(factorial(q * n)));
  return RationalSeries(std::move(b), a.variable());
}

ComplexSeries borel_transform(const ComplexSeries& a, int q) {
  require(q >= 1, "borel_transform: q must be >= 1");
  std::vector<cdouble> b;
  for (std::size_t n = 0; n < a.coeffs().size(); ++n) b.push_back(a.coeffs()[n] / to_double(Rational(factorial(q * n))));
  return ComplexSeries(std::move(b), a.variable());
}

RationalSeries toy_series(int p, int length) {
  require(p >= 1 && length >= 1, "toy_series: bad arguments");
  std::vector<Rational> v;
  for (int n = 0; n < length; ++n) v.push_back(Rational(n % 2 ? -1 : 1) * Rational(factorial(p * n)) / Rational(factorial(n)));
  return RationalSeries(std::move(v));
}

namespace {

cdouble horner(const std::vector<cdouble>& c, cdouble t) {
  cdouble s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * t + *it;
  return s;
}

std::vector<cdouble> polynomial_roots(std::vector<cdouble> c) {
  while (!c.empty() && std::abs(c.back()) == 0.0) c.pop_back();
  const int d = static_cast<int>(c.size()) - 1;
  if (d < 1) return {};
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 1; i < d; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) C(i, d - 1) = -c[i] / c[d];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
  std::vector<cdouble> r(es.eigenvalues().data(), es.eigenvalues().data() + d);
  return r;
}

PadeApproximant finish(int L, int M, std::vector<cdouble> num, std::vector<cdouble> den) {
  PadeApproximant p;
  p.L = L;
  p.M = M;
  p.num = std::move(num);
  p.den = std::move(den);
  p.poles = polynomial_roots(p.den);
  return p;
}

void check_orders(std::size_t length, int L, int M) {
  require(L >= 0 && M >= 0, "pade: orders must be >= 0");
  require(std::size_t(L + M + 1) <= length, "pade: L + M + 1 exceeds the available coefficients");
}

}  // namespace

cdouble PadeApproximant::operator()(cdouble t) const { return horner(num, t) / horner(den, t); }

std::vector<cdouble> PadeApproximant::poles_on_positive_axis(double tol) const {
  std::vector<cdouble> out;
  for (const auto& z : poles)
    if (z.real() > 0 && std::abs(z.imag()) <= tol * std::max(1.0, std::abs(z))) out.push_back(z);
  return out;
}

double PadeApproximant::distance_to_positive_axis() const {
  double d = INFINITY;
  for (const auto& z : poles) d = std::min(d, z.real() >= 0 ? std::abs(z.imag()) : std::abs(z));
  return d;
}

PadeApproximant pade_continuation(const RationalSeries& b, int L, int M) {
  check_orders(b.coeffs().size(), L, M);
  const auto& c = b.coeffs();
  auto coef = [&](int i) { return i < 0 ? Rational(0) : c[i]; };
  // Denominator: sum_{j=1..M} c_{L+i-j} q_j = -c_{L+i}, i = 1..M.
  std::vector<std::vector<Rational>> A(M, std::vector<Rational>(M + 1));
  for (int i = 1; i <= M; ++i) {
    for (int j = 1; j <= M; ++j) A[i - 1][j - 1] = coef(L + i - j);
    A[i - 1][M] = -coef(L + i);
  }
  for (int col = 0; col < M; ++col) {
    int piv = col;
    while (piv < M && A[piv][col] == 0) ++piv;
    if (piv == M) throw NumericError("pade: degenerate denominator system");
    std::swap(A[col], A[piv]);
    for (int r = 0; r < M; ++r) {
      if (r == col || A[r][col] == 0) continue;
      const Rational f = A[r][col] / A[col][col];
      for (int k = col; k <= M; ++k) A[r][k] -= f * A[col][k];
    }
  }
  std::vector<Rational> q(M + 1);
  q[0] = 1;
  for (int j = 1; j <= M; ++j) q[j] = A[j - 1][M] / A[j - 1][j - 1];
  std::vector<cdouble> num(L + 1), den(M + 1);
  for (int i = 0; i <= L; ++i) {
    Rational s = 0;
    for (int j = 0; j <= std::min(i, M); ++j) s += q[j] * c[i - j];
    num[i] = to_double(s);
  }
  for (int j = 0; j <= M; ++j) den[j] = to_double(q[j]);
  return finish(L, M, std::move(num), std::move(den));
}

PadeApproximant pade_continuation(const ComplexSeries& b, int L, int M) {
  check_orders(b.coeffs().size(), L, M);
  const auto& c = b.coeffs();
  auto coef = [&](int i) { return i < 0 ? cdouble(0.0) : c[i]; };
  Eigen::MatrixXcd A(M, M);
  Eigen::VectorXcd rhs(M);
  for (int i = 1; i <= M; ++i) {
    for (int j = 1; j <= M; ++j) A(i - 1, j - 1) = coef(L + i - j);
    rhs(i - 1) = -coef(L + i);
  }
  std::vector<cdouble> q(M + 1, 0.0);
  q[0] = 1.0;
  if (M > 0) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    if (!lu.isInvertible()) throw NumericError("pade: degenerate denominator system");
    const Eigen::VectorXcd x = lu.solve(rhs);
    for (int j = 1; j <= M; ++j) q[j] = x(j - 1);
  }
  std::vector<cdouble> num(L + 1, 0.0);
  for (int i = 0; i <= L; ++i)
    for (int j = 0; j <= std::min(i, M); ++j) num[i] += q[j] * c[i - j];
  return finish(L, M, std::move(num), std::move(q));
}

BorelSummation borel_pade(const RationalSeries& series, int q, int L, int M) {
  BorelSummation s;
  s.q = q;
  s.series = series;
  s.transform = borel_transform(series, q);
  const PadeApproximant main = pade_continuation(s.transform, L, M);
  if (!main.poles_on_positive_axis().empty())
    throw NumericError("borel: Pade continuation has a pole on the positive axis");
  s.B = [main](cdouble t) { return main(t); };
  if (L >= 1 && M >= 1) {
    const PadeApproximant check = pade_continuation(s.transform, L - 1, M - 1);
    s.B_check = [check](cdouble t) { return check(t); };
  }
  s.description = "pade[" + std::to_string(L) + "/" + std::to_string(M) + "]";
  return s;
}

BorelSummation borel_closed_form(const RationalSeries& series, int q, std::function<cdouble(cdouble)> B,
                                 std::string description) {
  BorelSummation s;
  s.q = q;
  s.series = series;
  s.transform = borel_transform(series, q);
  s.B = std::move(B);
  s.description = std::move(description);
  return s;
}

namespace {

void check_ray(const BorelSummation& s, cdouble z) {
  require(s.q >= 1 && s.B, "borel_sum: incomplete summation");
  require(z != 0.0, "borel_sum: z must be nonzero");
  require(std::abs(std::arg(z)) < s.q * M_PI / 2, "borel_sum: z outside the sector |arg z| < q pi / 2");
}

BorelValue with_check(const BorelSummation& s, const std::function<cdouble(const std::function<cdouble(cdouble)>&, double*)>& integral) {
  BorelValue v;
  double err = 0.0;
  v.value = integral(s.B, &err);
  v.error_estimate = err;
  if (s.B_check) {
    double err2 = 0.0;
    v.error_estimate += std::abs(v.value - integral(s.B_check, &err2));
  }
  return v;
}

}  // namespace

BorelValue borel_sum(const BorelSummation& s, cdouble z) {
  check_ray(s, z);
  return with_check(s, [&](const std::function<cdouble(cdouble)>& B, double* err) {
    return integrate_half_line([&](double u) { return B(z * std::pow(u, s.q)) * std::exp(-u); }, 1e-12, err);
  });
}

BorelValue borel_sum_t_form(const BorelSummation& s, cdouble z) {
  check_ray(s, z);
  const double a = 1.0 / s.q;
  return with_check(s, [&](const std::function<cdouble(cdouble)>& B, double* err) {
    return integrate_half_line(
               [&](double r) { return r == 0.0 ? cdouble(0.0) : B(z * r) * std::pow(r, a - 1) * std::exp(-std::pow(r, a)); },
               1e-12, err) /
           double(s.q);
  });
}

RemainderFit remainder_bound_fit(const std::function<double(double)>& oracle, const RationalSeries& series, int q,
                                 const std::vector<double>& panel, int n_max) {
  require(q >= 0, "remainder fit: q must be >= 0");
  require(n_max >= 0 && std::size_t(n_max) < series.coeffs().size(), "remainder fit: series too short");
  require(!panel.empty(), "remainder fit: empty panel");
  RemainderFit f;
  f.q = q;
  f.panel = panel;
  f.n_max = n_max;
  const int P = static_cast<int>(panel.size());
  f.remainder.assign(n_max + 1, std::vector<double>(P, 0.0));
  f.sigma_needed = f.remainder;
  f.slack = f.remainder;
  std::vector<double> coeff(n_max + 1), fact(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    coeff[n] = to_double(series.coeffs()[n]);
    fact[n] = to_double(Rational(factorial(q * n)));
  }
  std::vector<double> values(P);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < P; ++i) values[i] = oracle(panel[i]);

  for (int i = 0; i < P; ++i) {
    const double lam = std::abs(panel[i]);
    double partial = 0.0, lp = 1.0;
    for (int n = 0; n <= n_max; ++n) {
      partial += coeff[n] * std::pow(panel[i], n);
      lp *= lam;  // |lambda|^{n+1}
      f.remainder[n][i] = std::abs(values[i] - partial);
      if (n >= 1) {
        f.sigma_needed[n][i] = std::pow(f.remainder[n][i] / (fact[n] * lp), 1.0 / n);
        f.sigma = std::max(f.sigma, f.sigma_needed[n][i]);
      }
    }
  }
  for (int n = 0; n <= n_max; ++n) {
    bool failed = false;
    double lp = 1.0;
    for (int i = 0; i < P; ++i) {
      lp = std::pow(std::abs(panel[i]), n + 1);
      f.slack[n][i] = std::pow(f.sigma, n) * fact[n] * lp - f.remainder[n][i];
      failed = failed || f.slack[n][i] < 0;
    }
    if (failed) f.failure_rows.push_back(n);
  }
  return f;
}

double growth_constant(const std::function<cdouble(cdouble)>& B, double T, double R, int samples) {
  require(T > 0 && R > 0 && samples >= 2, "growth_constant: bad arguments");
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = T * i / (samples - 1);
    m = std::max(m, std::abs(B(t)) * std::exp(-t / R));
  }
  return m;
}

}  // namespace lvr
