#include <doctest.h>

#include "lvr/domains.hpp"
#include "lvr/series.hpp"

#include <cmath>
#include <random>

using namespace lvr;

namespace {

// Closed-form Fuss-Catalan oracle: binom(pn, n) / ((p-1)n + 1).
Rational closed_form(int p, int n) {
  return Rational(binomial(unsigned(p * n), unsigned(n)), BigInt((p - 1) * n + 1));
}

// Independent root finder: plain fixed-point iteration T <- 1 + z T^p from T=1.
cdouble fixed_point(int p, cdouble z) {
  cdouble t = 1.0;
  for (int i = 0; i < 2000; ++i) t = 1.0 + z * std::pow(t, p);
  return t;
}

}  // namespace

TEST_CASE("fuss_catalan small values") {
  const int expect[] = {1, 1, 2, 5, 14, 42};
  for (int n = 0; n <= 5; ++n) CHECK(fuss_catalan(2, n) == expect[n]);
  CHECK(fuss_catalan(3, 2) == 3);
  for (int p = 2; p <= 6; ++p) CHECK(fuss_catalan(p, 0) == 1);
  CHECK_THROWS_AS(fuss_catalan(1, 3), InvalidArgument);
  CHECK_THROWS_AS(fuss_catalan(2, -1), InvalidArgument);
}

TEST_CASE("fuss_catalan matches closed form") {
  for (int p = 2; p <= 5; ++p) {
    const RationalSeries s = fuss_catalan_series(p, 13);
    for (int n = 0; n <= 12; ++n) CHECK(s[n] == closed_form(p, n));
  }
}

TEST_CASE("tp_eval basic values") {
  CHECK(tp_eval(2, 0.0) == cdouble(1.0));
  const cdouble t = tp_eval(2, 0.1);
  const double quad = (1.0 - std::sqrt(1.0 - 0.4)) / 0.2;
  CHECK(std::abs(t - quad) < 1e-13);
  CHECK(std::abs(t.real() - 1.127) < 1e-3);
  const cdouble t3 = tp_eval(3, 0.05);
  CHECK(std::abs(0.05 * std::pow(t3, 3) - t3 + 1.0) < 1e-12);
  CHECK_THROWS_AS(tp_eval(2, 0.3), NumericError);
}

TEST_CASE("tp_eval residual on the cardioid") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int p = 2; p <= 5; ++p) {
    int done = 0;
    while (done < 100) {
      const double theta = (2 * U(rng) - 1) * (p - 1) * M_PI / 2;
      const cdouble lambda = std::polar(U(rng) * cardioid_radius(p, theta), theta);
      if (!in_cardioid(p, lambda)) continue;
      // z = -lambda u^{p-1} with |u| <= 1 stays inside the principal region.
      const cdouble z = -lambda;
      const cdouble t = tp_eval(p, z);
      CHECK(std::abs(z * std::pow(t, p) - t + 1.0) < 1e-12);
      ++done;
    }
  }
}

TEST_CASE("tp_eval agrees with fixed point inside the series disk") {
  for (int p = 2; p <= 4; ++p) {
    const double zc = tp_branch_point(p);
    for (double frac : {0.1, 0.5, 0.8}) {
      for (double ang : {0.0, 1.0, 2.5, -3.0}) {
        const cdouble z = std::polar(frac * zc, ang);
        CHECK(std::abs(tp_eval(p, z) - fixed_point(p, z)) < 1e-10);
      }
    }
  }
}

TEST_CASE("cardano closed form matches Newton") {
  CHECK(tp_eval_cardano(0.0) == cdouble(1.0));
  CHECK(std::abs(tp_eval_cardano(0.05) - tp_eval(3, 0.05)) < 1e-12);
  const cdouble tm = tp_eval_cardano(-0.05);
  CHECK(std::abs(tm.imag()) < 1e-14);
  CHECK(tm.real() > 0);
  CHECK(std::abs(-0.05 * tm * tm * tm - tm + 1.0) < 1e-12);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const cdouble z(0.5 * U(rng), 0.5 * U(rng));
    if (z.real() > 4.0 / 27.0 - 1e-3 && std::abs(z.imag()) < 1e-3) continue;
    CHECK(std::abs(tp_eval_cardano(z) - tp_eval(3, z)) < 1e-11);
  }
  CHECK_THROWS_AS(tp_eval_cardano(4.0 / 27.0 + 1e-8), NumericError);
  CHECK_THROWS_AS(tp_eval_cardano(cdouble(0.3, 1e-7)), NumericError);
}

TEST_CASE("bivariate reduction") {
  CHECK(tp_bivariate(3, 0.0, cdouble(1.7, 0.2)) == cdouble(1.7, 0.2));
  CHECK(std::abs(tp_bivariate(2, 0.1, 1.0) - tp_eval(2, 0.1)) < 1e-15);
  const cdouble t = tp_bivariate(3, -0.02, 2.0);
  CHECK(std::abs(t - 2.0 * tp_eval(3, -0.08)) < 1e-13);
  CHECK(std::abs(t - (2.0 - 0.02 * t * t * t)) < 1e-12);
}

TEST_CASE("scalar_a inverts u = a + lambda a^p") {
  CHECK(scalar_a(3, 0.0, cdouble(0.4, 0.1)) == cdouble(0.4, 0.1));
  const cdouble a = scalar_a(2, 0.1, 1.0);
  CHECK(std::abs(a - (-1.0 + std::sqrt(1.4)) / 0.2) < 1e-13);
  CHECK(std::abs(a.real() - 0.9161) < 1e-4);
  const cdouble a3 = scalar_a(3, 0.05, 2.0);
  CHECK(std::abs(a3 + 0.05 * a3 * a3 * a3 - 2.0) < 1e-10);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int p = 2; p <= 4; ++p) {
    for (int i = 0; i < 100; ++i) {
      const double theta = (2 * U(rng) - 1) * (p - 1) * M_PI / 2 * 0.95;
      const cdouble lambda = std::polar(0.9 * U(rng) * cardioid_radius(p, theta), theta);
      const cdouble u = 3.0 * U(rng);
      const cdouble av = scalar_a(p, lambda, u);
      CHECK(std::abs(av + lambda * std::pow(av, p) - u) < 1e-10);
    }
  }
}

TEST_CASE("series arithmetic") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> D(-9, 9);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Rational> c(8);
    c[0] = 1;
    for (std::size_t i = 1; i < c.size(); ++i) c[i] = Rational(D(rng), 1 + std::abs(D(rng)));
    const RationalSeries s(c);
    const RationalSeries back = s.log().exp();
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(back[i] == s[i]);
    const RationalSeries one = s * s.reciprocal();
    CHECK(one[0] == 1);
    for (std::size_t i = 1; i < c.size(); ++i) CHECK(one[i] == 0);
  }
  // Truncation consistency: changing high coefficients leaves low orders alone.
  RationalSeries a(std::vector<Rational>{1, 2, 3, 4});
  RationalSeries b(std::vector<Rational>{1, 2, 3, 99});
  CHECK((a.log())[2] == (b.log())[2]);
  CHECK((a * a)[2] == (b * b)[2]);
  CHECK((a * b).size() == 4);
  CHECK((a.truncated(2) * b).size() == 2);
  // Composition: T(z) = 1 + z T(z)^2 as a fixed-point check.
  const RationalSeries t = fuss_catalan_series(2, 10);
  const RationalSeries z = RationalSeries::identity(10);
  const RationalSeries rhs = z * t * t;
  for (int n = 1; n < 10; ++n) CHECK(rhs[n] == t[n]);
  const RationalSeries comp = RationalSeries(std::vector<Rational>{0, 1, 1}).compose(z.scaled(2));
  CHECK(comp[1] == 2);
  CHECK(comp[2] == 4);
}

TEST_CASE("series json round trip") {
  const RationalSeries s(std::vector<Rational>{Rational(1), Rational(-2, 3), Rational(5, 7)});
  const auto j = to_json(s);
  CHECK(j["exact"] == true);
  const RationalSeries back = rational_series_from_json(j);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(back[i] == s[i]);
  const ComplexSeries c(std::vector<cdouble>{{1, 2}, {3, -4}});
  const ComplexSeries cb = complex_series_from_json(to_json(c));
  CHECK(cb[1] == cdouble(3, -4));
}
