#include <doctest.h>

#include "lvr/perturbation.hpp"

#include <cmath>

using namespace lvr;

namespace {

IntegerPartition P(std::vector<int> v) { return IntegerPartition(std::move(v)); }

NPolynomial poly(std::initializer_list<std::pair<int, Rational>> terms) {
  NPolynomial r;
  for (const auto& [pw, c] : terms) r += NPolynomial::monomial(c, pw);
  return r;
}

}  // namespace

TEST_CASE("N polynomials") {
  const NPolynomial a = poly({{2, Rational(2)}, {-1, Rational(-1, 3)}});
  CHECK(a.str() == "2*N^2 - 1/3*N^-1");
  CHECK(a.at(3) == Rational(18) - Rational(1, 9));
  CHECK((a + poly({{2, Rational(-2)}})).str() == "-1/3*N^-1");
  CHECK((a * poly({{1, Rational(3)}})).str() == "6*N^3 - 1");
  CHECK(NPolynomial().str() == "0");
}

TEST_CASE("log Z at N = 1 matches the one-dimensional series") {
  const auto c = evaluate_at(scalar_cumulant_series(2, 0, IntegerPartition(), 3), 1).coeffs();
  CHECK(c[0] == 0);
  CHECK(c[1] == -2);
  CHECK(c[2] == 10);
  CHECK(c[3] == Rational(-296, 3));
  CHECK(n1_cumulant_series(2, 0, 4).coeffs()[3] == Rational(-296, 3));

  const auto c3 = evaluate_at(scalar_cumulant_series(3, 0, IntegerPartition(), 2), 1);
  CHECK(c3.coeffs() == n1_cumulant_series(3, 0, 3).coeffs());
  const auto k1 = evaluate_at(scalar_cumulant_series(2, 1, P({1}), 3), 1);
  CHECK(k1.coeffs() == n1_cumulant_series(2, 1, 4).coeffs());
}

TEST_CASE("first-order coefficients as polynomials in N") {
  // <N Tr X^p> under covariance 1/N: 2N^2 for p = 2, 5N^2 + 1 for p = 3.
  const auto s2 = perturbative_series(2, 0, 1);
  CHECK(s2.orders[0].by_invariant.empty());
  CHECK(s2.orders[1].by_invariant.at(IntegerPartition()) == poly({{2, Rational(-2)}}));
  const auto s3 = perturbative_series(3, 0, 1);
  CHECK(s3.orders[1].by_invariant.at(IntegerPartition()) == poly({{2, Rational(-5)}, {0, Rational(-1)}}));

  const auto k1 = perturbative_series(2, 1, 0);
  CHECK(k1.orders[0].graphs == 1);
  CHECK(k1.orders[0].by_invariant.at(P({1})) == poly({{0, Rational(1)}}));
  // Gaussian: no connected order-0 graph with two source pairs.
  CHECK(perturbative_series(2, 2, 0).orders[0].graphs == 0);
}

TEST_CASE("invariant censuses and denominators") {
  const auto s = perturbative_series(2, 2, 2);
  for (const auto& t : s.orders) {
    long long d = 1;
    for (int i = 2; i <= t.order; ++i) d *= i;
    d *= 4;  // k!^2
    for (const auto& [inv, poly] : t.by_invariant) {
      CHECK(inv.total() == 2);
      for (const auto& [pw, c] : poly.terms()) CHECK(d % static_cast<long long>(boost::multiprecision::denominator(c)) == 0);
    }
  }
  // One interaction vertex with four source legs is a tree: a single face.
  CHECK(s.orders[1].by_invariant.count(P({2})) == 1);
  CHECK(s.orders[1].by_invariant.count(P({1, 1})) == 0);
  CHECK(s.orders[2].by_invariant.count(P({1, 1})) == 1);

  PerturbationOptions serial;
  serial.exec = Execution::Serial;
  const auto a = perturbative_series(2, 1, 3, serial);
  const auto b = perturbative_series(2, 1, 3);
  for (int n = 0; n <= 3; ++n) {
    CHECK(a.orders[n].graphs == b.orders[n].graphs);
    CHECK(a.orders[n].by_invariant == b.orders[n].by_invariant);
  }
  CHECK_THROWS_AS(perturbative_series(2, 0, 4), ResourceLimit);
  PerturbationOptions raised;
  raised.order_ceiling = 4;
  CHECK(evaluate_at(scalar_cumulant_series(2, 0, IntegerPartition(), 4, raised), 1).coeffs() ==
        n1_cumulant_series(2, 0, 5).coeffs());
}

TEST_CASE("order-1 two-point coefficient against the sourced integral") {
  // <|w|^2> at N = 1 by quadrature, differentiated at 0.
  const auto s = evaluate_at(scalar_cumulant_series(2, 1, P({1}), 1), 1);
  const double h = 1e-5;
  const RemainderReport r = remainder_estimate(2, 1, 0, h, 1);
  CHECK(std::abs((r.oracle - 1.0) / h - to_double(s.coeffs()[1])) < 1e-3);
}

TEST_CASE("tree amplitudes") {
  const LvrGraph single = loop_tree(1, {}, {});
  const TreeAmplitude a0 = tree_amplitude_mc(single, IntegerPartition(), {2, 3, 0.0}, 1, 100);
  CHECK(a0.value.value == cdouble(9.0));
  CHECK(a0.value.std_error == 0.0);

  const LvrGraph ciliated = loop_tree(1, {}, {0});
  const TreeAmplitude a1 = tree_amplitude_mc(ciliated, P({1}), {2, 2, 0.1}, 2, 20000);
  CHECK(a1.bound == doctest::Approx(8.0));
  CHECK(a1.within_bound());
  CHECK(std::abs(a1.value.value) > 0);

  // Two loop vertices, no cilia: leading order -lambda N^2/2 (1 - 4 lambda).
  const LvrGraph two = loop_tree(2, {{0, 1}}, {});
  const double lambda = 1e-3;
  const int N = 2;
  const TreeAmplitude a2 = tree_amplitude_mc(two, IntegerPartition(), {2, N, lambda}, 3, 20000);
  const double lead = -lambda * N * N / 2 * (1 - 4 * lambda);
  CHECK(std::abs(a2.value.value - lead) < 3 * a2.value.std_error + 30 * lambda * lambda * std::abs(lead));
  CHECK(a2.within_bound());

  const LvrGraph path = loop_tree(3, {{0, 1}, {1, 2}}, {0, 2});
  for (const auto& pi : {P({2}), P({1, 1})}) {
    const TreeAmplitude a3 = tree_amplitude_mc(path, pi, {2, 2, cdouble(0.1, 0.05)}, 4, 6000);
    CHECK(a3.within_bound());
  }
  CHECK_THROWS_AS(tree_amplitude_mc(path, P({1}), {2, 2, 0.1}, 1, 10), InvalidArgument);
  CHECK_THROWS_AS(tree_amplitude_mc(loop_tree(4, {{0, 1}, {1, 2}, {2, 3}}, {}), IntegerPartition(), {2, 2, 0.1}, 1, 10),
                  ResourceLimit);
}

TEST_CASE("remainder estimates") {
  const RemainderReport r0 = remainder_estimate(2, 0, 0, 0.05, 1);
  REQUIRE(r0.rows.size() == 1);
  // |log Z| is about 2 lambda, so the sigma^0 row does not hold; it is
  // reported, not fitted.
  CHECK(r0.rows[0].remainder == doctest::Approx(std::abs(r0.oracle)));
  CHECK_FALSE(r0.rows[0].holds_at_n0);

  // Small-lambda sweep: R_n / lambda^{n+1} stays bounded.
  for (int n = 1; n <= 3; ++n) {
    double prev = 0;
    for (double lambda : {0.02, 0.01, 0.005}) {
      const RemainderReport r = remainder_estimate(2, 0, n, lambda, 1);
      const double ratio = r.rows[n].remainder / std::pow(lambda, n + 1);
      if (prev > 0) CHECK(ratio < 2 * prev);
      prev = ratio;
    }
  }

  const RemainderReport r = remainder_estimate(2, 0, 8, 0.05, 1);
  double running = 0;
  for (const auto& row : r.rows)
    if (row.n >= 1) {
      running = std::max(running, row.sigma_needed);
      CHECK(std::isfinite(row.sigma_needed));
    }
  CHECK(r.sigma == running);
  CHECK_THROWS_AS(remainder_estimate(2, 1, 2, 0.1, 3), InvalidArgument);
}

TEST_CASE("two-point series against monte carlo at N = 2") {
  PerturbationOptions o;
  o.order_ceiling = 4;
  const auto c = evaluate_at(scalar_cumulant_series(2, 1, P({1}), 4, o), 2).coeffs();
  const double lambda = 0.01;
  double partial = 0, lp = 1;
  for (int n = 0; n <= 3; ++n, lp *= lambda) partial += to_double(c[n]) * lp;
  const double next = std::abs(to_double(c[4])) * lp;
  const McResult mc = mc_cumulant({2, 2, lambda}, {{0}, {1}, {0}, {1}}, 17, 1000000);
  CHECK(std::abs(mc.estimate.value.real() - partial) < 3 * mc.estimate.std_error + next);
  // Dropping the order-2 term is resolved.
  const double without2 = partial - to_double(c[2]) * lambda * lambda;
  CHECK(std::abs(mc.estimate.value.real() - without2) > 3 * mc.estimate.std_error + next);
}
