#include <doctest.h>

#include "lvr/domains.hpp"
#include "lvr/matrix_model.hpp"
#include "lvr/series.hpp"

#include <cmath>

using namespace lvr;

namespace {

ComplexMatrix random_psd(int N, Rng& rng, double scale = 1.0) {
  const ComplexMatrix G = sample_gaussian(N, scale, rng);
  return G * G.adjoint();
}

ComplexMatrix random_hermitian(int N, Rng& rng) {
  const ComplexMatrix G = sample_gaussian(N, 1.0, rng);
  return (G + G.adjoint()) / 2.0;
}

// Closed form of int_0^inf exp(-t - lambda t^2) dt for real lambda > 0.
double z_quartic_closed(double lambda) {
  const double s = 1.0 / (2.0 * std::sqrt(lambda));
  return std::sqrt(M_PI) * s * std::exp(s * s) * std::erfc(s);
}

cdouble random_cardioid_lambda(int p, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const cdouble l(std::abs(u(rng)) * 0.5, u(rng) * 0.5);
    if (l.real() > 0 && in_cardioid(p, l)) return l;
  }
}

}  // namespace

TEST_CASE("gaussian sampler second moments") {
  const int N = 3;
  Rng rng(11);
  Welford mean, abs2, holo;
  for (int s = 0; s < 20000; ++s) {
    const ComplexMatrix M = sample_gaussian(N, 1.0 / N, rng);
    mean.add(M(0, 1));
    abs2.add(std::norm(M(0, 1)));
    holo.add(M(0, 1) * M(2, 2));
  }
  CHECK(std::abs(mean.mean) < 3 * mean.std_error());
  CHECK(std::abs(abs2.mean - 1.0 / N) < 3 * abs2.std_error());
  CHECK(std::abs(holo.mean) < 3 * holo.std_error());
}

TEST_CASE("scalar partition function") {
  CHECK(std::abs(z_quadrature_n1(2, 0.0) - 1.0) < 1e-12);
  CHECK(std::abs(z_quadrature_n1(2, 0.1) - z_quartic_closed(0.1)) < 1e-10);
  CHECK(std::abs(z_quadrature_n1(2, 0.37) - z_quartic_closed(0.37)) < 1e-10);
  CHECK_THROWS_AS(z_quadrature_n1(2, -0.1), InvalidArgument);

  const cdouble zq = z_quadrature_n1(3, 0.05);
  const McResult mc = mc_partition({3, 1, 0.05}, 5, 200000);
  CHECK(std::abs(mc.estimate.value - zq) < 3 * mc.estimate.std_error);
}

TEST_CASE("scalar change of variables") {
  const Comparison c0 = verify_prop1_n1(2, 0.0);
  CHECK(std::abs(c0.lhs - 1.0) < 1e-12);
  CHECK(std::abs(c0.rhs - 1.0) < 1e-12);
  for (int p : {2, 3, 4}) {
    CHECK(verify_prop1_n1(p, 0.05).diff < 1e-8);
    CHECK(verify_prop1_n1(p, cdouble(0.05, 0.04)).diff < 1e-8);
  }
}

TEST_CASE("matrix function A") {
  Rng rng(21);
  const ComplexMatrix X = random_psd(3, rng);
  CHECK((matrix_A(2, 0.0, X) - X).norm() < 1e-12);
  const ComplexMatrix I = ComplexMatrix::Identity(3, 3);
  CHECK((matrix_A(3, 0.2, I) - scalar_a(3, 0.2, 1.0) * I).norm() < 1e-13);

  for (int draw = 0; draw < 100; ++draw) {
    const int p = 2 + draw % 2;
    const cdouble lambda = random_cardioid_lambda(p, rng);
    const ComplexMatrix Y = random_psd(3, rng);
    const ComplexMatrix A = matrix_A(p, lambda, Y);
    ComplexMatrix Ap = ComplexMatrix::Identity(3, 3);
    for (int i = 0; i < p; ++i) Ap = Ap * A;
    const ComplexMatrix res = Y - A - lambda * Ap;
    CHECK(res.operatorNorm() < 1e-9);
  }

  ComplexMatrix bad = X;
  bad(0, 1) += 1.0;
  CHECK_THROWS_AS(matrix_A(2, 0.1, bad), InvalidArgument);
  CHECK_THROWS_AS(matrix_A(2, 0.1, -X), InvalidArgument);
}

TEST_CASE("contour integral reproduces A") {
  ComplexMatrix one(1, 1);
  one(0, 0) = 1.0;
  const KeyholeContour c1 = default_contour(2, 0.1, one);
  CHECK(std::abs(matrix_A_via_contour(2, 0.1, one, c1)(0, 0) - scalar_a(2, 0.1, 1.0)) < 1e-6);

  Rng rng(31);
  for (int draw = 0; draw < 20; ++draw) {
    const int p = 2 + draw % 2;
    const int N = 2 + draw % 2;
    const cdouble lambda = random_cardioid_lambda(p, rng) * 0.5;
    const ComplexMatrix X = random_psd(N, rng, 0.5);
    const KeyholeContour c = default_contour(p, lambda, X);
    const ComplexMatrix diff = matrix_A_via_contour(p, lambda, X, c) - matrix_A(p, lambda, X);
    CHECK(diff.norm() < 1e-6);
  }

  Rng rng2(32);
  const ComplexMatrix X = random_psd(2, rng2);
  KeyholeContour small = default_contour(2, 0.1, X);
  small.R = 0.5 * X.norm() / 4;
  CHECK_THROWS_AS(matrix_A_via_contour(2, 0.1, X, small), InvalidArgument);
}

TEST_CASE("super operators") {
  Rng rng(41);
  const ComplexMatrix B = sample_gaussian(3, 1.0, rng), C = sample_gaussian(3, 1.0, rng);
  const ComplexMatrix H = sample_gaussian(3, 1.0, rng);
  CHECK((SuperOperator::tensor(B, C).apply(H) - B * H * C).norm() < 1e-12);
  const SuperOperator s1 = SuperOperator::tensor(B, C), s2 = SuperOperator::tensor(C, B),
                      s3 = SuperOperator::tensor(H, B);
  CHECK(((s1 * s2) * s3).dense().isApprox((s1 * (s2 * s3)).dense(), 1e-12));
  CHECK(((s1 * s2).apply(H) - s1.apply(s2.apply(H))).norm() < 1e-10);
  CHECK((s1.solve(s1.apply(H)) - H).norm() < 1e-8);
}

TEST_CASE("sigma operator and loop vertex action") {
  Rng rng(51);
  const ComplexMatrix M = sample_gaussian(2, 0.5, rng);
  const ComplexMatrix Xl = M * M.adjoint(), Xr = M.adjoint() * M;
  CHECK(std::abs(Xl.trace() - Xr.trace()) < 1e-14);

  const SuperOperator zero = sigma_operator(2, 0.0, Xl, Xr);
  CHECK(zero.dense().norm() == 0.0);
  CHECK(loop_vertex_action(zero) == cdouble(0.0));

  for (int p : {2, 3}) {
    ComplexMatrix x(1, 1);
    x(0, 0) = 0.7;
    const cdouble lambda(0.1, 0.05);
    const cdouble a = scalar_a(p, lambda, 0.7);
    const cdouble expect = -std::log(1.0 + lambda * double(p) * std::pow(a, p - 1));
    CHECK(std::abs(loop_vertex_action(sigma_operator(p, lambda, x, x)) - expect) < 1e-12);
  }

  // p = 2: Sigma[H] = lambda (A H + H A'), assembled entry by entry.
  const double lambda = 0.1;
  const ComplexMatrix A = matrix_A(2, lambda, Xl), Ar = matrix_A(2, lambda, Xr);
  ComplexMatrix hand = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          // (A E_kl)_{ij} = A_ik delta_jl, (E_kl A')_{ij} = delta_ik A'_lj.
          cdouble v = 0.0;
          if (j == l) v += A(i, k);
          if (i == k) v += Ar(l, j);
          hand(i + 2 * j, k + 2 * l) = lambda * v;
        }
  CHECK((sigma_operator(2, lambda, Xl, Xr).dense() - hand).norm() < 1e-13);
}

TEST_CASE("resolvent of A") {
  Rng rng(61);
  const ComplexMatrix X = random_psd(2, rng) + ComplexMatrix::Identity(2, 2);
  const ComplexMatrix H = random_hermitian(2, rng);
  CHECK(resolvent_derivative_check(2, 0.0, X, H) < 1e-9);

  ComplexMatrix x(1, 1), h(1, 1);
  x(0, 0) = 1.3;
  h(0, 0) = 1.0;
  CHECK(resolvent_derivative_check(3, 0.1, x, h) < 1e-8);

  for (int draw = 0; draw < 20; ++draw) {
    const int p = draw < 10 ? 3 : 2;
    const cdouble lambda = random_cardioid_lambda(p, rng);
    const ComplexMatrix Y = random_psd(2, rng) + 0.1 * ComplexMatrix::Identity(2, 2);
    const ComplexMatrix D = random_hermitian(2, rng);
    CHECK(resolvent_derivative_check(p, lambda, Y, D) < 1e-6 * D.norm());
  }
}

TEST_CASE("monte carlo partition function") {
  const McResult zero = mc_partition({2, 3, 0.0}, 1, 1000);
  CHECK(zero.estimate.value == cdouble(1.0));
  CHECK(zero.estimate.std_error == 0.0);

  const McResult n1 = mc_partition({2, 1, 0.1}, 2, 200000);
  CHECK(std::abs(n1.estimate.value - z_quartic_closed(0.1)) < 3 * n1.estimate.std_error);
  CHECK(n1.warning.empty());

  const McResult a = mc_partition({2, 2, 0.1}, 3, 4000, Execution::Serial);
  const McResult b = mc_partition({2, 2, 0.1}, 3, 4000, Execution::Parallel);
  CHECK(a.estimate.value == b.estimate.value);
  CHECK(a.estimate.std_error == b.estimate.std_error);
}

TEST_CASE("loop vertex form of the partition function") {
  for (const cdouble lambda : {cdouble(0.1), cdouble(0.2, 0.1)}) {
    const McResult direct = mc_partition({2, 2, lambda}, 7, 40000);
    const McResult lvr = mc_partition_lvr({2, 2, lambda}, 8, 40000);
    const double err = std::hypot(direct.estimate.std_error, lvr.estimate.std_error);
    CHECK(std::abs(direct.estimate.value - lvr.estimate.value) < 3 * err);
  }
  const McResult p3 = mc_partition({3, 2, 0.05}, 9, 40000);
  const McResult p3l = mc_partition_lvr({3, 2, 0.05}, 10, 40000);
  CHECK(std::abs(p3.estimate.value - p3l.estimate.value) <
        3 * std::hypot(p3.estimate.std_error, p3l.estimate.std_error));
}

TEST_CASE("monte carlo cumulants") {
  const int N = 2;
  // Gaussian two-point function.
  for (const auto& [a, b, c, d] : {std::array{0, 1, 0, 1}, std::array{1, 1, 1, 1}, std::array{0, 1, 1, 0}}) {
    const McResult r = mc_cumulant({2, N, 0.0}, {{a}, {b}, {c}, {d}}, 3, 100000);
    const double expect = (a == c && b == d) ? 1.0 : 0.0;
    CHECK(std::abs(r.estimate.value - expect) < 3 * r.estimate.std_error + 1e-12);
  }
  // Order-4 cumulant of a Gaussian vanishes.
  const McResult g4 = mc_cumulant({2, N, 0.0}, {{0, 0}, {1, 1}, {0, 0}, {1, 1}}, 4, 100000);
  CHECK(std::abs(g4.estimate.value) < 3 * g4.estimate.std_error);

  // Transposing the M index changes the correlator.
  const CumulantPattern plain{{0}, {1}, {0}, {1}, false};
  CumulantPattern trans = plain;
  trans.transposed = true;
  const McResult u = mc_cumulant({2, N, 0.3}, plain, 5, 100000);
  const McResult t = mc_cumulant({2, N, 0.3}, trans, 5, 100000);
  CHECK(std::abs(u.estimate.value - t.estimate.value) > 3 * std::hypot(u.estimate.std_error, t.estimate.std_error));

  CHECK_THROWS_AS(mc_cumulant({2, N, 0.1}, {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}, 1, 10), ResourceLimit);
  CHECK_THROWS_AS(mc_cumulant({2, 5, 0.1}, plain, 1, 10), ResourceLimit);
  CHECK_THROWS_AS(mc_cumulant({2, N, 0.1}, {{2}, {0}, {0}, {0}}, 1, 10), InvalidArgument);
}

TEST_CASE("sourced change of variables") {
  const Comparison c0 = verify_source_change_of_variables(2, 0.05, 0.0);
  CHECK(std::abs(c0.lhs - 1.0) < 1e-12);
  CHECK(std::abs(c0.rhs - 1.0) < 1e-12);
  const cdouble J(0.3, -0.2);
  const Comparison g = verify_source_change_of_variables(3, 0.0, J);
  CHECK(std::abs(g.lhs - std::exp(std::norm(J))) < 1e-10);
  CHECK(std::abs(g.rhs - std::exp(std::norm(J))) < 1e-10);
  CHECK(verify_source_change_of_variables(2, 0.05, 0.1).diff < 1e-6);
  CHECK(verify_source_change_of_variables(3, cdouble(0.05, 0.02), cdouble(0.2, 0.1)).diff < 1e-6);
}
