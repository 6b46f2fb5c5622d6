#include <doctest.h>

#include "lvr/weingarten.hpp"
#include "panels.hpp"

#include <random>

using namespace lvr;

namespace {

IntegerPartition P(std::vector<int> v) { return IntegerPartition(std::move(v)); }

}  // namespace

TEST_CASE("partitions and permutations") {
  CHECK(partitions_of(4).size() == 5);
  CHECK(partitions_of(5).size() == 7);
  CHECK(IntegerPartition::parse("2,1") == P({1, 2}));
  CHECK_THROWS_AS(IntegerPartition::parse("2,,1"), InvalidArgument);
  CHECK_THROWS_AS(IntegerPartition::parse("0"), InvalidArgument);
  CHECK(Permutation::with_cycle_type(P({1, 2, 3})).cycle_type() == P({1, 2, 3}));
  const Permutation s({1, 2, 0});
  CHECK(s * s.inverse() == Permutation::identity(3));
  CHECK(s.num_cycles() == 1);
  CHECK_THROWS_AS(Permutation({0, 0}), InvalidArgument);
}

TEST_CASE("weingarten table") {
  CHECK(weingarten(P({1}), 3) == Rational(1, 3));
  CHECK(weingarten(P({2}), 3) == Rational(-1, 24));
  CHECK(weingarten(P({3}), 3) == Rational(1, 60));
  for (int N : {5, 7}) {
    const Rational n(N);
    CHECK(weingarten(P({1}), N) == 1 / n);
    CHECK(weingarten(P({2}), N) == -1 / (n * (n * n - 1)));
    CHECK(weingarten(P({3}), N) == 2 / (n * (n * n - 1) * (n * n - 4)));
    CHECK(weingarten(P({1, 2}), N) == -1 / ((n * n - 1) * (n * n - 4)));
    CHECK(weingarten(P({1, 1, 1}), N) == (n * n - 2) / (n * (n * n - 1) * (n * n - 4)));
    // Gram-inverse value; the opposite sign appears in the printed table.
    CHECK(weingarten(P({1, 1}), N) == 1 / (n * n - 1));
  }
  CHECK_THROWS_AS(weingarten(P({1, 1, 1}), 2), InvalidArgument);
  CHECK_THROWS_AS(weingarten(P({6}), 7), ResourceLimit);
}

TEST_CASE("weingarten inverts the Gram matrix") {
  for (int k = 1; k <= 4; ++k)
    for (int N = k; N <= k + 2; ++N) {
      const auto perms = all_permutations(k);
      for (const auto& s : perms) {
        Rational acc = 0;
        for (const auto& t : perms) {
          BigInt np = 1;
          for (int i = 0; i < (s * t.inverse()).num_cycles(); ++i) np *= N;
          acc += Rational(np) * weingarten(t.cycle_type(), N);
        }
        CHECK(acc == (s == Permutation::identity(k) ? 1 : 0));
      }
    }
}

TEST_CASE("haar moments") {
  CHECK(haar_moment_exact({0}, {0}, {0}, {0}, 2) == Rational(1, 2));
  CHECK(haar_moment_exact({0, 0}, {0, 0}, {0, 0}, {0, 0}, 2) == Rational(1, 3));
  // One surviving (tau, sigma) pair: tau = id, sigma = swap.
  CHECK(haar_moment_exact({0, 1}, {0, 1}, {0, 1}, {1, 0}, 3) == weingarten(P({2}), 3));
  CHECK(haar_moment_exact({0}, {0}, {}, {}, 2) == 0);
  const auto panel = haar_panel();
  for (std::size_t i = 0; i < panel.size(); ++i) {
    const auto& h = panel[i];
    const McEstimate e = haar_moment_mc(h.a, h.b, h.c, h.d, h.N, 100000, 100 + i);
    const double expect = to_double(haar_moment_exact(h.a, h.b, h.c, h.d, h.N));
    CHECK(std::abs(e.value - expect) <= 3 * e.std_error + 1e-12);
  }
}

TEST_CASE("haar sampler is unitary and reproducible") {
  Rng rng(1);
  const ComplexMatrix U = sample_haar(3, rng);
  CHECK((U.adjoint() * U - ComplexMatrix::Identity(3, 3)).norm() < 1e-12);
  const auto a = haar_moment_mc({0}, {0}, {0}, {0}, 2, 5000, 9, Execution::Serial);
  const auto b = haar_moment_mc({0}, {0}, {0}, {0}, 2, 5000, 9, Execution::Parallel);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("trace invariants") {
  const ComplexMatrix I = ComplexMatrix::Identity(4, 4);
  CHECK(trace_invariant(P({1}), I) == cdouble(4));
  CHECK(trace_invariant(P({1, 1}), I) == cdouble(16));
  Rng rng(3);
  const ComplexMatrix X = sample_gaussian(2, 1.0, rng);
  CHECK(std::abs(trace_invariant(P({2}), X) - (X * X).trace()) < 1e-14);
}

TEST_CASE("cumulant index structure") {
  const auto id1 = Permutation::identity(1);
  const auto d1 = cumulant_index_structure(P({1}), id1, id1, id1, id1);
  REQUIRE(d1.size() == 1);
  CHECK(d1[0].a_slot == 0);
  CHECK(d1[0].b_slot == 0);

  // pi = (2): two admissible (tau, xi) choices give the same tensor.
  const auto id2 = Permutation::identity(2);
  const Permutation sw({1, 0});
  const auto T1 = assembled_index_tensor(P({2}), sw, id2, 2);
  const auto T2 = assembled_index_tensor(P({2}), id2, sw, 2);
  CHECK(T1 == T2);
  CHECK_THROWS_AS(cumulant_index_structure(P({2}), id2, id2, id2, id2), InvalidArgument);

  // pi = (1,1) versus pi = (2): different patterns. With N = 4 and all-distinct
  // a and b indices the supports are disjoint.
  const auto U11 = assembled_index_tensor(P({1, 1}), id2, id2, 3);
  const auto U2 = assembled_index_tensor(P({2}), sw, id2, 3);
  CHECK(U11 != U2);
  const int N = 3;
  auto flat = [&](std::vector<int> idx) {
    long long f = 0;
    for (int x : idx) f = f * N + x;
    return f;
  };
  // a = (0,1), b = (2,0): (1,1) support ties d_l = a_l, c_l = b_l.
  const long long generic11 = flat({0, 1, 2, 0, 2, 0, 0, 1});
  CHECK(U11[generic11] > 0);
  CHECK(U2[generic11] == 0);
  const long long generic2 = flat({0, 1, 2, 0, 2, 0, 1, 0});
  CHECK(U2[generic2] > 0);
  CHECK(U11[generic2] == 0);
}
