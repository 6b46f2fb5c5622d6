#pragma once

#include "lvr/sampling.hpp"

#include <string>
#include <vector>

namespace lvr {

// Complex matrix model with interaction (lambda / N^{p-1}) Tr (M M^dagger)^p.
// Sampling uses the rescaled measure dmu with E|M_ab|^2 = 1/N, under which
// the interaction is N lambda Tr X^p with X = M M^dagger.
struct ModelParams {
  int p = 2;
  int N = 1;
  cdouble lambda = 0.0;

  void validate() const;         // p >= 2, N >= 1
  void validate_stable() const;  // additionally Re lambda >= 0
};

// Linear map on N x N matrices, stored as an N^2 x N^2 matrix acting on
// column-major vec(H). The elementary tensor B (x) C acts as H -> B H C.
class SuperOperator {
 public:
  explicit SuperOperator(int N);
  explicit SuperOperator(ComplexMatrix dense);
  static SuperOperator identity(int N);
  static SuperOperator tensor(const ComplexMatrix& left, const ComplexMatrix& right);

  int N() const { return n_; }
  const ComplexMatrix& dense() const { return m_; }
  ComplexMatrix apply(const ComplexMatrix& H) const;
  // Solves (*this)[Y] = H.
  ComplexMatrix solve(const ComplexMatrix& H) const;

  SuperOperator operator+(const SuperOperator& o) const;
  SuperOperator operator*(const SuperOperator& o) const;  // composition
  SuperOperator scaled(cdouble s) const;

 private:
  int n_;
  ComplexMatrix m_;
};

// Z(lambda, 1) = int_0^inf exp(-t - lambda t^p) dt.
cdouble z_quadrature_n1(int p, cdouble lambda);

struct Comparison {
  cdouble lhs = 0.0;
  cdouble rhs = 0.0;
  double diff = 0.0;
};

// lhs: z_quadrature_n1. rhs: int_0^inf e^{-t} / (1 + p lambda a(lambda,t)^{p-1}) dt.
Comparison verify_prop1_n1(int p, cdouble lambda);

// A(lambda, X) = U diag(a(lambda, x_i)) U^dagger for Hermitian PSD X.
ComplexMatrix matrix_A(int p, cdouble lambda, const ComplexMatrix& X);

// Boundary of the sector with apex -r, half-angle psi and radius R + r,
// traversed counterclockwise. Encloses [0, R) on the real axis.
struct KeyholeContour {
  double r = 0.5;
  double R = 2.0;
  double psi = 0.7853981633974483;
  int panels = 48;  // Gauss-Legendre panels per side
};

// A contour enclosing spec(X) that avoids the cut of a(lambda, .).
KeyholeContour default_contour(int p, cdouble lambda, const ComplexMatrix& X);

// (1 / 2 pi i) contour integral of a(lambda, u) (u - X)^{-1} du.
ComplexMatrix matrix_A_via_contour(int p, cdouble lambda, const ComplexMatrix& X,
                                   const KeyholeContour& contour);

// Sigma = lambda sum_k A^k(X_l) (x) A^{p-1-k}(X_r).
SuperOperator sigma_operator(int p, cdouble lambda, const ComplexMatrix& Xl, const ComplexMatrix& Xr);

// -Tr log(1 + Sigma) via the eigenvalues of 1 + Sigma.
cdouble loop_vertex_action(const SuperOperator& sigma);

// || (A(X + eps H) - A(X - eps H)) / (2 eps) - (1 + Sigma(X, X))^{-1}[H] ||
// with eps = 1e-5, Frobenius norm.
double resolvent_derivative_check(int p, cdouble lambda, const ComplexMatrix& X, const ComplexMatrix& H);

// Z(lambda, N) = < exp(-N lambda Tr X^p) >_dmu. The effective sample size of
// the weights is reported; a warning is set when it drops below 1%.
struct McResult {
  McEstimate estimate;
  std::string warning;
};
McResult mc_partition(const ModelParams& params, std::uint64_t seed, long long samples,
                      Execution exec = Execution::Parallel);

// The same quantity written as < exp(S) >_dmu with the loop vertex action
// S = -Tr log(1 + Sigma(lambda, M M^dagger, M^dagger M)).
McResult mc_partition_lvr(const ModelParams& params, std::uint64_t seed, long long samples,
                          Execution exec = Execution::Parallel);

// Index pattern of a cumulant of order 2k: entries M_{a_i b_i} and
// conj(M_{c_i d_i}), 0-based. With `transposed`, M_{b_i a_i} replaces M_{a_i b_i}.
struct CumulantPattern {
  std::vector<int> a, b, c, d;
  bool transposed = false;
  int k() const { return static_cast<int>(a.size()); }
};

// N^k times the joint cumulant of (M_{a1 b1}, conj M_{c1 d1}, ..., M_{ak bk},
// conj M_{ck dk}) under the interacting measure, i.e. the J-derivative of
// log Z(lambda, N, J) with source sqrt(N) Tr(J M^dagger + M J^dagger).
// Moments are reweighted Gaussian averages; error by chunk jackknife.
McResult mc_cumulant(const ModelParams& params, const CumulantPattern& pattern, std::uint64_t seed,
                     long long samples, Execution exec = Execution::Parallel, int max_k = 2, int max_N = 4);

// N = 1, scalar source J. lhs: Z(lambda, 1, J) by two-dimensional quadrature
// of the sourced integral. rhs: the transformed integral with Jacobian
// 1 / (1 + p lambda a^{p-1}) and source J conj(w) + conj(J) w T_p(-lambda |w|^{2(p-1)}).
Comparison verify_source_change_of_variables(int p, cdouble lambda, cdouble J);

}  // namespace lvr
