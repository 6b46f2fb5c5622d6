#pragma once

#include "lvr/maps.hpp"
#include "lvr/matrix_model.hpp"
#include "lvr/rational.hpp"
#include "lvr/series.hpp"
#include "lvr/weingarten.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace lvr {

// Laurent polynomial in N with exact coefficients.
class NPolynomial {
 public:
  NPolynomial() = default;
  static NPolynomial monomial(const Rational& c, int power);

  const std::map<int, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Rational at(int N) const;
  double at(double N) const;
  std::string str() const;  // e.g. "2*N^2 - 1/3*N^-1", "0" when empty

  NPolynomial& operator+=(const NPolynomial& o);
  friend NPolynomial operator+(NPolynomial a, const NPolynomial& b) { return a += b; }
  friend NPolynomial operator*(const NPolynomial& a, const NPolynomial& b);
  bool operator==(const NPolynomial&) const = default;

 private:
  std::map<int, Rational> terms_;  // power -> nonzero coefficient
};

// Coefficient of lambda^n in log Z(lambda, N, J) from connected maps with k
// source pairs, split by trace invariant: the partition records Tr (JJ^dagger)^m
// over broken faces (empty for k = 0).
struct OrderTerm {
  int order = 0;
  long long graphs = 0;  // labeled connected maps counted
  std::map<IntegerPartition, NPolynomial> by_invariant;
};

struct GraphWeightedSeries {
  int p = 2;
  int k = 0;
  std::vector<OrderTerm> orders;  // orders[n].order == n
  nlohmann::json to_json() const;
};

struct PerturbationOptions {
  // Highest order allowed without raising; < 0 picks 3 for p = 2, 2 for
  // p = 3 and 1 otherwise.
  int order_ceiling = -1;
  EnumerationOptions enumeration;
  Execution exec = Execution::Parallel;
};

int default_order_ceiling(int p);

// Each labeled connected map with n interaction vertices and k labeled
// source pairs contributes (-1)^n N^{chi - k} / (n! k!^2) times the product
// of its broken-face invariants.
GraphWeightedSeries perturbative_series(int p, int k, int max_order, const PerturbationOptions& opts = {});

// Coefficients of Tr_pi(JJ^dagger) by order.
std::vector<NPolynomial> scalar_cumulant_series(int p, int k, const IntegerPartition& pi, int max_order,
                                                const PerturbationOptions& opts = {});
RationalSeries evaluate_at(const std::vector<NPolynomial>& coeffs, int N);

// Exact N = 1 series from the one-dimensional integral:
// m-th moment series sum_n (-lambda)^n (pn + m)! / n!.
RationalSeries n1_moment_series(int p, int m, int length);
// log Z(lambda, 1) for k = 0, <|w|^2> for k = 1.
RationalSeries n1_cumulant_series(int p, int k, int length);

// Tree amplitude on loop vertices: the tree is `graph.map` with no loop
// edges, one face, and at most one cilium per vertex. The face product
// chains H -> R_v[H] (JJ^dagger)^eta around the corners, starting from the
// identity, with R_v = (1 + Sigma(lambda, M_v))^{-1}; replicas M_v are drawn
// with the tree-interpolated covariance and w is integrated by tensor
// Gauss-Legendre. The value is the coefficient of Tr_pi(JJ^dagger).
struct TreeAmplitude {
  int vertices = 0;
  int edges = 0;
  int k = 0;
  IntegerPartition pi;
  McEstimate value;
  double bound = 0.0;
  std::string warning;
  bool within_bound(double sigmas = 3.0) const;
};

struct TreeAmplitudeOptions {
  int w_nodes = 6;  // Gauss-Legendre nodes per tree edge
  int max_vertices = 3;
  Execution exec = Execution::Parallel;
};

TreeAmplitude tree_amplitude_mc(const LvrGraph& tree, const IntegerPartition& pi, const ModelParams& params,
                                std::uint64_t seed, long long samples, const TreeAmplitudeOptions& opts = {});

// Right-hand side of the tree bound
// N^{2-|pi|} |lambda|^e (k!)^2 2^{2k} / (cos^{2e+k}(arg lambda / (p-1)) v!).
double tree_amplitude_bound(int p, cdouble lambda, int N, int k, int pi_length, int edges, int vertices);

// Loop-vertex tree with the given edges and cilia (vertex ids). Rotation at a
// vertex lists its edges in input order, then its cilium.
LvrGraph loop_tree(int vertices, const std::vector<std::pair<int, int>>& edges, const std::vector<int>& cilia);

struct RemainderRow {
  int n = 0;
  double partial_sum = 0.0;
  double remainder = 0.0;       // |oracle - sum_{m <= n} a_m lambda^m|
  double sigma_needed = 0.0;    // smallest sigma for this row (n >= 1)
  bool holds_at_n0 = false;     // n = 0 only: remainder <= |lambda|
};

struct RemainderReport {
  int p = 2, k = 0, N = 1;
  double lambda = 0.0;
  double oracle = 0.0;
  double oracle_error = 0.0;
  std::vector<RemainderRow> rows;
  double sigma = 0.0;  // max of sigma_needed over n = 1..n_max
};

// Remainders of the scalar cumulant series against an oracle: quadrature at
// N = 1 (k = 0, 1) or Monte Carlo at N = 2 (k = 0). Real lambda > 0.
RemainderReport remainder_estimate(int p, int k, int n, double lambda, int N, std::uint64_t seed = 1,
                                   long long samples = 400000);

}  // namespace lvr
