#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace lvr {

// Directed edges (i, j) on vertices 0..n-1 whose undirected support is acyclic.
struct OrientedForest {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

using ForestVisitor = std::function<void(const OrientedForest&)>;

// Every oriented forest on n labeled vertices exactly once.
// Throws ResourceLimit for n > max_n.
void for_each_oriented_forest(int n, const ForestVisitor& visit, int max_n = 7);

// Same, restricted to spanning trees (n - 1 edges).
void for_each_oriented_tree(int n, const ForestVisitor& visit, int max_n = 7);

long long count_oriented_forests(int n, int max_n = 7);

// inf of w over the unique forest path between i and j, 0 without a path.
// w[e] is the weakening parameter of forest.edges[e].
double interpolated_x(const OrientedForest& forest, const std::vector<double>& w, int i, int j);

// Matrix of x_ij^F(w) for i != j, with ones on the diagonal.
Eigen::MatrixXd interpolated_matrix(const OrientedForest& forest, const std::vector<double>& w);

struct Covariance {
  Eigen::MatrixXd C;
  double min_eigenvalue = 0.0;
};

// C_ij = (x_ij + x_ji) / (2N) off the diagonal, 1/N on it.
Covariance covariance_matrix(const OrientedForest& forest, const std::vector<double>& w, int N);

// A smooth function of the n(n-1) variables x_ij together with its mixed
// partials. `derivative(edges, x)` returns prod_{(i,j) in edges} d/dx_ij f at
// x (diagonal of x is ignored).
struct EdgeFunctional {
  int n = 0;
  std::function<double(const std::vector<std::pair<int, int>>&, const Eigen::MatrixXd&)> derivative;

  double value(const Eigen::MatrixXd& x) const { return derivative({}, x); }
};

// f(x) = exp(sum_{i != j} c_ij x_ij).
EdgeFunctional exponential_functional(const Eigen::MatrixXd& c);

// Polynomial in the x_ij: sum of coef * prod x_ij^power.
struct Monomial {
  double coef = 1.0;
  std::map<std::pair<int, int>, int> powers;
};
EdgeFunctional polynomial_functional(int n, std::vector<Monomial> terms);

struct BkarOptions {
  double tolerance = 1e-10;
  int max_forest_edges = 4;
  int max_n = 7;
};

struct BkarResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long long forests = 0;
};

// Right-hand side of the oriented-forest Taylor formula:
// sum_F int dw_F d_F f(x^F(w)). Equals f at x == 1.
BkarResult bkar_expand(const EdgeFunctional& f, const BkarOptions& opts = {});

// The same sum restricted to spanning trees of the vertex subset `block`
// (f is evaluated with all other variables set to 0).
BkarResult tree_sum(const EdgeFunctional& f, const std::vector<int>& block,
                    const BkarOptions& opts = {});

// Integral over w in [0,1]^|F| of d_F f(x^F(w)) for a single forest.
BkarResult forest_term(const EdgeFunctional& f, const OrientedForest& forest,
                       const BkarOptions& opts = {});

}  // namespace lvr
