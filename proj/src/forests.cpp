#include "lvr/forests.hpp"

#include "lvr/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <numeric>
#include <string>

namespace lvr {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// Acyclic subsets of the unordered pairs of 0..n-1 with exactly `size` edges
// (any size when size < 0), each expanded into all 2^m orientations.
void enumerate(int n, int size, const ForestVisitor& visit) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<int> chosen;
  auto emit = [&] {
    const int m = static_cast<int>(chosen.size());
    OrientedForest f{n, std::vector<std::pair<int, int>>(m)};
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      for (int e = 0; e < m; ++e) {
        const auto [a, b] = pairs[chosen[e]];
        f.edges[e] = (mask >> e) & 1u ? std::pair{b, a} : std::pair{a, b};
      }
      visit(f);
    }
  };
  std::function<void(std::size_t, UnionFind)> rec = [&](std::size_t i, UnionFind uf) {
    if (i == pairs.size()) {
      if (size < 0 || static_cast<int>(chosen.size()) == size) emit();
      return;
    }
    if (size >= 0 && static_cast<int>(chosen.size()) == size) {
      emit();
      return;
    }
    rec(i + 1, uf);
    if (uf.unite(pairs[i].first, pairs[i].second)) {
      chosen.push_back(static_cast<int>(i));
      rec(i + 1, uf);
      chosen.pop_back();
    }
  };
  rec(0, UnionFind(n));
}

void check_n(int n, int max_n) {
  require(n >= 1, "forests: n must be >= 1");
  if (n > max_n) throw ResourceLimit("forests: n = " + std::to_string(n) + " exceeds ceiling " + std::to_string(max_n));
}

}  // namespace

void for_each_oriented_forest(int n, const ForestVisitor& visit, int max_n) {
  check_n(n, max_n);
  enumerate(n, -1, visit);
}

void for_each_oriented_tree(int n, const ForestVisitor& visit, int max_n) {
  check_n(n, max_n);
  enumerate(n, n - 1, visit);
}

long long count_oriented_forests(int n, int max_n) {
  long long c = 0;
  for_each_oriented_forest(n, [&](const OrientedForest&) { ++c; }, max_n);
  return c;
}

double interpolated_x(const OrientedForest& forest, const std::vector<double>& w, int i, int j) {
  require(i != j, "interpolated_x: i and j must differ");
  require(w.size() == forest.edges.size(), "interpolated_x: one weight per edge");
  // Depth-first search from i carrying the running minimum.
  std::vector<double> best(forest.n, -1.0);
  std::vector<int> stack{i};
  best[i] = 1.0;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (std::size_t e = 0; e < forest.edges.size(); ++e) {
      const auto [a, b] = forest.edges[e];
      const int u = a == v ? b : (b == v ? a : -1);
      if (u < 0 || best[u] >= 0) continue;
      best[u] = std::min(best[v], w[e]);
      stack.push_back(u);
    }
  }
  return best[j] < 0 ? 0.0 : best[j];
}

Eigen::MatrixXd interpolated_matrix(const OrientedForest& forest, const std::vector<double>& w) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(forest.n, forest.n);
  for (int i = 0; i < forest.n; ++i)
    for (int j = i + 1; j < forest.n; ++j) x(i, j) = x(j, i) = interpolated_x(forest, w, i, j);
  return x;
}

Covariance covariance_matrix(const OrientedForest& forest, const std::vector<double>& w, int N) {
  require(N >= 1, "covariance_matrix: N must be >= 1");
  const Eigen::MatrixXd x = interpolated_matrix(forest, w);
  Covariance c;
  c.C = (0.5 * (x + x.transpose())) / double(N);
  c.C.diagonal().setConstant(1.0 / N);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.C, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  return c;
}

EdgeFunctional exponential_functional(const Eigen::MatrixXd& c) {
  require(c.rows() == c.cols(), "exponential_functional: square coefficients");
  const int n = static_cast<int>(c.rows());
  return {n, [c, n](const std::vector<std::pair<int, int>>& d, const Eigen::MatrixXd& x) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j)
                if (i != j) s += c(i, j) * x(i, j);
            double pre = 1.0;
            for (const auto& [i, j] : d) pre *= c(i, j);
            return pre * std::exp(s);
          }};
}

EdgeFunctional polynomial_functional(int n, std::vector<Monomial> terms) {
  return {n, [terms = std::move(terms)](const std::vector<std::pair<int, int>>& d, const Eigen::MatrixXd& x) {
            std::map<std::pair<int, int>, int> need;
            for (const auto& e : d) ++need[e];
            double total = 0.0;
            for (const auto& t : terms) {
              double v = t.coef;
              for (const auto& [e, k] : need) {
                auto it = t.powers.find(e);
                const int pw = it == t.powers.end() ? 0 : it->second;
                if (pw < k) {
                  v = 0.0;
                  break;
                }
                for (int r = 0; r < k; ++r) v *= pw - r;
              }
              if (v == 0.0) continue;
              for (const auto& [e, pw] : t.powers) {
                auto it = need.find(e);
                const int left = pw - (it == need.end() ? 0 : it->second);
                v *= std::pow(x(e.first, e.second), left);
              }
              total += v;
            }
            return total;
          }};
}

BkarResult forest_term(const EdgeFunctional& f, const OrientedForest& forest, const BkarOptions& opts) {
  using boost::math::quadrature::gauss_kronrod;
  const int m = static_cast<int>(forest.edges.size());
  if (m > opts.max_forest_edges)
    throw ResourceLimit("bkar: forest with " + std::to_string(m) + " edges exceeds the quadrature ceiling");
  std::vector<double> w(m, 0.0);
  BkarResult r;
  r.forests = 1;
  // Nested adaptive quadrature; each level splits [0,1] at the already fixed
  // weights, where x^F(w) has kinks.
  std::function<double(int, double*)> level = [&](int e, double* err) -> double {
    if (e == m) return f.derivative(forest.edges, interpolated_matrix(forest, w));
    std::vector<double> cuts{0.0, 1.0};
    for (int i = 0; i < e; ++i)
      if (w[i] > 0.0 && w[i] < 1.0) cuts.push_back(w[i]);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      double local_err = 0.0;
      total += gauss_kronrod<double, 15>::integrate(
          [&](double t) {
            w[e] = t;
            return level(e + 1, nullptr);
          },
          cuts[s], cuts[s + 1], 12, opts.tolerance, &local_err);
      if (err) *err += local_err;
    }
    return total;
  };
  r.value = level(0, &r.error_estimate);
  if (!std::isfinite(r.value)) throw NumericError("bkar: non-finite forest integral");
  return r;
}

BkarResult bkar_expand(const EdgeFunctional& f, const BkarOptions& opts) {
  BkarResult total;
  for_each_oriented_forest(f.n, [&](const OrientedForest& forest) {
    const BkarResult t = forest_term(f, forest, opts);
    total.value += t.value;
    total.error_estimate += t.error_estimate;
    ++total.forests;
  }, opts.max_n);
  return total;
}

BkarResult tree_sum(const EdgeFunctional& f, const std::vector<int>& block, const BkarOptions& opts) {
  require(!block.empty(), "tree_sum: empty block");
  for (int v : block) require(v >= 0 && v < f.n, "tree_sum: vertex out of range");
  BkarResult total;
  for_each_oriented_tree(static_cast<int>(block.size()), [&](const OrientedForest& t) {
    OrientedForest lifted{f.n, {}};
    for (const auto& [a, b] : t.edges) lifted.edges.emplace_back(block[a], block[b]);
    const BkarResult r = forest_term(f, lifted, opts);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    ++total.forests;
  }, opts.max_n);
  return total;
}

}  // namespace lvr
