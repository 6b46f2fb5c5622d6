#include "lvr/perturbation.hpp"

#include "lvr/forests.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <exception>

namespace lvr {

NPolynomial NPolynomial::monomial(const Rational& c, int power) {
  NPolynomial r;
  if (c != 0) r.terms_[power] = c;
  return r;
}

Rational NPolynomial::at(int N) const {
  require(N >= 1, "NPolynomial: N must be >= 1");
  Rational s = 0;
  for (const auto& [pw, c] : terms_) {
    Rational f = 1;
    for (int i = 0; i < std::abs(pw); ++i) f *= N;
    s += pw >= 0 ? Rational(c * f) : Rational(c / f);
  }
  return s;
}

double NPolynomial::at(double N) const {
  double s = 0;
  for (const auto& [pw, c] : terms_) s += to_double(c) * std::pow(N, pw);
  return s;
}

std::string NPolynomial::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    Rational c = it->second;
    const bool neg = c < 0;
    if (neg) c = -c;
    out += out.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
    const int pw = it->first;
    const std::string cs = to_string(c);
    if (pw == 0) {
      out += cs;
      continue;
    }
    if (c != 1) out += cs + "*";
    out += pw == 1 ? "N" : "N^" + std::to_string(pw);
  }
  return out;
}

NPolynomial& NPolynomial::operator+=(const NPolynomial& o) {
  for (const auto& [pw, c] : o.terms_) {
    Rational& t = terms_[pw];
    t += c;
    if (t == 0) terms_.erase(pw);
  }
  return *this;
}

NPolynomial operator*(const NPolynomial& a, const NPolynomial& b) {
  NPolynomial r;
  for (const auto& [pa, ca] : a.terms_)
    for (const auto& [pb, cb] : b.terms_) r += NPolynomial::monomial(ca * cb, pa + pb);
  return r;
}

int default_order_ceiling(int p) { return p == 2 ? 3 : p == 3 ? 2 : 1; }

namespace {

// Counts per (invariant, power of N) for one shard.
using Census = std::map<IntegerPartition, std::map<int, long long>>;

struct ShardResult {
  Census census;
  long long graphs = 0;
};

}  // namespace

GraphWeightedSeries perturbative_series(int p, int k, int max_order, const PerturbationOptions& opts) {
  require(p >= 2, "perturbative_series: p must be >= 2");
  require(k >= 0, "perturbative_series: k must be >= 0");
  require(max_order >= 0, "perturbative_series: max_order must be >= 0");
  const int ceiling = opts.order_ceiling < 0 ? default_order_ceiling(p) : opts.order_ceiling;
  if (max_order > ceiling) throw ResourceLimit("perturbative_series: order exceeds the configured ceiling");

  EnumerationOptions eo = opts.enumeration;
  eo.connected_only = true;
  GraphWeightedSeries out;
  out.p = p;
  out.k = k;
  Rational kfact2 = factorial(k);
  kfact2 *= kfact2;
  for (int n = 0; n <= max_order; ++n) {
    const int shards = num_shards(p, k, n);
    std::vector<ShardResult> results(shards);
    std::exception_ptr failure;
    auto run = [&](int s) {
      try {
        enumerate_shard(
            p, k, n, s,
            [&](const FeynmanMap& m) {
              const RibbonMap r = m.ribbon();
              const FaceStructure fs = faces(r);
              const EulerData ed = euler_characteristic(r);
              std::vector<int> parts;
              for (int f : fs.broken) {
                const int j = fs.j_cilia_per_face[f];
                if (fs.cilia_per_face[f] != 2 * j || j == 0)
                  throw NumericError("perturbative_series: broken face without alternating sources");
                parts.push_back(j);
              }
              ++results[s].census[IntegerPartition(std::move(parts))][ed.chi - k];
              ++results[s].graphs;
            },
            eo);
      } catch (...) {
#pragma omp critical(lvr_perturbation_failure)
        if (!failure) failure = std::current_exception();
      }
    };
    if (opts.exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
      for (int s = 0; s < shards; ++s) run(s);
    } else {
      for (int s = 0; s < shards; ++s) run(s);
    }
    if (failure) std::rethrow_exception(failure);

    OrderTerm term;
    term.order = n;
    const Rational weight = Rational(n % 2 ? -1 : 1) / (factorial(n) * kfact2);
    for (const auto& res : results) {
      term.graphs += res.graphs;
      for (const auto& [inv, powers] : res.census)
        for (const auto& [pw, count] : powers)
          term.by_invariant[inv] += NPolynomial::monomial(weight * Rational(count), pw);
    }
    out.orders.push_back(std::move(term));
  }
  return out;
}

nlohmann::json GraphWeightedSeries::to_json() const {
  nlohmann::json j;
  j["p"] = p;
  j["k"] = k;
  j["orders"] = nlohmann::json::array();
  for (const auto& t : orders) {
    nlohmann::json o;
    o["order"] = t.order;
    o["graphs_counted"] = t.graphs;
    o["coefficients"] = nlohmann::json::array();
    for (const auto& [inv, poly] : t.by_invariant) {
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& [pw, c] : poly.terms()) terms.push_back({pw, to_string(c)});
      std::string symbol;
      for (int m : inv.parts) symbol += (symbol.empty() ? "" : " ") + std::string("Tr(JJ^dagger)^") + std::to_string(m);
      o["coefficients"].push_back(
          {{"invariant", inv.parts}, {"symbol", symbol.empty() ? "1" : symbol}, {"N_polynomial", poly.str()}, {"terms", terms}});
    }
    j["orders"].push_back(o);
  }
  return j;
}

std::vector<NPolynomial> scalar_cumulant_series(int p, int k, const IntegerPartition& pi, int max_order,
                                                const PerturbationOptions& opts) {
  require(pi.total() == k, "scalar_cumulant_series: partition must have total k");
  const GraphWeightedSeries s = perturbative_series(p, k, max_order, opts);
  std::vector<NPolynomial> out;
  for (const auto& t : s.orders) {
    const auto it = t.by_invariant.find(pi);
    out.push_back(it == t.by_invariant.end() ? NPolynomial() : it->second);
  }
  return out;
}

RationalSeries evaluate_at(const std::vector<NPolynomial>& coeffs, int N) {
  std::vector<Rational> v;
  for (const auto& c : coeffs) v.push_back(c.at(N));
  return RationalSeries(std::move(v));
}

RationalSeries n1_moment_series(int p, int m, int length) {
  require(p >= 2 && m >= 0 && length >= 1, "n1_moment_series: bad arguments");
  std::vector<Rational> v;
  for (int n = 0; n < length; ++n) v.push_back(Rational(n % 2 ? -1 : 1) * factorial(p * n + m) / factorial(n));
  return RationalSeries(std::move(v));
}

RationalSeries n1_cumulant_series(int p, int k, int length) {
  const RationalSeries s0 = n1_moment_series(p, 0, length);
  if (k == 0) return s0.log();
  require(k == 1, "n1_cumulant_series: k must be 0 or 1");
  return n1_moment_series(p, 1, length) * s0.reciprocal();
}

// ---------------------------------------------------------------------------
// Tree amplitudes.

LvrGraph loop_tree(int vertices, const std::vector<std::pair<int, int>>& edges, const std::vector<int>& cilia) {
  require(vertices >= 1, "loop_tree: need a vertex");
  std::vector<std::vector<int>> rot(vertices);
  std::vector<std::pair<int, int>> half_edges;
  int next = 0;
  for (const auto& [a, b] : edges) {
    require(a >= 0 && a < vertices && b >= 0 && b < vertices && a != b, "loop_tree: bad edge");
    rot[a].push_back(next);
    rot[b].push_back(next + 1);
    half_edges.emplace_back(next, next + 1);
    next += 2;
  }
  std::vector<int> cil;
  for (int v : cilia) {
    require(v >= 0 && v < vertices, "loop_tree: bad cilium vertex");
    rot[v].push_back(next);
    cil.push_back(next++);
  }
  LvrGraph g;
  g.map = RibbonMap::from_rotations(rot, half_edges, cil);
  require(g.map.is_connected() && int(edges.size()) == vertices - 1, "loop_tree: not a tree");
  for (int e = 0; e < int(edges.size()); ++e) g.tree.push_back(e);
  return g;
}

double tree_amplitude_bound(int p, cdouble lambda, int N, int k, int pi_length, int edges, int vertices) {
  const double c = std::cos(std::arg(lambda) / (p - 1));
  require(c > 0, "tree bound: arg lambda outside the principal determination");
  double kf = 1;
  for (int i = 2; i <= k; ++i) kf *= i;
  double vf = 1;
  for (int i = 2; i <= vertices; ++i) vf *= i;
  return std::pow(double(N), 2 - pi_length) * std::pow(std::abs(lambda), edges) * kf * kf * std::pow(4.0, k) /
         (std::pow(c, 2 * edges + k) * vf);
}

bool TreeAmplitude::within_bound(double sigmas) const {
  return std::abs(value.value) <= bound + sigmas * value.std_error;
}

namespace {

// Gauss-Legendre on [0, 1] by the Golub-Welsch eigenproblem.
void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = (es.eigenvalues()(i) + 1) / 2;
    w[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);  // 2 v0^2 scaled by 1/2
  }
}

struct Corner {
  int vertex = 0;
  bool cilium_follows = false;
};

std::vector<Corner> face_corners(const RibbonMap& m) {
  const FaceStructure fs = faces(m);
  require(fs.faces.size() == 1, "tree amplitude: a tree has exactly one face");
  const auto& seq = fs.faces[0];
  if (seq.empty()) return {Corner{0, false}};
  std::vector<Corner> out;
  const int L = static_cast<int>(seq.size());
  for (int i = 0; i < L; ++i) {
    const int nxt = seq[(i + 1) % L];
    out.push_back({m.vertex_of(nxt), m.is_cilium(nxt)});
  }
  return out;
}

}  // namespace

TreeAmplitude tree_amplitude_mc(const LvrGraph& tree, const IntegerPartition& pi, const ModelParams& params,
                                std::uint64_t seed, long long samples, const TreeAmplitudeOptions& opts) {
  params.validate_stable();
  const RibbonMap& m = tree.map;
  const int v = m.num_vertices();
  const int e = m.num_edges();
  const int k = m.num_cilia();
  require(tree.loop_edges.empty() && e == v - 1 && m.is_connected(), "tree amplitude: graph must be a tree");
  if (v > opts.max_vertices) throw ResourceLimit("tree amplitude: too many vertices");
  require(k <= 2, "tree amplitude: at most two cilia");
  require(pi.total() == k, "tree amplitude: partition must have total equal to the cilia count");
  const int N = params.N;
  require(k < 2 || N >= 2, "tree amplitude: separating invariants at k = 2 needs N >= 2");

  TreeAmplitude out;
  out.vertices = v;
  out.edges = e;
  out.k = k;
  out.pi = pi;
  out.bound = tree_amplitude_bound(params.p, params.lambda, N, k, pi.length(), e, v);

  const std::vector<Corner> corners = face_corners(m);
  OrientedForest forest{v, m.edge_vertices()};
  std::vector<double> gx, gw;
  gauss_legendre01(opts.w_nodes, gx, gw);
  int nodes = 1;
  for (int i = 0; i < e; ++i) nodes *= opts.w_nodes;
  const long long per_node = std::max<long long>(2, samples / nodes);

  double vf = 1;
  for (int i = 2; i <= v; ++i) vf *= i;
  const cdouble prefactor = std::pow(-params.lambda, e) * std::pow(double(N), v - e) / vf;
  const ComplexMatrix I = ComplexMatrix::Identity(N, N);
  ComplexMatrix E11 = ComplexMatrix::Zero(N, N);
  E11(0, 0) = 1.0;

  auto coefficient = [&](const std::vector<cdouble>& t) -> cdouble {
    if (k == 0) return t[0];
    if (k == 1) return t[0] / double(N);
    const cdouble c11 = (t[0] - double(N) * t[1]) / (double(N) * N - N);
    return pi.length() == 2 ? c11 : t[1] - c11;
  };

  cdouble total = 0.0;
  double var = 0.0;
  long long used = 0;
  for (int node = 0; node < nodes; ++node) {
    std::vector<double> w(e);
    double weight = 1.0;
    for (int i = 0, rest = node; i < e; ++i, rest /= opts.w_nodes) {
      w[i] = gx[rest % opts.w_nodes];
      weight *= gw[rest % opts.w_nodes];
    }
    const Eigen::MatrixXd x = interpolated_matrix(forest, w);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
    const Eigen::MatrixXd B =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

    const std::uint64_t node_seed = chunk_seed(seed, 1000003ULL + node);
    const ChunkStats stats = run_chunks(per_node, 2, node_seed, opts.exec, [&](Rng& rng, std::vector<Welford>& acc) {
      std::vector<ComplexMatrix> G(v), R(v);
      for (int i = 0; i < v; ++i) G[i] = sample_gaussian(N, 1.0 / N, rng);
      for (int i = 0; i < v; ++i) {
        ComplexMatrix Mi = ComplexMatrix::Zero(N, N);
        for (int j = 0; j < v; ++j) Mi += B(i, j) * G[j];
        const SuperOperator S = sigma_operator(params.p, params.lambda, Mi * Mi.adjoint(), Mi.adjoint() * Mi);
        Eigen::PartialPivLU<ComplexMatrix> lu(ComplexMatrix::Identity(N * N, N * N) + S.dense());
        R[i] = lu.inverse();
        if (!R[i].allFinite() || R[i].norm() > 1e8) throw NumericError("tree amplitude: resolvent near-singular");
      }
      for (int obs = 0; obs < 2; ++obs) {
        const ComplexMatrix& Q = obs == 0 ? I : E11;
        ComplexMatrix H = I;
        for (const Corner& c : corners) {
          const Eigen::VectorXcd h = R[c.vertex] * H.reshaped();
          H = h.reshaped(N, N);
          if (c.cilium_follows) H = H * Q;
        }
        acc[obs].add(H.trace());
      }
    });
    const McEstimate est = jackknife_estimate(stats, node_seed, coefficient);
    total += weight * est.value;
    var += weight * weight * est.std_error * est.std_error;
    used += est.samples;
  }
  out.value.value = prefactor * total;
  out.value.std_error = std::abs(prefactor) * std::sqrt(var);
  out.value.samples = used;
  out.value.seed = seed;
  out.value.effective_sample_size = double(used);
  if (out.value.std_error > 0.1 * std::abs(out.value.value) && out.value.value != 0.0)
    out.warning = "relative standard error above 10%";
  return out;
}

// ---------------------------------------------------------------------------
// Remainders.

namespace {

double n1_moment(int p, int m, double lambda) {
  boost::math::quadrature::exp_sinh<double> es;
  return es.integrate([&](double t) { return t > 745 ? 0.0 : std::pow(t, m) * std::exp(-t - lambda * std::pow(t, p)); },
                      1e-13);
}

}  // namespace

RemainderReport remainder_estimate(int p, int k, int n, double lambda, int N, std::uint64_t seed, long long samples) {
  require(p >= 2 && n >= 0, "remainder: bad p or n");
  require(lambda > 0, "remainder: lambda must be real and positive");
  RemainderReport r;
  r.p = p;
  r.k = k;
  r.N = N;
  r.lambda = lambda;
  RationalSeries series;
  if (N == 1 && (k == 0 || k == 1)) {
    series = n1_cumulant_series(p, k, n + 1);
    const double z0 = n1_moment(p, 0, lambda);
    r.oracle = k == 0 ? std::log(z0) : n1_moment(p, 1, lambda) / z0;
    r.oracle_error = 1e-12 * std::max(1.0, std::abs(r.oracle));
  } else if (N == 2 && k == 0) {
    series = evaluate_at(scalar_cumulant_series(p, 0, IntegerPartition(), n), N);
    const McResult z = mc_partition({p, N, lambda}, seed, samples);
    r.oracle = std::log(z.estimate.value.real());
    r.oracle_error = z.estimate.std_error / z.estimate.value.real();
  } else {
    throw InvalidArgument("remainder: oracle unavailable for this (N, k)");
  }
  double partial = 0.0, lp = 1.0;
  for (int m = 0; m <= n; ++m) {
    partial += to_double(series.coeffs()[m]) * lp;
    lp *= lambda;  // now lambda^{m+1}
    RemainderRow row;
    row.n = m;
    row.partial_sum = partial;
    row.remainder = std::abs(r.oracle - partial);
    if (m == 0) {
      row.holds_at_n0 = row.remainder <= lambda;
    } else {
      const double denom = to_double(factorial((p - 1) * m)) * lp;
      row.sigma_needed = std::pow(row.remainder / denom, 1.0 / m);
      r.sigma = std::max(r.sigma, row.sigma_needed);
    }
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace lvr
