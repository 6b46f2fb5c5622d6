#include "lvr/matrix_model.hpp"

#include "lvr/quadrature.hpp"
#include "lvr/series.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <functional>

namespace lvr {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

void require_square(const ComplexMatrix& X, const char* what) {
  require(X.rows() == X.cols() && X.rows() >= 1, std::string(what) + ": square matrix required");
  require(X.allFinite(), std::string(what) + ": non-finite entries");
}

void require_hermitian(const ComplexMatrix& X, const char* what) {
  require_square(X, what);
  const double scale = std::max(1.0, X.norm());
  require((X - X.adjoint()).norm() <= 1e-12 * scale, std::string(what) + ": matrix is not Hermitian");
}

Eigen::SelfAdjointEigenSolver<ComplexMatrix> hermitian_psd_eigen(const ComplexMatrix& X, const char* what) {
  require_hermitian(X, what);
  const ComplexMatrix H = (X + X.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  require(es.eigenvalues().minCoeff() >= -1e-12 * scale, std::string(what) + ": matrix is not positive semidefinite");
  return es;
}

ComplexMatrix power(const ComplexMatrix& A, int k) {
  ComplexMatrix P = ComplexMatrix::Identity(A.rows(), A.cols());
  for (int i = 0; i < k; ++i) P = P * A;
  return P;
}

}  // namespace

void ModelParams::validate() const {
  require(p >= 2, "model: p must be >= 2");
  require(N >= 1, "model: N must be >= 1");
  require(std::isfinite(lambda.real()) && std::isfinite(lambda.imag()), "model: lambda must be finite");
}

void ModelParams::validate_stable() const {
  validate();
  require(lambda.real() >= 0, "model: sampling requires Re lambda >= 0");
}

SuperOperator::SuperOperator(int N) : n_(N), m_(ComplexMatrix::Zero(N * N, N * N)) {
  require(N >= 1, "super operator: N must be >= 1");
}

SuperOperator::SuperOperator(ComplexMatrix dense) : n_(0), m_(std::move(dense)) {
  require(m_.rows() == m_.cols(), "super operator: square matrix required");
  n_ = static_cast<int>(std::lround(std::sqrt(double(m_.rows()))));
  require(n_ >= 1 && n_ * n_ == m_.rows(), "super operator: dimension must be N^2");
}

SuperOperator SuperOperator::identity(int N) {
  SuperOperator s(N);
  s.m_.setIdentity();
  return s;
}

SuperOperator SuperOperator::tensor(const ComplexMatrix& left, const ComplexMatrix& right) {
  require_square(left, "tensor");
  require(left.rows() == right.rows() && right.rows() == right.cols(), "tensor: size mismatch");
  const int N = static_cast<int>(left.rows());
  SuperOperator s(N);
  // vec(B H C) = (C^T kron B) vec(H).
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) s.m_.block(i * N, j * N, N, N) = right(j, i) * left;
  return s;
}

ComplexMatrix SuperOperator::apply(const ComplexMatrix& H) const {
  require(H.rows() == n_ && H.cols() == n_, "super operator: size mismatch");
  const Eigen::VectorXcd v = m_ * H.reshaped();
  return v.reshaped(n_, n_);
}

ComplexMatrix SuperOperator::solve(const ComplexMatrix& H) const {
  require(H.rows() == n_ && H.cols() == n_, "super operator: size mismatch");
  Eigen::FullPivLU<ComplexMatrix> lu(m_);
  if (!lu.isInvertible()) throw NumericError("super operator: singular");
  const Eigen::VectorXcd v = lu.solve(Eigen::VectorXcd(H.reshaped()));
  return v.reshaped(n_, n_);
}

SuperOperator SuperOperator::operator+(const SuperOperator& o) const {
  require(n_ == o.n_, "super operator: size mismatch");
  return SuperOperator(ComplexMatrix(m_ + o.m_));
}

SuperOperator SuperOperator::operator*(const SuperOperator& o) const {
  require(n_ == o.n_, "super operator: size mismatch");
  return SuperOperator(ComplexMatrix(m_ * o.m_));
}

SuperOperator SuperOperator::scaled(cdouble s) const { return SuperOperator(ComplexMatrix(m_ * s)); }

cdouble z_quadrature_n1(int p, cdouble lambda) {
  ModelParams{p, 1, lambda}.validate_stable();
  return integrate_half_line([&](double t) { return std::exp(-t - lambda * std::pow(t, p)); }, 1e-12);
}

Comparison verify_prop1_n1(int p, cdouble lambda) {
  Comparison c;
  c.lhs = z_quadrature_n1(p, lambda);
  c.rhs = integrate_half_line(
      [&](double t) {
        const cdouble a = scalar_a(p, lambda, t);
        return std::exp(-t) / (1.0 + double(p) * lambda * std::pow(a, p - 1));
      },
      1e-12);
  c.diff = std::abs(c.lhs - c.rhs);
  return c;
}

ComplexMatrix matrix_A(int p, cdouble lambda, const ComplexMatrix& X) {
  require(p >= 2, "matrix_A: p must be >= 2");
  const auto es = hermitian_psd_eigen(X, "matrix_A");
  const ComplexMatrix& U = es.eigenvectors();
  Eigen::VectorXcd d(X.rows());
  for (int i = 0; i < X.rows(); ++i) d(i) = scalar_a(p, lambda, std::max(0.0, es.eigenvalues()(i)));
  return U * d.asDiagonal() * U.adjoint();
}

namespace {

bool contour_in_sector(const KeyholeContour& c, cdouble u) {
  const cdouble v = u + c.r;
  return std::abs(v) <= c.R + c.r && std::abs(std::arg(v)) <= c.psi;
}

// a(lambda, u) is singular where -lambda u^{p-1} lies on [z_c, inf): p-1
// rays from the origin starting at radius (z_c/|lambda|)^{1/(p-1)}.
bool sector_hits_cut(int p, cdouble lambda, const KeyholeContour& c) {
  if (lambda == 0.0) return false;
  const double rho_c = std::pow(tp_branch_point(p) / std::abs(lambda), 1.0 / (p - 1));
  const double rho_max = c.R + 2 * c.r;
  if (rho_c > rho_max) return false;
  for (int m = 0; m < p - 1; ++m) {
    const double theta = (kPi - std::arg(lambda) + 2 * kPi * m) / (p - 1);
    const int steps = 4000;
    for (int s = 0; s <= steps; ++s) {
      const double rho = rho_c + (rho_max - rho_c) * s / steps;
      if (contour_in_sector(c, std::polar(rho, theta))) return true;
    }
  }
  return false;
}

}  // namespace

KeyholeContour default_contour(int p, cdouble lambda, const ComplexMatrix& X) {
  const auto es = hermitian_psd_eigen(X, "contour");
  KeyholeContour c;
  const double xmax = std::max(0.0, es.eigenvalues().maxCoeff());
  c.R = 1.25 * xmax + 0.5;
  if (lambda != 0.0) {
    const double rho_c = std::pow(tp_branch_point(p) / std::abs(lambda), 1.0 / (p - 1));
    c.r = std::min(0.5, 0.4 * rho_c);
  }
  for (int i = 0; i < 8 && sector_hits_cut(p, lambda, c); ++i) c.psi /= 2;
  if (sector_hits_cut(p, lambda, c)) throw NumericError("contour: no sector avoids the branch cut");
  return c;
}

ComplexMatrix matrix_A_via_contour(int p, cdouble lambda, const ComplexMatrix& X, const KeyholeContour& c) {
  require(p >= 2, "contour: p must be >= 2");
  require(c.r > 0 && c.R > 0 && c.psi > 0 && c.psi < kPi && c.panels >= 1, "contour: bad parameters");
  const auto es = hermitian_psd_eigen(X, "contour");
  const double xmin = es.eigenvalues().minCoeff(), xmax = es.eigenvalues().maxCoeff();
  require(xmin > -c.r && xmax < c.R, "contour: spectrum not enclosed");
  if (sector_hits_cut(p, lambda, c)) throw InvalidArgument("contour: sector meets the branch cut of a");
  const double gap = std::min(c.R - xmax, (xmin + c.r) * std::sin(c.psi));
  if (gap < 1e-6 * (1.0 + std::abs(xmax))) throw NumericError("contour: too close to the spectrum");

  const int N = static_cast<int>(X.rows());
  const ComplexMatrix I = ComplexMatrix::Identity(N, N);
  ComplexMatrix acc = ComplexMatrix::Zero(N, N);
  using GL = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  auto add_node = [&](cdouble u, cdouble du, double w) {
    const ComplexMatrix Rm = (u * I - X).partialPivLu().solve(I);
    if (!Rm.allFinite() || Rm.norm() > 1e10) throw NumericError("contour: resolvent blow-up");
    acc += (w * scalar_a(p, lambda, u)) * du * Rm;
  };
  // Composite Gauss-Legendre on parameter interval [t0, t1] of a path.
  auto integrate_path = [&](double t0, double t1, const std::function<cdouble(double)>& u,
                            const std::function<cdouble(double)>& du) {
    const double h = (t1 - t0) / c.panels;
    for (int k = 0; k < c.panels; ++k) {
      const double mid = t0 + (k + 0.5) * h, half = h / 2;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        for (int sgn : {-1, 1}) {
          const double t = mid + sgn * half * xs[i];
          add_node(u(t), du(t), ws[i] * half);
          if (xs[i] == 0.0) break;
        }
      }
    }
  };
  const double L = c.R + c.r;
  const cdouble down = std::polar(1.0, -c.psi), up = std::polar(1.0, c.psi);
  integrate_path(0.0, L, [&](double s) { return -c.r + s * down; }, [&](double) { return down; });
  integrate_path(
      -c.psi, c.psi, [&](double th) { return -c.r + std::polar(L, th); },
      [&](double th) { return cdouble(0, 1) * std::polar(L, th); });
  integrate_path(0.0, L, [&](double s) { return -c.r + s * up; }, [&](double) { return -up; });
  return acc / cdouble(0, 2 * kPi);
}

SuperOperator sigma_operator(int p, cdouble lambda, const ComplexMatrix& Xl, const ComplexMatrix& Xr) {
  require(Xl.rows() == Xr.rows(), "sigma: X_l and X_r must have the same size");
  const ComplexMatrix Al = matrix_A(p, lambda, Xl);
  const ComplexMatrix Ar = matrix_A(p, lambda, Xr);
  const int N = static_cast<int>(Xl.rows());
  SuperOperator s(N);
  for (int k = 0; k < p; ++k) s = s + SuperOperator::tensor(power(Al, k), power(Ar, p - 1 - k));
  return s.scaled(lambda);
}

cdouble loop_vertex_action(const SuperOperator& sigma) {
  const ComplexMatrix M = ComplexMatrix::Identity(sigma.dense().rows(), sigma.dense().cols()) + sigma.dense();
  Eigen::ComplexEigenSolver<ComplexMatrix> es(M, false);
  if (es.info() != Eigen::Success) throw NumericError("loop vertex action: eigensolver failed");
  cdouble s = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const cdouble mu = es.eigenvalues()(i);
    if (mu.real() <= 0 && std::abs(mu.imag()) <= 1e-12 * std::max(1.0, std::abs(mu)))
      throw NumericError("loop vertex action: 1 + Sigma has spectrum on the negative axis");
    s += std::log(mu);
  }
  return -s;
}

double resolvent_derivative_check(int p, cdouble lambda, const ComplexMatrix& X, const ComplexMatrix& H) {
  require_hermitian(H, "resolvent check direction");
  require(H.rows() == X.rows(), "resolvent check: size mismatch");
  const double eps = 1e-5;
  const ComplexMatrix Ap = matrix_A(p, lambda, X + eps * H);
  const ComplexMatrix Am = matrix_A(p, lambda, X - eps * H);
  const ComplexMatrix fd = (Ap - Am) / (2 * eps);
  const SuperOperator one_plus_sigma = SuperOperator::identity(static_cast<int>(X.rows())) +
                                       sigma_operator(p, lambda, X, X);
  return (fd - one_plus_sigma.solve(H)).norm();
}

namespace {

McResult weighted_mean(const ModelParams& params, std::uint64_t seed, long long samples, Execution exec,
                       const std::function<cdouble(const ComplexMatrix&)>& weight) {
  params.validate_stable();
  const ChunkStats stats = run_chunks(samples, 3, seed, exec, [&](Rng& rng, std::vector<Welford>& acc) {
    const ComplexMatrix M = sample_gaussian(params.N, 1.0 / params.N, rng);
    const cdouble w = weight(M);
    acc[0].add(w);
    acc[1].add(std::abs(w));
    acc[2].add(std::norm(w));
  });
  McResult r;
  r.estimate = mean_estimate(stats, 0, seed);
  const double m1 = merged(stats, 1).mean.real(), m2 = merged(stats, 2).mean.real();
  r.estimate.effective_sample_size = m2 > 0 ? double(r.estimate.samples) * m1 * m1 / m2 : 0.0;
  if (r.estimate.effective_sample_size < 0.01 * double(r.estimate.samples))
    r.warning = "effective sample size below 1% of samples";
  return r;
}

}  // namespace

McResult mc_partition(const ModelParams& params, std::uint64_t seed, long long samples, Execution exec) {
  const int p = params.p;
  const cdouble c = -double(params.N) * params.lambda;
  return weighted_mean(params, seed, samples, exec, [&](const ComplexMatrix& M) -> cdouble {
    if (params.lambda == 0.0) return 1.0;
    const ComplexMatrix X = M * M.adjoint();
    return std::exp(c * power(X, p).trace().real());
  });
}

McResult mc_partition_lvr(const ModelParams& params, std::uint64_t seed, long long samples, Execution exec) {
  return weighted_mean(params, seed, samples, exec, [&](const ComplexMatrix& M) -> cdouble {
    if (params.lambda == 0.0) return 1.0;
    const ComplexMatrix Xl = M * M.adjoint(), Xr = M.adjoint() * M;
    return std::exp(loop_vertex_action(sigma_operator(params.p, params.lambda, Xl, Xr)));
  });
}

namespace {

// Set partitions of {0..n-1} as block lists.
std::vector<std::vector<std::vector<int>>> set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<int>> cur;
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (std::size_t b = 0; b < cur.size(); ++b) {
      cur[b].push_back(i);
      rec(i + 1);
      cur[b].pop_back();
    }
    cur.push_back({i});
    rec(i + 1);
    cur.pop_back();
  };
  rec(0);
  return out;
}

}  // namespace

McResult mc_cumulant(const ModelParams& params, const CumulantPattern& pat, std::uint64_t seed,
                     long long samples, Execution exec, int max_k, int max_N) {
  params.validate_stable();
  const int k = pat.k();
  require(k >= 1 && pat.b.size() == pat.a.size() && pat.c.size() == pat.a.size() && pat.d.size() == pat.a.size(),
          "cumulant: index lists must all have length k >= 1");
  if (k > max_k) throw ResourceLimit("cumulant: k exceeds the configured maximum");
  if (params.N > max_N) throw ResourceLimit("cumulant: N exceeds the configured maximum");
  for (const auto* v : {&pat.a, &pat.b, &pat.c, &pat.d})
    for (int x : *v) require(x >= 0 && x < params.N, "cumulant: index out of range");

  const int n = 2 * k;
  const int subsets = 1 << n;
  const int p = params.p;
  const cdouble c = -double(params.N) * params.lambda;
  const ChunkStats stats = run_chunks(samples, subsets, seed, exec, [&](Rng& rng, std::vector<Welford>& acc) {
    const ComplexMatrix M = sample_gaussian(params.N, 1.0 / params.N, rng);
    cdouble w = 1.0;
    if (params.lambda != 0.0) w = std::exp(c * power(M * M.adjoint(), p).trace().real());
    cdouble x[4];
    for (int i = 0; i < k; ++i) {
      x[2 * i] = pat.transposed ? M(pat.b[i], pat.a[i]) : M(pat.a[i], pat.b[i]);
      x[2 * i + 1] = std::conj(M(pat.c[i], pat.d[i]));
    }
    // Slot 0 holds the weight, slot S the weighted product over subset S.
    for (int S = 0; S < subsets; ++S) {
      cdouble v = w;
      for (int i = 0; i < n; ++i)
        if (S >> i & 1) v *= x[i];
      acc[S].add(v);
    }
  });

  const auto partitions = set_partitions(n);
  const double scale = std::pow(double(params.N), k);
  auto estimator = [&](const std::vector<cdouble>& m) {
    cdouble kappa = 0.0;
    for (const auto& part : partitions) {
      const int nb = static_cast<int>(part.size());
      double coef = (nb % 2 == 1) ? 1.0 : -1.0;
      for (int j = 2; j < nb; ++j) coef *= j;
      cdouble prod = coef;
      for (const auto& block : part) {
        int S = 0;
        for (int i : block) S |= 1 << i;
        prod *= m[S] / m[0];
      }
      kappa += prod;
    }
    return scale * kappa;
  };
  McResult r;
  r.estimate = jackknife_estimate(stats, seed, estimator);
  const double mean_abs_w = std::abs(merged(stats, 0).mean);
  if (mean_abs_w < 1e-3) r.warning = "weights nearly cancel; variance may be large";
  return r;
}

Comparison verify_source_change_of_variables(int p, cdouble lambda, cdouble J) {
  ModelParams{p, 1, lambda}.validate_stable();
  require(std::abs(J) <= 1.0, "source change of variables: |J| must be <= 1");
  const int K = 64;
  // Angular average (1/2pi) int dtheta of a periodic integrand, trapezoid rule.
  auto angular = [&](const std::function<cdouble(cdouble)>& g) {
    cdouble s = 0.0;
    for (int j = 0; j < K; ++j) s += g(std::polar(1.0, 2 * kPi * j / K));
    return s / double(K);
  };
  auto lhs_at = [&](cdouble src) {
    return integrate_half_line(
        [&](double t) {
          const double rho = std::sqrt(t);
          const cdouble ang = angular([&](cdouble e) {
            const cdouble w = rho * e;
            return std::exp(src * std::conj(w) + std::conj(src) * w);
          });
          return std::exp(-t - lambda * std::pow(t, p)) * ang;
        },
        1e-12);
  };
  auto rhs_at = [&](cdouble src) {
    return integrate_half_line(
        [&](double t) {
          const double rho = std::sqrt(t);
          const cdouble T = tp_eval(p, -lambda * std::pow(t, p - 1));
          const cdouble a = T * t;
          const cdouble jac = 1.0 / (1.0 + double(p) * lambda * std::pow(a, p - 1));
          const cdouble ang = angular([&](cdouble e) {
            const cdouble w = rho * e;
            return std::exp(src * std::conj(w) + std::conj(src) * w * T);
          });
          return std::exp(-t) * jac * ang;
        },
        1e-12);
  };
  Comparison c;
  c.lhs = lhs_at(J) / lhs_at(0.0);
  c.rhs = rhs_at(J) / rhs_at(0.0);
  c.diff = std::abs(c.lhs - c.rhs);
  return c;
}

}  // namespace lvr
