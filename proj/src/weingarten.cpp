#include "lvr/weingarten.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace lvr {

IntegerPartition::IntegerPartition(std::vector<int> p) : parts(std::move(p)) {
  for (int x : parts) require(x >= 1, "partition: parts must be >= 1");
  std::sort(parts.begin(), parts.end());
}

IntegerPartition IntegerPartition::parse(const std::string& text) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    require(!tok.empty(), "partition: empty part in '" + text + "'");
    std::size_t used = 0;
    int x = 0;
    try {
      x = std::stoi(tok, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("partition: bad part '" + tok + "'");
    }
    require(used == tok.size(), "partition: bad part '" + tok + "'");
    v.push_back(x);
  }
  require(!v.empty(), "partition: empty");
  return IntegerPartition(std::move(v));
}

int IntegerPartition::total() const { return std::accumulate(parts.begin(), parts.end(), 0); }

std::string IntegerPartition::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + std::to_string(parts[i]);
  return s + ")";
}

std::vector<IntegerPartition> partitions_of(int k) {
  require(k >= 1, "partitions_of: k must be >= 1");
  std::vector<IntegerPartition> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int left, int min_part) {
    if (left == 0) {
      out.emplace_back(cur);
      return;
    }
    for (int part = min_part; part <= left; ++part) {
      cur.push_back(part);
      rec(left - part, part);
      cur.pop_back();
    }
  };
  rec(k, 1);
  return out;
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  std::vector<char> hit(images_.size(), 0);
  for (int x : images_) {
    require(x >= 0 && x < size() && !hit[x], "permutation: not a bijection");
    hit[x] = 1;
  }
}

Permutation Permutation::identity(int k) {
  std::vector<int> v(k);
  std::iota(v.begin(), v.end(), 0);
  return Permutation(std::move(v));
}

Permutation Permutation::with_cycle_type(const IntegerPartition& type) {
  std::vector<int> v(type.total());
  int start = 0;
  for (int len : type.parts) {
    for (int i = 0; i < len; ++i) v[start + i] = start + (i + 1) % len;
    start += len;
  }
  return Permutation(std::move(v));
}

Permutation Permutation::inverse() const {
  std::vector<int> v(images_.size());
  for (int i = 0; i < size(); ++i) v[images_[i]] = i;
  return Permutation(std::move(v));
}

Permutation operator*(const Permutation& a, const Permutation& b) {
  require(a.size() == b.size(), "permutation: size mismatch");
  std::vector<int> v(a.size());
  for (int i = 0; i < a.size(); ++i) v[i] = a(b(i));
  return Permutation(std::move(v));
}

int Permutation::num_cycles() const { return cycle_type().length(); }

IntegerPartition Permutation::cycle_type() const {
  std::vector<char> seen(images_.size(), 0);
  std::vector<int> lens;
  for (int i = 0; i < size(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (int j = i; !seen[j]; j = images_[j]) {
      seen[j] = 1;
      ++len;
    }
    lens.push_back(len);
  }
  return IntegerPartition(std::move(lens));
}

std::vector<Permutation> all_permutations(int k) {
  std::vector<int> v(k);
  std::iota(v.begin(), v.end(), 0);
  std::vector<Permutation> out;
  do {
    out.emplace_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

Rational weingarten(const IntegerPartition& cycle_type, int N, int max_k) {
  const int k = cycle_type.total();
  require(k >= 1, "weingarten: empty cycle type");
  require(N >= 1, "weingarten: N must be >= 1");
  require(k <= N, "weingarten: Gram matrix is singular for k > N");
  if (k > max_k) throw ResourceLimit("weingarten: k exceeds the configured maximum");

  // Wg is a class function, so G * Wg = delta_id reduces to one equation per
  // class representative with one unknown per class.
  const auto classes = partitions_of(k);
  std::map<IntegerPartition, int> index;
  for (std::size_t i = 0; i < classes.size(); ++i) index[classes[i]] = static_cast<int>(i);
  const int m = static_cast<int>(classes.size());
  const auto perms = all_permutations(k);
  std::vector<std::vector<Rational>> A(m, std::vector<Rational>(m + 1, Rational(0)));
  std::vector<BigInt> npow(k + 1, 1);
  for (int i = 1; i <= k; ++i) npow[i] = npow[i - 1] * N;
  for (int r = 0; r < m; ++r) {
    const Permutation s = Permutation::with_cycle_type(classes[r]);
    for (const auto& t : perms) A[r][index[t.cycle_type()]] += npow[(s * t.inverse()).num_cycles()];
    A[r][m] = r == index[IntegerPartition(std::vector<int>(k, 1))] ? 1 : 0;
  }
  for (int col = 0; col < m; ++col) {
    int piv = col;
    while (piv < m && A[piv][col] == 0) ++piv;
    if (piv == m) throw NumericError("weingarten: singular class system");
    std::swap(A[col], A[piv]);
    for (int r = 0; r < m; ++r) {
      if (r == col || A[r][col] == 0) continue;
      const Rational f = A[r][col] / A[col][col];
      for (int c = col; c <= m; ++c) A[r][c] -= f * A[col][c];
    }
  }
  const int target = index.at(cycle_type);
  return A[target][m] / A[target][target];
}

namespace {

void check_indices(const std::vector<int>& v, int N) {
  for (int x : v) require(x >= 0 && x < N, "haar moment: index out of range");
}

}  // namespace

Rational haar_moment_exact(const std::vector<int>& a, const std::vector<int>& b,
                           const std::vector<int>& c, const std::vector<int>& d, int N) {
  require(a.size() == b.size() && c.size() == d.size(), "haar moment: paired index lists");
  for (const auto* v : {&a, &b, &c, &d}) check_indices(*v, N);
  if (a.size() != c.size()) return 0;
  const int k = static_cast<int>(a.size());
  if (k == 0) return 1;
  const auto perms = all_permutations(k);
  std::map<IntegerPartition, Rational> wg;
  Rational total = 0;
  for (const auto& tau : perms) {
    bool ok = true;
    for (int i = 0; i < k && ok; ++i) ok = a[tau(i)] == c[i];
    if (!ok) continue;
    for (const auto& sigma : perms) {
      bool ok2 = true;
      for (int i = 0; i < k && ok2; ++i) ok2 = b[sigma(i)] == d[i];
      if (!ok2) continue;
      const IntegerPartition type = (tau * sigma.inverse()).cycle_type();
      auto it = wg.find(type);
      if (it == wg.end()) it = wg.emplace(type, weingarten(type, N)).first;
      total += it->second;
    }
  }
  return total;
}

McEstimate haar_moment_mc(const std::vector<int>& a, const std::vector<int>& b,
                          const std::vector<int>& c, const std::vector<int>& d, int N,
                          long long samples, std::uint64_t seed, Execution exec) {
  require(a.size() == b.size() && c.size() == d.size(), "haar moment: paired index lists");
  for (const auto* v : {&a, &b, &c, &d}) check_indices(*v, N);
  const ChunkStats stats = run_chunks(samples, 1, seed, exec, [&](Rng& rng, std::vector<Welford>& acc) {
    const ComplexMatrix U = sample_haar(N, rng);
    cdouble x = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) x *= U(a[i], b[i]);
    for (std::size_t i = 0; i < c.size(); ++i) x *= std::conj(U(c[i], d[i]));
    acc[0].add(x);
  });
  return mean_estimate(stats, 0, seed);
}

cdouble trace_invariant(const IntegerPartition& pi, const ComplexMatrix& X) {
  require(X.rows() == X.cols(), "trace_invariant: square matrix required");
  cdouble r = 1.0;
  for (int k : pi.parts) {
    ComplexMatrix P = ComplexMatrix::Identity(X.rows(), X.cols());
    for (int i = 0; i < k; ++i) P = P * X;
    r *= P.trace();
  }
  return r;
}

std::vector<IndexDelta> cumulant_index_structure(const IntegerPartition& pi, const Permutation& rho,
                                                 const Permutation& sigma, const Permutation& tau,
                                                 const Permutation& xi) {
  const int k = pi.total();
  for (const auto* p : {&rho, &sigma, &tau, &xi}) require(p->size() == k, "index structure: size mismatch");
  require((tau * xi.inverse()).cycle_type() == pi, "index structure: tau xi^{-1} must have cycle type pi");
  const Permutation si = sigma.inverse();
  const Permutation left = rho * tau * si;
  const Permutation right = rho * xi * si;
  std::vector<IndexDelta> out;
  for (int l = 0; l < k; ++l) out.push_back({l, left(l), right(l)});
  return out;
}

std::vector<long long> assembled_index_tensor(const IntegerPartition& pi, const Permutation& tau,
                                              const Permutation& xi, int N) {
  const int k = pi.total();
  require(N >= 1, "assembled_index_tensor: N must be >= 1");
  long long size = 1;
  for (int i = 0; i < 4 * k; ++i) size *= N;
  if (size > 20'000'000) throw ResourceLimit("assembled_index_tensor: tensor too large");
  std::vector<long long> T(size, 0);
  const auto perms = all_permutations(k);
  std::vector<int> idx(4 * k);
  for (const auto& rho : perms)
    for (const auto& sigma : perms) {
      const auto deltas = cumulant_index_structure(pi, rho, sigma, tau, xi);
      for (long long flat = 0; flat < size; ++flat) {
        long long f = flat;
        for (int i = 4 * k - 1; i >= 0; --i) {
          idx[i] = static_cast<int>(f % N);
          f /= N;
        }
        // Layout: a = idx[0..k), b = idx[k..2k), c = idx[2k..3k), d = idx[3k..4k).
        bool ok = true;
        for (const auto& dl : deltas) {
          ok = ok && idx[3 * k + dl.l] == idx[dl.a_slot] && idx[2 * k + dl.l] == idx[k + dl.b_slot];
          if (!ok) break;
        }
        T[flat] += ok;
      }
    }
  return T;
}

}  // namespace lvr
