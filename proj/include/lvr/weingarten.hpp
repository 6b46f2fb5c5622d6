#pragma once

#include "lvr/rational.hpp"
#include "lvr/sampling.hpp"

#include <string>
#include <vector>

namespace lvr {

// Parts sorted non-decreasing, all >= 1.
struct IntegerPartition {
  std::vector<int> parts;

  IntegerPartition() = default;
  explicit IntegerPartition(std::vector<int> p);
  static IntegerPartition parse(const std::string& text);  // "2,1"

  int total() const;
  int length() const { return static_cast<int>(parts.size()); }
  std::string str() const;
  bool operator==(const IntegerPartition&) const = default;
  auto operator<=>(const IntegerPartition&) const = default;
};

std::vector<IntegerPartition> partitions_of(int k);

// Bijection on {0..k-1}; images[i] is the image of i.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> images);
  static Permutation identity(int k);
  // A permutation whose cycles have the given lengths, on consecutive points.
  static Permutation with_cycle_type(const IntegerPartition& type);

  int size() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[i]; }
  const std::vector<int>& images() const { return images_; }

  Permutation inverse() const;
  // (a * b)(i) = a(b(i)).
  friend Permutation operator*(const Permutation& a, const Permutation& b);
  bool operator==(const Permutation&) const = default;

  int num_cycles() const;
  IntegerPartition cycle_type() const;

 private:
  std::vector<int> images_;
};

std::vector<Permutation> all_permutations(int k);

// Wg(zeta, N) for zeta of the given cycle type: the entry of the inverse of
// the Gram matrix G_{s,t} = N^{#cycles(s t^{-1})}. Requires k <= N and
// k <= max_k.
Rational weingarten(const IntegerPartition& cycle_type, int N, int max_k = 5);

// Right-hand side of the unitary moment formula for the index lists
// (0-based), as an exact rational.
Rational haar_moment_exact(const std::vector<int>& a, const std::vector<int>& b,
                           const std::vector<int>& c, const std::vector<int>& d, int N);

// Monte-Carlo estimate of E[U_{a1 b1}..U_{ak bk} conj(U_{c1 d1})..conj(U_{cl dl})].
McEstimate haar_moment_mc(const std::vector<int>& a, const std::vector<int>& b,
                          const std::vector<int>& c, const std::vector<int>& d, int N,
                          long long samples, std::uint64_t seed,
                          Execution exec = Execution::Parallel);

// prod_m Tr(X^{k_m}).
cdouble trace_invariant(const IntegerPartition& pi, const ComplexMatrix& X);

// One delta factor delta_{d_l, a_{rho tau sigma^{-1}(l)}} delta_{c_l, b_{rho xi sigma^{-1}(l)}}:
// for slot l, d_l is tied to a_{a_slot} and c_l to b_{b_slot}.
struct IndexDelta {
  int l = 0;
  int a_slot = 0;
  int b_slot = 0;
};

// Requires tau * xi^{-1} to have cycle type pi.
std::vector<IndexDelta> cumulant_index_structure(const IntegerPartition& pi, const Permutation& rho,
                                                 const Permutation& sigma, const Permutation& tau,
                                                 const Permutation& xi);

// sum over rho, sigma of the delta patterns, as a dense tensor over index
// tuples (a_1..a_k, b_1..b_k, c_1..c_k, d_1..d_k) in [0,N)^{4k}, flattened in
// that order with a_1 slowest.
std::vector<long long> assembled_index_tensor(const IntegerPartition& pi, const Permutation& tau,
                                              const Permutation& xi, int N);

}  // namespace lvr
