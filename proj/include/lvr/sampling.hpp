#pragma once

#include "lvr/errors.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace lvr {

using cdouble = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

enum class Execution { Serial, Parallel };

struct McEstimate {
  cdouble value = 0.0;
  double std_error = 0.0;
  long long samples = 0;
  std::uint64_t seed = 0;
  double effective_sample_size = 0.0;
};

// Running mean and sum of squared deviations of a complex observable
// (variance is E|x - mean|^2).
struct Welford {
  long long n = 0;
  cdouble mean = 0.0;
  double m2 = 0.0;

  void add(cdouble x) {
    ++n;
    const cdouble d = x - mean;
    mean += d / double(n);
    m2 += std::real(std::conj(d) * (x - mean));
  }

  void merge(const Welford& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = double(n), nb = double(o.n), nt = na + nb;
    const cdouble d = o.mean - mean;
    mean += d * (nb / nt);
    m2 += o.m2 + std::norm(d) * na * nb / nt;
    n += o.n;
  }

  double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
  double std_error() const { return n > 1 ? std::sqrt(variance() / double(n)) : 0.0; }
};

// Work is split into a fixed number of chunks, each with its own stream
// derived from (seed, chunk). Results are merged in chunk order, so they do
// not depend on the number of workers.
constexpr int kMcChunks = 64;

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk);

using Rng = std::mt19937_64;

// Per-chunk observables: chunks[c][o] accumulates observable o in chunk c.
using ChunkStats = std::vector<std::vector<Welford>>;

// Runs `body(rng, stats)` once per sample; `stats` has n_obs slots.
ChunkStats run_chunks(long long samples, int n_obs, std::uint64_t seed, Execution exec,
                      const std::function<void(Rng&, std::vector<Welford>&)>& body);

// Merge of observable `obs` across chunks.
Welford merged(const ChunkStats& stats, int obs);

McEstimate mean_estimate(const ChunkStats& stats, int obs, std::uint64_t seed);

// Estimator applied to the merged observable means, with a delete-one-chunk
// jackknife error.
McEstimate jackknife_estimate(const ChunkStats& stats, std::uint64_t seed,
                              const std::function<cdouble(const std::vector<cdouble>&)>& estimator);

// Entries i.i.d. complex Gaussian with E|M_ab|^2 = variance.
ComplexMatrix sample_gaussian(int N, double variance, Rng& rng);
ComplexMatrix sample_gaussian(int N, double variance, std::uint64_t seed);

// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases of
// diag(R) moved into Q.
ComplexMatrix sample_haar(int N, Rng& rng);

}  // namespace lvr
