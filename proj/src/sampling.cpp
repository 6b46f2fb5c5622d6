#include "lvr/sampling.hpp"

#include <cmath>
#include <exception>

namespace lvr {

std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) {
  // splitmix64 finalizer over a mixed (seed, chunk) pair.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (chunk + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ChunkStats run_chunks(long long samples, int n_obs, std::uint64_t seed, Execution exec,
                      const std::function<void(Rng&, std::vector<Welford>&)>& body) {
  require(samples >= 1, "monte carlo: samples must be >= 1");
  require(n_obs >= 1, "monte carlo: need at least one observable");
  const int chunks = static_cast<int>(std::min<long long>(kMcChunks, samples));
  ChunkStats stats(chunks, std::vector<Welford>(n_obs));
  std::exception_ptr failure;
  auto work = [&](int c) {
    const long long count = samples / chunks + (c < samples % chunks ? 1 : 0);
    Rng rng(chunk_seed(seed, static_cast<std::uint64_t>(c)));
    try {
      for (long long s = 0; s < count; ++s) body(rng, stats[c]);
    } catch (...) {
#pragma omp critical(lvr_run_chunks_failure)
      if (!failure) failure = std::current_exception();
    }
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int c = 0; c < chunks; ++c) work(c);
  } else {
    for (int c = 0; c < chunks; ++c) work(c);
  }
  if (failure) std::rethrow_exception(failure);
  return stats;
}

Welford merged(const ChunkStats& stats, int obs) {
  Welford w;
  for (const auto& chunk : stats) w.merge(chunk[obs]);
  return w;
}

McEstimate mean_estimate(const ChunkStats& stats, int obs, std::uint64_t seed) {
  const Welford w = merged(stats, obs);
  McEstimate e;
  e.value = w.mean;
  e.std_error = w.std_error();
  e.samples = w.n;
  e.seed = seed;
  e.effective_sample_size = double(w.n);
  return e;
}

McEstimate jackknife_estimate(const ChunkStats& stats, std::uint64_t seed,
                              const std::function<cdouble(const std::vector<cdouble>&)>& estimator) {
  const int chunks = static_cast<int>(stats.size());
  const int n_obs = static_cast<int>(stats.front().size());
  std::vector<Welford> total(n_obs);
  for (int o = 0; o < n_obs; ++o) total[o] = merged(stats, o);
  std::vector<cdouble> means(n_obs);
  for (int o = 0; o < n_obs; ++o) means[o] = total[o].mean;
  McEstimate e;
  e.value = estimator(means);
  e.samples = total[0].n;
  e.seed = seed;
  e.effective_sample_size = double(total[0].n);
  if (chunks < 2) return e;
  // Leave-one-chunk-out means from the totals.
  std::vector<cdouble> loo(chunks);
  cdouble loo_mean = 0.0;
  for (int c = 0; c < chunks; ++c) {
    std::vector<cdouble> m(n_obs);
    for (int o = 0; o < n_obs; ++o) {
      const double nt = double(total[o].n), nc = double(stats[c][o].n);
      m[o] = (total[o].mean * nt - stats[c][o].mean * nc) / (nt - nc);
    }
    loo[c] = estimator(m);
    loo_mean += loo[c];
  }
  loo_mean /= double(chunks);
  double ss = 0.0;
  for (const auto& v : loo) ss += std::norm(v - loo_mean);
  e.std_error = std::sqrt(ss * (chunks - 1) / chunks);
  return e;
}

ComplexMatrix sample_gaussian(int N, double variance, Rng& rng) {
  require(N >= 1, "sample_gaussian: N must be >= 1");
  require(variance >= 0, "sample_gaussian: variance must be >= 0");
  std::normal_distribution<double> g(0.0, std::sqrt(variance / 2));
  ComplexMatrix m(N, N);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = cdouble(re, im);
    }
  return m;
}

ComplexMatrix sample_gaussian(int N, double variance, std::uint64_t seed) {
  Rng rng(chunk_seed(seed, 0));
  return sample_gaussian(N, variance, rng);
}

ComplexMatrix sample_haar(int N, Rng& rng) {
  const ComplexMatrix z = sample_gaussian(N, 1.0, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < N; ++j) {
    const cdouble d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= a > 0 ? d / a : cdouble(1.0);
  }
  return q;
}

}  // namespace lvr
