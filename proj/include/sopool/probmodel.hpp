#pragma once

#include <cstdint>

namespace sopool {

/// Per-trial event probabilities: p for a co-occurrence, q and s for either
/// event alone; the remaining 1 − p − q − s is neither.
struct BernoulliPool {
  unsigned n = 1;  // trials, 1..30
  double p = 0.0;
  double q = 0.0;
  double s = 0.0;

  /// Validation error unless 1 ≤ n ≤ 30, every probability is in [0, 1] and
  /// p + q + s ≤ 1 (up to 1e-12).
  void validate() const;
};

/// Σ_{k=1..N} C(N,k)·p^k·(1−p)^{N−k}
double binom_at_least_one(const BernoulliPool& pool);

/// Σ over (k, k', k'') with k ≥ 1 of the four-outcome multinomial mass
/// N!/(k! k'! k''! r!)·p^k q^{k'} s^{k''} (1−p−q−s)^r, r = N − k − k' − k''.
/// Coefficients come from lgamma.
double multinom_at_least_one(const BernoulliPool& pool);

/// Exact multinomial coefficient in integer arithmetic (N ≤ 20).
std::uint64_t multinomial_coefficient(unsigned n, unsigned a, unsigned b, unsigned c);

/// Monte-Carlo frequency of at least one co-occurrence in N trials.
///
/// Trials are split into 16 shards; shard k draws from std::mt19937_64 seeded
/// with std::seed_seq{low32(seed), high32(seed), k}, and each trial draws N uniforms from
/// std::uniform_real_distribution<double>(0, 1), counting a co-occurrence when
/// u < p. The shard split is fixed, so the result depends only on
/// (pool, trials, seed) and not on the thread count.
double simulate_cooc(const BernoulliPool& pool, std::uint64_t trials, std::uint64_t seed);

}  // namespace sopool
