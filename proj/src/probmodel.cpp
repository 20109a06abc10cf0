#include "sopool/probmodel.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "sopool/error.hpp"
#include "sopool/parallel.hpp"

namespace sopool {

void BernoulliPool::validate() const {
  std::ostringstream os;
  if (n < 1 || n > 30) {
    os << "trial count N=" << n << " outside [1, 30]";
  } else if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0 && s >= 0.0 && s <= 1.0)) {
    os << "probabilities must lie in [0, 1] (p=" << p << ", q=" << q << ", s=" << s << ")";
  } else if (p + q + s > 1.0 + 1e-12) {
    os << "p + q + s = " << p + q + s << " exceeds 1";
  } else {
    return;
  }
  fail(ErrorKind::Validation, os.str());
}

double binom_at_least_one(const BernoulliPool& pool) {
  pool.validate();
  const unsigned n = pool.n;
  double coeff = 1.0;  // C(n, k), updated incrementally
  double sum = 0.0;
  for (unsigned k = 1; k <= n; ++k) {
    coeff = coeff * static_cast<double>(n - k + 1) / static_cast<double>(k);
    sum += coeff * std::pow(pool.p, k) * std::pow(1.0 - pool.p, n - k);
  }
  return sum;
}

double multinom_at_least_one(const BernoulliPool& pool) {
  pool.validate();
  const unsigned n = pool.n;
  const double rest = std::max(0.0, 1.0 - pool.p - pool.q - pool.s);
  const double log_n_fact = std::lgamma(n + 1.0);
  double sum = 0.0;
  for (unsigned k = 1; k <= n; ++k) {
    for (unsigned k1 = 0; k1 <= n - k; ++k1) {
      for (unsigned k2 = 0; k2 <= n - k - k1; ++k2) {
        const unsigned r = n - k - k1 - k2;
        const double log_coeff = log_n_fact - std::lgamma(k + 1.0) - std::lgamma(k1 + 1.0) -
                                 std::lgamma(k2 + 1.0) - std::lgamma(r + 1.0);
        sum += std::exp(log_coeff) * std::pow(pool.p, k) * std::pow(pool.q, k1) *
               std::pow(pool.s, k2) * std::pow(rest, r);
      }
    }
  }
  return sum;
}

std::uint64_t multinomial_coefficient(unsigned n, unsigned a, unsigned b, unsigned c) {
  require(n <= 20, ErrorKind::Validation, "exact multinomial coefficient supports N <= 20");
  require(a + b + c <= n, ErrorKind::Validation, "multinomial parts exceed N");
  // Product of binomials C(n, a)·C(n−a, b)·C(n−a−b, c); each step stays exact.
  auto binom = [](unsigned top, unsigned k) {
    std::uint64_t v = 1;
    for (unsigned i = 1; i <= k; ++i) v = v * (top - k + i) / i;
    return v;
  };
  return binom(n, a) * binom(n - a, b) * binom(n - a - b, c);
}

double simulate_cooc(const BernoulliPool& pool, std::uint64_t trials, std::uint64_t seed) {
  pool.validate();
  require(trials >= 1, ErrorKind::Validation, "simulate_cooc: need at least one trial");
  constexpr std::size_t kShards = 16;
  std::vector<std::uint64_t> hits(kShards, 0);
  parallel_for(kShards, [&](std::size_t shard) {
    const std::uint64_t begin = trials * shard / kShards;
    const std::uint64_t end = trials * (shard + 1) / kShards;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(shard)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uint64_t count = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      bool any = false;
      for (unsigned i = 0; i < pool.n; ++i) any |= uni(rng) < pool.p;
      count += any ? 1 : 0;
    }
    hits[shard] = count;
  });
  std::uint64_t total = 0;
  for (auto h : hits) total += h;
  return static_cast<double>(total) / static_cast<double>(trials);
}

}  // namespace sopool
