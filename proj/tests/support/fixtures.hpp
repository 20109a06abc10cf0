#pragma once

#include <cmath>
#include <random>

#include "sopool/harness.hpp"
#include "sopool/linalg.hpp"
#include "sopool/matrix.hpp"

namespace fixtures {

using sopool::Matrix;
using sopool::SymMatrix;
using Rng = std::mt19937_64;

inline Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
  return sopool::harness::random_matrix(r, c, lo, hi, rng);
}

inline SymMatrix random_symmetric(std::size_t n, Rng& rng) {
  return sopool::harness::random_symmetric(n, rng);
}

inline SymMatrix random_spd(std::size_t n, Rng& rng) { return sopool::harness::random_spd(n, rng); }

// Haar-ish orthogonal matrix from modified Gram-Schmidt on a Gaussian matrix.
inline Matrix random_orthogonal(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix q(n, n);
  for (double& v : q.flat()) v = g(rng);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d += q(i, j) * q(i, k);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= d * q(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= norm;
  }
  return q;
}

// Q·S·Qᵀ, symmetrized to absorb rounding.
inline SymMatrix conjugate(const Matrix& q, const Matrix& s) {
  return sopool::sym(sopool::matmul(sopool::matmul(q, s), sopool::transpose(q)));
}

// Copy of the entries; safe to range-for over even when m is a temporary.
inline std::vector<double> entries(const Matrix& m) { return {m.flat().begin(), m.flat().end()}; }

inline Matrix diag(std::initializer_list<double> v) {
  Matrix m(v.size(), v.size());
  std::size_t i = 0;
  for (double x : v) m(i, i) = x, ++i;
  return m;
}

}  // namespace fixtures

#include "sopool/kernelmap.hpp"

namespace fixtures {

struct KernelFit {
  double c = 0.0;
  double max_err = 0.0;
  double rms_err = 0.0;
};

// Fits c in c·⟨φ(x), φ(y)⟩ ≈ exp(−(x−y)²/(2σ²)) by least squares over an
// n×n grid on [0, 1]², then reports the pointwise errors.
inline KernelFit kernel_fit(std::size_t z, double sigma, std::size_t n = 100) {
  const sopool::PivotGrid grid = sopool::make_grid(z, sigma);
  std::vector<std::vector<double>> feats;
  for (std::size_t i = 0; i < n; ++i) feats.push_back(sopool::feature_map(i / double(n - 1), grid));
  std::vector<double> k, g;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < z; ++t) dot += feats[i][t] * feats[j][t];
      const double dx = (double(i) - double(j)) / double(n - 1);
      k.push_back(dot);
      g.push_back(std::exp(-dx * dx / (2.0 * sigma * sigma)));
    }
  }
  double kk = 0.0, kg = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) kk += k[i] * k[i], kg += k[i] * g[i];
  KernelFit fit;
  fit.c = kg / kk;
  double sq = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double e = std::abs(fit.c * k[i] - g[i]);
    fit.max_err = std::max(fit.max_err, e);
    sq += e * e;
  }
  fit.rms_err = std::sqrt(sq / double(k.size()));
  return fit;
}

}  // namespace fixtures
