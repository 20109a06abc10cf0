#pragma once

#include <cstdint>
#include <random>

#include "sopool/aggregate.hpp"
#include "sopool/gradcheck.hpp"
#include "sopool/pn_elementwise.hpp"
#include "sopool/pn_spectral.hpp"

// Randomized checks shared by the verify command and the acceptance tests.
// Every check is a pure function of its arguments and seed.
namespace sopool::harness {

using Rng = std::mt19937_64;

/// Uniform entries in [lo, hi).
Matrix random_matrix(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng);
/// Symmetric with upper-triangle entries uniform in [−1, 1).
SymMatrix random_symmetric(std::size_t n, Rng& rng);
/// (1/N)·XXᵀ for a dim×(dim+3) Gaussian X; positive definite almost surely.
SymMatrix random_spd(std::size_t n, Rng& rng);

struct ElementwiseCase {
  PNConfig cfg;
  std::size_t d = 3;
  std::size_t code_dim = 0;
  std::size_t n = 5;
};

/// pn_bwd against central differences of ⟨W, Ψ(Φ)⟩ for a random strictly
/// positive Φ (away from the rectifier kink) and random nonnegative codes.
GradReport check_elementwise_grad(const ElementwiseCase& c, std::uint64_t seed);

/// spectral_grad_m (eigen path) against central differences over symmetric
/// directions of M, on a random SPD matrix of size dim.
GradReport check_spectral_grad(const PNConfig& params, std::size_t dim, std::uint64_t seed);

/// sqrt_bwd_sylvester against central differences of ⟨W, M^½⟩.
GradReport check_sylvester_grad(std::size_t dim, std::uint64_t seed);

/// maxexp_spectral_bwd_closed against central differences.
GradReport check_maxexp_closed_grad(std::size_t dim, unsigned eta, std::uint64_t seed);

/// rel_frobenius_diff between the Sylvester gradient and the eigen-path
/// gradient of ψ = sqrt.
double sylvester_vs_eigen(std::size_t dim, std::uint64_t seed);

/// rel_frobenius_diff between the closed MaxExp gradient and the eigen path.
double maxexp_closed_vs_eigen(std::size_t dim, unsigned eta, std::uint64_t seed);

/// Frobenius distance between the closed-form and eigen-path forwards.
double dual_path_forward_gap(const PNConfig& params, std::size_t dim, std::uint64_t seed);

}  // namespace sopool::harness
