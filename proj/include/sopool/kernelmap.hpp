#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sopool/matrix.hpp"

namespace sopool {

/// Equally spaced Gaussian pivots and their bandwidth.
struct PivotGrid {
  std::vector<double> pivots;
  double sigma = 0.0;

  std::size_t size() const noexcept { return pivots.size(); }
};

/// Pivots at −0.2, −0.2 + 1.4/(Z−1), …, 1.2. Config error for Z < 2.
std::vector<double> make_pivots(std::size_t z);

/// Grid over make_pivots(z). sigma defaults to one pivot spacing, 1.4/(Z−1).
/// Config error unless 2 ≤ Z ≤ 64 and sigma > 0.
PivotGrid make_grid(std::size_t z, std::optional<double> sigma = std::nullopt);

/// Entry k is exp(−(x − ζ_k)² / σ²), i.e. a Gaussian of bandwidth σ/√2.
std::vector<double> feature_map(double x, const PivotGrid& grid);

/// α·[φ(x/(W−1)); φ(y/(H−1))], length 2Z.
std::vector<double> encode_spatial(std::size_t x, std::size_t y, std::size_t width,
                                   std::size_t height, double alpha, const PivotGrid& grid);

/// Codes for N columns laid out row-major over a W×H map, repeated per patch:
/// column n sits at x = n % W, y = (n / W) % H. N must be a multiple of W·H.
/// Returns a 2Z×N matrix.
Matrix spatial_codes(std::size_t n, std::size_t width, std::size_t height, double alpha,
                     const PivotGrid& grid);

}  // namespace sopool
