#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "sopool/matrix.hpp"

namespace sopool {

struct GridShape {
  std::size_t width = 0;
  std::size_t height = 0;
};

/// d×N features, one column per location. When grid is set, N is a multiple
/// of width·height (several patches concatenated column-wise).
struct FeatureBatch {
  Matrix phi;
  std::optional<GridShape> grid;

  std::size_t dim() const noexcept { return phi.rows(); }
  std::size_t count() const noexcept { return phi.cols(); }
};

/// Features stacked over spatial codes: rows [0, d) hold φ, rows [d, d+Z') hold c.
struct AugmentedBatch {
  Matrix phibar;
  std::size_t d = 0;

  std::size_t code_dim() const noexcept { return phibar.rows() - d; }
  std::size_t count() const noexcept { return phibar.cols(); }
  Matrix features() const;
  Matrix codes() const;
};

struct CoocMatrix {
  SymMatrix m;
  double trace = 0.0;

  std::size_t dim() const noexcept { return m.dim(); }
};

/// Concatenates patches column-wise. All patches must share d and grid.
FeatureBatch concat_patches(std::span<const FeatureBatch> patches);

/// max(0, φ) then φ − β·μ with μ the mean of the rectified columns.
FeatureBatch rectify_center(const FeatureBatch& batch, double beta);

AugmentedBatch augment(const FeatureBatch& batch, const Matrix& codes);

/// M = (1/N)·Φ̄Φ̄ᵀ. Entry (i,j) is simd::dot over rows i and j, so the
/// reduction order is fixed per entry (16-lane fma accumulation, pairwise
/// tree over the lanes, sequential tail) and independent of how the rows are
/// split over threads.
CoocMatrix cooc_matrix(const AugmentedBatch& aug);

/// M / (trace(M) + λ).
SymMatrix trace_normalize(const CoocMatrix& m, double lambda);

}  // namespace sopool
