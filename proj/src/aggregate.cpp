#include "sopool/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sopool/parallel.hpp"
#include "sopool/simd.hpp"

namespace sopool {

Matrix AugmentedBatch::features() const {
  Matrix out(d, count());
  for (std::size_t r = 0; r < d; ++r) std::copy_n(phibar.row(r).begin(), count(), out.row(r).begin());
  return out;
}

Matrix AugmentedBatch::codes() const {
  Matrix out(code_dim(), count());
  for (std::size_t r = 0; r < code_dim(); ++r)
    std::copy_n(phibar.row(d + r).begin(), count(), out.row(r).begin());
  return out;
}

FeatureBatch concat_patches(std::span<const FeatureBatch> patches) {
  require(!patches.empty(), ErrorKind::EmptyBatch, "concat_patches: no patches");
  const std::size_t d = patches.front().dim();
  std::size_t total = 0;
  for (const auto& p : patches) {
    require(p.dim() == d, ErrorKind::Dimension, "concat_patches: feature dimensions differ");
    require(p.grid.has_value() == patches.front().grid.has_value() &&
                (!p.grid || (p.grid->width == patches.front().grid->width &&
                             p.grid->height == patches.front().grid->height)),
            ErrorKind::Dimension, "concat_patches: grid shapes differ");
    total += p.count();
  }
  FeatureBatch out{Matrix(d, total), patches.front().grid};
  std::size_t offset = 0;
  for (const auto& p : patches) {
    for (std::size_t r = 0; r < d; ++r)
      std::copy_n(p.phi.row(r).begin(), p.count(), out.phi.row(r).begin() + offset);
    offset += p.count();
  }
  return out;
}

FeatureBatch rectify_center(const FeatureBatch& batch, double beta) {
  require(beta >= 0.0 && beta <= 1.0, ErrorKind::Config, "beta must lie in [0, 1]");
  FeatureBatch out = batch;
  const std::size_t n = out.count();
  for (std::size_t r = 0; r < out.dim(); ++r) {
    auto row = out.phi.row(r);
    double sum = 0.0;
    for (double& v : row) {
      v = std::max(0.0, v);
      sum += v;
    }
    if (beta == 0.0 || n == 0) continue;
    const double shift = beta * (sum / static_cast<double>(n));
    for (double& v : row) v -= shift;
  }
  return out;
}

AugmentedBatch augment(const FeatureBatch& batch, const Matrix& codes) {
  if (codes.cols() != batch.count() && codes.rows() != 0) {
    std::ostringstream os;
    os << "augment: codes have " << codes.cols() << " columns, batch has " << batch.count();
    fail(ErrorKind::Dimension, os.str());
  }
  const std::size_t d = batch.dim();
  AugmentedBatch aug{Matrix(d + codes.rows(), batch.count()), d};
  for (std::size_t r = 0; r < d; ++r)
    std::copy_n(batch.phi.row(r).begin(), batch.count(), aug.phibar.row(r).begin());
  for (std::size_t r = 0; r < codes.rows(); ++r)
    std::copy_n(codes.row(r).begin(), batch.count(), aug.phibar.row(d + r).begin());
  return aug;
}

CoocMatrix cooc_matrix(const AugmentedBatch& aug) {
  const std::size_t n = aug.count();
  require(n >= 1, ErrorKind::EmptyBatch, "cooc_matrix: batch has no columns");
  const std::size_t dim = aug.phibar.rows();
  const auto& k = simd::active();
  const double inv_n = 1.0 / static_cast<double>(n);

  Matrix m(dim, dim);
  parallel_for(
      dim,
      [&](std::size_t i) {
        const double* ri = aug.phibar.row(i).data();
        for (std::size_t j = i; j < dim; ++j) m(i, j) = k.dot(ri, aug.phibar.row(j).data(), n) * inv_n;
      },
      dim * dim * n > (std::size_t{1} << 20) ? 8 : dim);
  SymMatrix s = SymMatrix::from_upper(std::move(m));
  const double tr = trace(s.matrix());
  return CoocMatrix{std::move(s), tr};
}

SymMatrix trace_normalize(const CoocMatrix& m, double lambda) {
  require(lambda > 0.0, ErrorKind::Config, "trace_normalize: lambda must be positive");
  return SymMatrix::from_upper(m.m.matrix() * (1.0 / (m.trace + lambda)));
}

}  // namespace sopool
