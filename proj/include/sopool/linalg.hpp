#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "sopool/matrix.hpp"

namespace sopool {

using ScalarFn = std::function<double(double)>;

/// Eigendecomposition of a symmetric matrix. values are sorted descending;
/// column k of vectors is the eigenvector for values[k], with its
/// largest-magnitude component made positive.
struct EigenPair {
  std::vector<double> values;
  Matrix vectors;
};

/// ½(X + Xᵀ), exactly symmetric.
SymMatrix sym(const Matrix& x);

/// Cyclic Jacobi. Converged when the off-diagonal Frobenius norm drops below
/// 1e-12 times the diagonal norm; gives up (Numeric error) after 100 sweeps.
EigenPair sym_eig(const SymMatrix& s);

/// U·diag(fn(λ))·Uᵀ. Domain error when fn is non-finite at an eigenvalue.
SymMatrix mat_fun(const SymMatrix& s, const ScalarFn& fn);
SymMatrix mat_fun(const EigenPair& eig, const ScalarFn& fn);

/// Sⁿ by binary powering.
SymMatrix mat_int_pow(const SymMatrix& s, unsigned n);

// Closed matrix forms. These never touch an eigendecomposition, so they serve
// as the second route for the spectral functions.

/// LU with partial pivoting. RankDeficient error on a zero pivot.
Matrix solve(const Matrix& a, const Matrix& b);
Matrix inverse(const Matrix& a);

/// Principal square root of an SPD matrix by Denman–Beavers iteration.
SymMatrix sqrtm(const SymMatrix& s);

/// Matrix exponential by scaling and squaring of a Taylor series.
SymMatrix expm(const SymMatrix& s);

/// Principal logarithm of an SPD matrix: inverse scaling and squaring with
/// repeated sqrtm, then the series log Y = 2·atanh((Y−I)(Y+I)⁻¹).
SymMatrix logm(const SymMatrix& s);

}  // namespace sopool
