#include "sopool/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sopool/simd.hpp"

namespace sopool {

SymMatrix sym(const Matrix& x) {
  require(x.square(), ErrorKind::Dimension, "sym: matrix must be square");
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = i; j < x.cols(); ++j) out(i, j) = 0.5 * (x(i, j) + x(j, i));
  return SymMatrix::from_upper(std::move(out));
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i) * a(i, i);
  return std::sqrt(s);
}

constexpr int kMaxSweeps = 100;
constexpr double kJacobiTol = 1e-12;

}  // namespace

EigenPair sym_eig(const SymMatrix& s) {
  const std::size_t n = s.dim();
  require(all_finite(s.matrix()), ErrorKind::Numeric, "sym_eig: non-finite entry in input");

  Matrix a = s.matrix();
  // Rotations act on rows of vt (= Vᵀ) so that both updates are contiguous.
  Matrix vt = Matrix::identity(n);
  const auto& k = simd::active();

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off == 0.0 || off < kJacobiTol * diagonal_norm(a)) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double g = 100.0 * std::abs(apq);
        if (sweep > 4 && std::abs(app) + g == std::abs(app) && std::abs(aqq) + g == std::abs(aqq)) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        k.rot(a.row(p).data(), a.row(q).data(), n, c, sn);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          a(r, p) = a(p, r);
          a(r, q) = a(q, r);
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;

        k.rot(vt.row(p).data(), vt.row(q).data(), n, c, sn);
      }
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "sym_eig: Jacobi did not converge in " << kMaxSweeps << " sweeps (dim " << n << ")";
    fail(ErrorKind::Numeric, os.str());
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigenPair out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = order[col];
    out.values[col] = a(src, src);
    const auto v = vt.row(src);
    std::size_t arg = 0;
    for (std::size_t r = 1; r < n; ++r)
      if (std::abs(v[r]) > std::abs(v[arg])) arg = r;
    const double sign = v[arg] < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, col) = sign * v[r];
  }
  return out;
}

SymMatrix mat_fun(const EigenPair& eig, const ScalarFn& fn) {
  const std::size_t n = eig.values.size();
  // scaled = U·diag(fn(λ)); result = scaled·Uᵀ
  Matrix scaled = eig.vectors;
  for (std::size_t col = 0; col < n; ++col) {
    const double f = fn(eig.values[col]);
    if (!std::isfinite(f)) {
      std::ostringstream os;
      os << "mat_fun: function is not finite at eigenvalue " << eig.values[col];
      fail(ErrorKind::Domain, os.str());
    }
    for (std::size_t r = 0; r < n; ++r) scaled(r, col) *= f;
  }
  return SymMatrix::from_upper(matmul(scaled, transpose(eig.vectors)));
}

SymMatrix mat_fun(const SymMatrix& s, const ScalarFn& fn) { return mat_fun(sym_eig(s), fn); }

SymMatrix mat_int_pow(const SymMatrix& s, unsigned n) {
  Matrix result = Matrix::identity(s.dim());
  Matrix base = s.matrix();
  bool first = true;
  while (n > 0) {
    if (n & 1u) {
      result = first ? base : matmul(result, base);
      first = false;
    }
    n >>= 1u;
    if (n > 0) base = matmul(base, base);
  }
  return sym(result);
}

Matrix solve(const Matrix& a, const Matrix& b) {
  require(a.square(), ErrorKind::Dimension, "solve: matrix must be square");
  require(a.rows() == b.rows(), ErrorKind::Dimension, "solve: right-hand side row mismatch");
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  Matrix lu = a;
  Matrix x = b;
  const auto& k = simd::active();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(piv, col))) piv = r;
    if (lu(piv, col) == 0.0) {
      std::ostringstream os;
      os << "solve: matrix is singular (zero pivot in column " << col << ")";
      fail(ErrorKind::RankDeficient, os.str());
    }
    if (piv != col) {
      std::swap_ranges(lu.row(col).begin(), lu.row(col).end(), lu.row(piv).begin());
      std::swap_ranges(x.row(col).begin(), x.row(col).end(), x.row(piv).begin());
    }
    const double inv_pivot = 1.0 / lu(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lu(r, col) * inv_pivot;
      if (f == 0.0) continue;
      k.axpy(-f, lu.row(col).data() + col, lu.row(r).data() + col, n - col);
      k.axpy(-f, x.row(col).data(), x.row(r).data(), m);
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    for (std::size_t r = col + 1; r < n; ++r) k.axpy(-lu(col, r), x.row(r).data(), x.row(col).data(), m);
    k.scale(x.row(col).data(), m, 1.0 / lu(col, col));
  }
  return x;
}

Matrix inverse(const Matrix& a) { return solve(a, Matrix::identity(a.rows())); }

SymMatrix sqrtm(const SymMatrix& s) {
  const std::size_t n = s.dim();
  Matrix y = s.matrix();
  Matrix z = Matrix::identity(n);
  // Quadratic convergence: once a step is below 1e-12 relative, one more
  // iteration reaches rounding level.
  bool polish = false;
  for (int it = 0; it < 100; ++it) {
    Matrix y_next = sym(0.5 * (y + inverse(z))).matrix();
    Matrix z_next = sym(0.5 * (z + inverse(y))).matrix();
    const double step = frobenius(y_next - y);
    y = std::move(y_next);
    z = std::move(z_next);
    if (polish) return SymMatrix::from_upper(std::move(y));
    if (step <= 1e-12 * frobenius(y)) polish = true;
  }
  fail(ErrorKind::Numeric, "sqrtm: Denman-Beavers iteration did not converge");
}

SymMatrix expm(const SymMatrix& s) {
  const std::size_t n = s.dim();
  const double norm = frobenius(s.matrix());
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix x = s.matrix() * std::ldexp(1.0, -squarings);

  Matrix sum = Matrix::identity(n);
  Matrix term = Matrix::identity(n);
  for (int j = 1; j <= 40; ++j) {
    term = matmul(term, x) * (1.0 / j);
    sum += term;
    if (frobenius(term) <= 1e-18 * frobenius(sum)) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sym(matmul(sum, sum)).matrix();
  return sym(sum);
}

SymMatrix logm(const SymMatrix& s) {
  const std::size_t n = s.dim();
  const Matrix eye = Matrix::identity(n);
  SymMatrix y = s;
  int roots = 0;
  while (frobenius(y.matrix() - eye) > 0.1) {
    require(roots < 64, ErrorKind::Numeric, "logm: square-root ladder did not approach identity");
    y = sqrtm(y);
    ++roots;
  }
  const Matrix w = matmul(y.matrix() - eye, inverse(y.matrix() + eye));
  const Matrix w2 = matmul(w, w);
  Matrix power = w;
  Matrix series = w;
  for (int j = 1; j < 60; ++j) {
    power = matmul(power, w2);
    const Matrix term = power * (1.0 / (2 * j + 1));
    series += term;
    if (frobenius(term) <= 1e-18 * std::max(1e-300, frobenius(series))) break;
  }
  return sym(series * std::ldexp(2.0, roots));
}

}  // namespace sopool
