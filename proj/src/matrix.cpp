#include "sopool/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sopool/parallel.hpp"
#include "sopool/simd.hpp"

namespace sopool {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Config: return "config";
    case ErrorKind::EmptyBatch: return "empty-batch";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Plan: return "plan";
    case ErrorKind::RankDeficient: return "rank-deficient";
    case ErrorKind::Invariant: return "invariant";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init)
    : rows_(init.size()), cols_(init.size() ? init.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : init) {
    require(r.size() == cols_, ErrorKind::Dimension, "ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

namespace {
void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows() << "x"
       << b.cols();
    fail(ErrorKind::Dimension, os.str());
  }
}
}  // namespace

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "sub");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  simd::active().scale(data_.data(), data_.size(), s);
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream os;
    os << "matmul: inner dimensions differ (" << a.cols() << " vs " << b.rows() << ")";
    fail(ErrorKind::Dimension, os.str());
  }
  Matrix c(a.rows(), b.cols());
  const auto& k = simd::active();
  const std::size_t n = b.cols();
  auto row_kernel = [&](std::size_t i) {
    double* ci = c.row(i).data();
    for (std::size_t p = 0; p < a.cols(); ++p) {
      k.axpy(a(i, p), b.row(p).data(), ci, n);
    }
  };
  const std::size_t work = a.rows() * a.cols() * b.cols();
  if (work > (1u << 22)) {
    parallel_for(a.rows(), row_kernel, 16);
  } else {
    for (std::size_t i = 0; i < a.rows(); ++i) row_kernel(i);
  }
  return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "hadamard");
  Matrix c(a.rows(), a.cols());
  simd::active().mul(a.data(), b.data(), c.data(), a.size());
  return c;
}

double frobenius(const Matrix& a) {
  return std::sqrt(simd::active().dot(a.data(), a.data(), a.size()));
}

double trace(const Matrix& a) {
  require(a.square(), ErrorKind::Dimension, "trace of non-square matrix");
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

double inner(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "inner");
  return simd::active().dot(a.data(), b.data(), a.size());
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.flat()) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const Matrix& a) {
  return std::all_of(a.flat().begin(), a.flat().end(), [](double v) { return std::isfinite(v); });
}

double rel_frobenius_diff(const Matrix& a, const Matrix& b) {
  return frobenius(a - b) / std::max(1.0, frobenius(b));
}

bool exactly_symmetric(const Matrix& a) {
  if (!a.square()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      if (a(i, j) != a(j, i)) return false;
  return true;
}

SymMatrix::SymMatrix(Matrix m) : m_(std::move(m)) {
  require(m_.square(), ErrorKind::Dimension, "symmetric matrix must be square");
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    for (std::size_t j = i + 1; j < m_.cols(); ++j) {
      const double gap = std::abs(m_(i, j) - m_(j, i));
      if (!(gap <= 1e-12 * std::max(1.0, std::abs(m_(i, j))))) {
        std::ostringstream os;
        os << "matrix is not symmetric at (" << i << "," << j << "): gap " << gap;
        fail(ErrorKind::Dimension, os.str());
      }
    }
  }
}

SymMatrix SymMatrix::from_upper(Matrix m) {
  require(m.square(), ErrorKind::Dimension, "symmetric matrix must be square");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) m(j, i) = m(i, j);
  SymMatrix s;
  s.m_ = std::move(m);
  return s;
}

}  // namespace sopool
