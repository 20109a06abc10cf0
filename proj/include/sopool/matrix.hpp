#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "sopool/error.hpp"

namespace sopool {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> init);

  static Matrix identity(std::size_t n);
  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

Matrix transpose(const Matrix& a);
Matrix matmul(const Matrix& a, const Matrix& b);
/// Element-wise product.
Matrix hadamard(const Matrix& a, const Matrix& b);
double frobenius(const Matrix& a);
double trace(const Matrix& a);
/// Sum over i,j of a_ij * b_ij.
double inner(const Matrix& a, const Matrix& b);
double max_abs(const Matrix& a);
bool all_finite(const Matrix& a);

/// ||a - b||_F / max(1, ||b||_F)
double rel_frobenius_diff(const Matrix& a, const Matrix& b);

/// Symmetric matrix. Construction checks |a_ij - a_ji| <= 1e-12 * max(1, |a_ij|).
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Matrix m);

  /// Mirrors the upper triangle onto the lower one; no tolerance check.
  static SymMatrix from_upper(Matrix m);
  static SymMatrix identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }
  static SymMatrix zeros(std::size_t n) { return SymMatrix(Matrix(n, n)); }

  std::size_t dim() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }
  operator const Matrix&() const noexcept { return m_; }

  bool operator==(const SymMatrix& other) const = default;

 private:
  Matrix m_;
};

/// True when a_ij == a_ji bit for bit.
bool exactly_symmetric(const Matrix& a);

}  // namespace sopool
