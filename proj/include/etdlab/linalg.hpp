#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace etdlab {

/// Small dense row-major matrix. Sized for chains of a few dozen states.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  [[nodiscard]] std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  [[nodiscard]] std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  [[nodiscard]] Matrix transpose() const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend Matrix operator*(double s, const Matrix& a);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> multiply(const Matrix& a, std::span<const double> x);

/// Solves A X = B by Gaussian elimination with partial pivoting.
/// Returns false (leaving x untouched) when a pivot falls below pivot_tol * max|A|.
bool solve(const Matrix& a, const Matrix& b, Matrix& x, double pivot_tol = 1e-12);

/// Numerical rank by row echelon reduction with relative tolerance.
std::size_t rank(const Matrix& a, double tol = 1e-10);

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(const Matrix& s, double tol = 1e-10);

/// Coefficients c[0..n] of det(sI - A) = s^n + c[1] s^(n-1) + ... + c[n], c[0] = 1.
std::vector<double> characteristic_polynomial(const Matrix& a);

double max_abs(std::span<const double> v);

}  // namespace etdlab
