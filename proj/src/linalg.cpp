#include "etdlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "etdlab/errors.hpp"

namespace etdlab {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ContractError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw ContractError("Matrix product: inner dimensions differ");
  Matrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw ContractError("Matrix sum: shapes differ");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw ContractError("Matrix difference: shapes differ");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (double& v : c.data_) v *= s;
  return c;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw ContractError("Matrix-vector product: dimension mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

bool solve(const Matrix& a, const Matrix& b, Matrix& x, double pivot_tol) {
  if (!a.square() || a.rows() != b.rows()) throw ContractError("solve: shape mismatch");
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  Matrix lu = a;
  Matrix rhs = b;

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, max_abs(a.row(i)));
  if (scale == 0.0) return n == 0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu(r, col)) > std::abs(lu(piv, col))) piv = r;
    if (std::abs(lu(piv, col)) <= pivot_tol * scale) return false;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(piv, j), lu(col, j));
      for (std::size_t j = 0; j < m; ++j) std::swap(rhs(piv, j), rhs(col, j));
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lu(r, col) / lu(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) lu(r, j) -= f * lu(col, j);
      for (std::size_t j = 0; j < m; ++j) rhs(r, j) -= f * rhs(col, j);
    }
  }

  Matrix out(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t ii = n; ii-- > 0;) {
      double acc = rhs(ii, j);
      for (std::size_t k = ii + 1; k < n; ++k) acc -= lu(ii, k) * out(k, j);
      out(ii, j) = acc / lu(ii, ii);
    }
  }
  x = std::move(out);
  return true;
}

std::size_t rank(const Matrix& a, double tol) {
  Matrix m = a;
  double scale = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) scale = std::max(scale, max_abs(m.row(i)));
  if (scale == 0.0) return 0;

  std::size_t r = 0;
  for (std::size_t col = 0; col < m.cols() && r < m.rows(); ++col) {
    std::size_t piv = r;
    for (std::size_t i = r + 1; i < m.rows(); ++i)
      if (std::abs(m(i, col)) > std::abs(m(piv, col))) piv = i;
    if (std::abs(m(piv, col)) <= tol * scale) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(r, j));
    for (std::size_t i = r + 1; i < m.rows(); ++i) {
      const double f = m(i, col) / m(r, col);
      for (std::size_t j = col; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  return r;
}

std::vector<double> symmetric_eigenvalues(const Matrix& s, double tol) {
  if (!s.square()) throw ContractError("symmetric_eigenvalues: matrix not square");
  const std::size_t n = s.rows();
  Matrix a = s;

  auto off_norm = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) acc += a(i, j) * a(i, j);
    return std::sqrt(acc);
  };
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, max_abs(a.row(i)));
  const double threshold = tol * std::max(scale, 1.0);

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_norm() > threshold; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

std::vector<double> characteristic_polynomial(const Matrix& a) {
  if (!a.square()) throw ContractError("characteristic_polynomial: matrix not square");
  // Faddeev-LeVerrier recursion.
  const std::size_t n = a.rows();
  std::vector<double> c(n + 1, 0.0);
  c[0] = 1.0;
  Matrix m = Matrix::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix am = a * m;
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += am(i, i);
    c[k] = -trace / static_cast<double>(k);
    for (std::size_t i = 0; i < n; ++i) am(i, i) += c[k];
    m = std::move(am);
  }
  return c;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace etdlab
