#include "nlclass/matrix.hpp"

#include <cmath>
#include <cstdio>

#include "nlclass/errors.hpp"

namespace nlclass {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix shapes differ");
}

}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) + b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b);
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = s * a(i, j);
  return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector product: length mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

Cholesky::Cholesky(const Matrix& a) : r_(a.rows(), a.cols()) {
  if (a.rows() != a.cols()) throw DimensionMismatch("Cholesky needs a square matrix");
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double s = a(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= r_(k, j) * r_(k, j);
    if (!(s > 0.0)) throw NumericalBreakdown("matrix is not positive definite");
    const double rjj = std::sqrt(s);
    r_(j, j) = rjj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a(j, i);
      for (std::size_t k = 0; k < j; ++k) t -= r_(k, j) * r_(k, i);
      r_(j, i) = t / rjj;
    }
  }
}

std::vector<double> Cholesky::solve(std::span<const double> b) const {
  const std::size_t n = r_.rows();
  if (b.size() != n) throw DimensionMismatch("Cholesky solve: length mismatch");
  std::vector<double> y(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {  // R^T y = b
    for (std::size_t k = 0; k < i; ++k) y[i] -= r_(k, i) * y[k];
    y[i] /= r_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {  // R x = y
    for (std::size_t k = i + 1; k < n; ++k) y[i] -= r_(i, k) * y[k];
    y[i] /= r_(i, i);
  }
  return y;
}

Matrix Cholesky::solve(const Matrix& b) const {
  Matrix x(b.rows(), b.cols());
  std::vector<double> col(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    const auto s = solve(col);
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = s[i];
  }
  return x;
}

std::string format_matrix(const Matrix& m) {
  std::string out = "[";
  char buf[40];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += i ? ", [" : "[";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out += j ? ", " : "";
      out += buf;
    }
    out += "]";
  }
  return out + "]";
}

}  // namespace nlclass
