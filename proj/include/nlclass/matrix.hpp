#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace nlclass {

// Dense row-major real matrix. Zero rows or columns are allowed (B is n x 0
// for autonomous systems).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  std::span<const double> data() const { return data_; }

  Matrix transpose() const;
  double frobenius() const;
  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

// Cholesky factorization A = R^T R of a symmetric positive definite matrix.
// Throws NumericalBreakdown if a pivot is not positive.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& a);
  std::vector<double> solve(std::span<const double> b) const;
  Matrix solve(const Matrix& b) const;

 private:
  Matrix r_;  // upper triangular
};

// Row-major "[[a, b], [c, d]]" at 17 significant digits.
std::string format_matrix(const Matrix& m);

}  // namespace nlclass
