#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlclass/expr.hpp"
#include "nlclass/interval.hpp"
#include "nlclass/matrix.hpp"

namespace nlclass {

using ExprMatrix = std::vector<std::vector<Expr>>;

// x' = A x + G f(x, u) + B u,  y = C x, with f valid over the box omega
// (states first, then inputs).
struct SystemModel {
  std::size_t n = 0;  // states
  std::size_t m = 0;  // inputs
  std::size_t p = 0;  // outputs
  std::size_t g = 0;  // nonlinear components
  Matrix A;           // n x n
  Matrix B;           // n x m
  Matrix C;           // p x n
  Matrix G;           // n x g
  std::vector<Expr> f;
  IntervalBox omega;

  // Throws InputError (field path) or UnknownVariable describing the first
  // inconsistency.
  void validate() const;

  IntervalBox state_box() const;
};

// Xi(i, j) = sum_k G(i, k) * d f_k / d x_j, normalized.
ExprMatrix jacobian_exprs(const SystemModel& model);

// xi_i = sum_j G(i, j) f_j, normalized.
std::vector<Expr> xi_exprs(const SystemModel& model);

// Psi = (Xi + Xi^T) / 2, normalized.
ExprMatrix symmetric_part(const ExprMatrix& xi);

// Evaluates G f(x, u) at points; holds compiled tapes, so reuse it.
class Nonlinearity {
 public:
  explicit Nonlinearity(const SystemModel& model);

  // G f(x, u); x has length n, u length m.
  std::vector<double> gf(std::span<const double> x, std::span<const double> u) const;
  void gf(std::span<const double> x, std::span<const double> u, std::span<double> out) const;

  std::size_t n() const { return n_; }
  std::size_t m() const { return m_; }

 private:
  std::size_t n_;
  std::size_t m_;
  Matrix G_;
  std::vector<Tape> tapes_;
};

// Numeric Xi at a point z = (x, u).
Matrix jacobian_at(const std::vector<Tape>& xi_tapes, std::size_t n, std::span<const double> z);
std::vector<Tape> compile(const ExprMatrix& m);

}  // namespace nlclass
