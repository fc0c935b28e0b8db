#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nlclass/matrix.hpp"

namespace nlclass {

// Symmetric matrix; construction stores (M + M^T) / 2 so entries are exactly
// symmetric.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Matrix& m);

  std::size_t n() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k belongs to values[k]
  int sweeps = 0;
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
// 1e-12 * ||M||_F. Throws NonConvergence after 100 sweeps.
EigenDecomposition eig_sym(const SymMatrix& m);

double lambda_max(const SymMatrix& m);
double lambda_min(const SymMatrix& m);

// max_i (M(i,i) + sum_{j != i} |M(i,j)|), an upper bound on lambda_max.
double gershgorin_max(const SymMatrix& m);
// min_i (M(i,i) - sum_{j != i} |M(i,j)|), a lower bound on lambda_min.
double gershgorin_min(const SymMatrix& m);
// max_i (M(i,i) + zeta * max_{j != i} |M(i,j)|); M(0,0) for n = 1.
double thm3_max(const SymMatrix& m, double zeta);

// Optimal value of the dimension constant: n - 1 (n >= 2).
double zeta_n(std::size_t n);

// Objective 1/v_i - 1 of the program defining zeta_n, where v is feasible iff
// sum_k |v_k| = 1, v_i > 0 and |v_j| <= v_i for all j. Returns NaN for
// infeasible v (tolerance 1e-12 on the equality).
double zeta_objective(const std::vector<double>& v, std::size_t i);

struct ZetaCheck {
  std::size_t n = 0;
  std::size_t samples = 0;
  std::size_t feasible = 0;
  double best = 0.0;             // largest objective among feasible samples
  std::vector<double> best_point;
  double uniform_value = 0.0;    // objective at v = (1/n, ..., 1/n)
};

// Random plus grid search over feasible points of the zeta program. Parallel
// over samples; the result does not depend on the thread count.
ZetaCheck verify_zeta(std::size_t n, std::size_t samples, std::uint64_t seed, int threads = 0);
ZetaCheck verify_zeta_serial(std::size_t n, std::size_t samples, std::uint64_t seed);

}  // namespace nlclass
