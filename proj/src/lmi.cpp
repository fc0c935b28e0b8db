#include "nlclass/lmi.hpp"

#include <algorithm>
#include <cmath>

#include "nlclass/errors.hpp"

namespace nlclass {

const char* kind_name(LmiKind k) { return k == LmiKind::lipschitz ? "lipschitz" : "osl_qib"; }

LmiKind parse_kind(const std::string& name) {
  if (name == "lipschitz") return LmiKind::lipschitz;
  if (name == "osl_qib") return LmiKind::osl_qib;
  throw InputError("kind", "unknown LMI kind '" + name + "'");
}

void LmiProblem::validate() const {
  if (A.rows() == 0 || A.rows() != A.cols()) throw DimensionMismatch("A must be square and nonempty");
  if (C.cols() != A.rows()) throw DimensionMismatch("C must have as many columns as A");
  for (double c : {gamma_l, gamma_s, gamma_q1, gamma_q2, delta})
    if (!std::isfinite(c)) throw DomainError("LMI constants must be finite");
  if (kind == LmiKind::lipschitz && gamma_l < 0.0) throw DomainError("gamma_l must be nonnegative");
}

double LmiProblem::margin() const {
  if (delta > 0.0) return delta;
  const double a = A.frobenius();
  return 1e-4 * (a > 0.0 ? a : 1.0);
}

SymMatrix assemble(const LmiProblem& pr, const LmiVariables& v) {
  const std::size_t n = pr.n();
  const std::size_t p = pr.p();
  if (pr.C.cols() != n || v.P.rows() != n || v.P.cols() != n)
    throw DimensionMismatch("LMI variable P does not match A");
  if (pr.kind == LmiKind::lipschitz && (v.Y.rows() != n || v.Y.cols() != p))
    throw DimensionMismatch("LMI variable Y must be n x p");

  const Matrix At = pr.A.transpose();
  Matrix top = At * v.P + v.P * pr.A;
  Matrix lower = v.P;
  double corner = 0.0;
  double diag = 0.0;
  if (pr.kind == LmiKind::lipschitz) {
    const Matrix YC = v.Y * pr.C;
    top = top - YC - YC.transpose();
    diag = v.eps * pr.gamma_l * pr.gamma_l;
    corner = -v.eps;
  } else {
    top = top - v.sigma * (pr.C.transpose() * pr.C);
    diag = v.eps1 * pr.gamma_s + v.eps2 * pr.gamma_q1;
    const double shift = (pr.gamma_q2 * v.eps2 - v.eps1) / 2.0;
    for (std::size_t i = 0; i < n; ++i) lower(i, i) += shift;
    corner = -v.eps2;
  }
  Matrix m(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m(i, j) = top(i, j) + (i == j ? diag : 0.0);
      m(n + i, j) = lower(i, j);
      m(i, n + j) = lower(j, i);
    }
    m(n + i, n + i) = corner;
  }
  return SymMatrix(m);
}

Matrix gain(const LmiProblem& pr, const LmiVariables& v) {
  const Cholesky chol(v.P);
  if (pr.kind == LmiKind::lipschitz) return chol.solve(v.Y);
  return (0.5 * v.sigma) * chol.solve(pr.C.transpose());
}

Certificate certify(const LmiProblem& pr, const LmiVariables& v) {
  const double delta = pr.margin();
  Certificate c;
  c.lambda_p_min = lambda_min(SymMatrix(v.P));
  c.lambda_lmi_max = lambda_max(assemble(pr, v));
  c.scalars_positive = pr.kind == LmiKind::lipschitz ? v.eps > 0.0
                                                      : v.sigma > 0.0 && v.eps1 > 0.0 && v.eps2 > 0.0;
  c.ok = c.lambda_p_min >= delta && c.lambda_lmi_max <= -delta && c.scalars_positive;
  return c;
}

namespace {

// Decision vector: upper triangle of P row by row, then Y row-major or
// sigma, then the scalar multipliers.
class Layout {
 public:
  explicit Layout(const LmiProblem& pr) : kind_(pr.kind), n_(pr.n()), p_(pr.p()) {}

  std::size_t p_count() const { return n_ * (n_ + 1) / 2; }
  std::size_t size() const {
    return p_count() + (kind_ == LmiKind::lipschitz ? n_ * p_ + 1 : 3);
  }
  // Indices of entries that must stay >= the margin.
  std::vector<std::size_t> scalars() const {
    const std::size_t b = p_count();
    if (kind_ == LmiKind::lipschitz) return {b + n_ * p_};
    return {b, b + 1, b + 2};
  }

  LmiVariables unpack(const std::vector<double>& z) const {
    LmiVariables v;
    v.P = Matrix(n_, n_);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j, ++k) v.P(i, j) = v.P(j, i) = z[k];
    v.Y = Matrix(n_, p_);
    if (kind_ == LmiKind::lipschitz) {
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < p_; ++j) v.Y(i, j) = z[k++];
      v.eps = z[k];
    } else {
      v.sigma = z[k];
      v.eps1 = z[k + 1];
      v.eps2 = z[k + 2];
    }
    return v;
  }

  std::vector<double> initial() const {
    std::vector<double> z(size(), 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j, ++k) z[k] = i == j ? 1.0 : 0.0;
    for (std::size_t s : scalars()) z[s] = 1.0;
    return z;
  }

 private:
  LmiKind kind_;
  std::size_t n_;
  std::size_t p_;
};

double dot(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

// Projection onto {S : S <= -t I} (sign = -1) or {S : S >= t I} (sign = +1).
Matrix clamp_spectrum(const SymMatrix& m, double t, double sign) {
  const EigenDecomposition d = eig_sym(m);
  const std::size_t n = m.n();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = sign < 0 ? std::min(d.values[k], -t) : std::max(d.values[k], t);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j) += lam * d.vectors(i, k) * d.vectors(j, k);
  }
  return out;
}

double dist2(const Matrix& a, const Matrix& b) {
  const Matrix d = a - b;
  return dot(d, d);
}

LmiSolution run(const LmiProblem& pr, const LmiSolverConfig& cfg, bool throw_on_stall) {
  pr.validate();
  if (!(cfg.relaxation >= 1.0 && cfg.relaxation < 2.0))
    throw DomainError("over-relaxation factor must lie in [1, 2)");
  const double delta = pr.margin();
  const double target = 2.0 * delta;
  const Layout lay(pr);
  const std::size_t nz = lay.size();
  const std::vector<std::size_t> scalar_idx = lay.scalars();

  // Images of the unit vectors; assemble and the P map are linear in z.
  std::vector<Matrix> blocks(nz);
  std::vector<Matrix> pmaps(nz);
  {
    std::vector<double> e(nz, 0.0);
    for (std::size_t k = 0; k < nz; ++k) {
      e[k] = 1.0;
      const LmiVariables v = lay.unpack(e);
      blocks[k] = assemble(pr, v).matrix();
      pmaps[k] = v.P;
      e[k] = 0.0;
    }
  }
  Matrix normal(nz, nz);
  for (std::size_t a = 0; a < nz; ++a) {
    for (std::size_t b = a; b < nz; ++b) {
      double h = dot(blocks[a], blocks[b]) + dot(pmaps[a], pmaps[b]);
      normal(a, b) = normal(b, a) = h;
    }
  }
  for (std::size_t s : scalar_idx) normal(s, s) += 1.0;
  double trace = 0.0;
  for (std::size_t k = 0; k < nz; ++k) trace += normal(k, k);
  for (std::size_t k = 0; k < nz; ++k) normal(k, k) += 1e-12 * trace / static_cast<double>(nz);
  const Cholesky chol(normal);

  LmiSolution sol;
  sol.kind = pr.kind;
  sol.delta = delta;
  std::vector<double> z = lay.initial();
  std::vector<double> rhs(nz);
  for (std::size_t it = 0;; ++it) {
    LmiVariables v = lay.unpack(z);
    const SymMatrix block = assemble(pr, v);
    const Matrix block_target = clamp_spectrum(block, target, -1.0);
    const Matrix p_target = clamp_spectrum(SymMatrix(v.P), target, 1.0);
    double r2 = dist2(block.matrix(), block_target) + dist2(v.P, p_target);
    for (std::size_t s : scalar_idx) r2 += std::pow(std::min(0.0, z[s] - target), 2);
    const double residual = std::sqrt(r2);
    if (!std::isfinite(residual)) throw NumericalBreakdown("LMI iteration produced non-finite values");
    sol.residuals.push_back(residual);

    const Certificate cert = certify(pr, v);
    if (cert.ok || it == cfg.max_iters) {
      sol.vars = std::move(v);
      sol.cert = cert;
      sol.iterations = it;
      break;
    }
    if (it >= cfg.stall_window &&
        residual > cfg.stall_ratio * sol.residuals[it - cfg.stall_window]) {
      sol.vars = std::move(v);
      sol.cert = cert;
      sol.iterations = it;
      break;
    }

    for (std::size_t k = 0; k < nz; ++k) rhs[k] = dot(blocks[k], block_target) + dot(pmaps[k], p_target);
    for (std::size_t s : scalar_idx) rhs[s] += std::max(z[s], target);
    const std::vector<double> proj = chol.solve(rhs);
    for (std::size_t k = 0; k < nz; ++k) z[k] += cfg.relaxation * (proj[k] - z[k]);
  }

  if (!sol.cert.ok) {
    if (throw_on_stall)
      throw Infeasible("no certificate found (residual " + std::to_string(sol.residuals.back()) +
                       " after " + std::to_string(sol.iterations) + " iterations)");
    return sol;
  }
  sol.L = gain(pr, sol.vars);
  return sol;
}

}  // namespace

LmiSolution solve(const LmiProblem& problem, const LmiSolverConfig& cfg) {
  return run(problem, cfg, true);
}

LmiSolution solve_trace(const LmiProblem& problem, const LmiSolverConfig& cfg) {
  return run(problem, cfg, false);
}

}  // namespace nlclass
