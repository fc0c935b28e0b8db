#include "nlclass/model.hpp"

#include <string>

#include "nlclass/errors.hpp"

namespace nlclass {

namespace {

void require_shape(const Matrix& mat, std::size_t rows, std::size_t cols, const char* name) {
  if (mat.rows() != rows || mat.cols() != cols) {
    throw InputError(name, "expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                               ", got " + std::to_string(mat.rows()) + "x" +
                               std::to_string(mat.cols()));
  }
}

}  // namespace

void SystemModel::validate() const {
  if (n == 0) throw InputError("n", "at least one state is required");
  require_shape(A, n, n, "A");
  require_shape(B, n, m, "B");
  require_shape(C, p, n, "C");
  require_shape(G, n, g, "G");
  if (f.size() != g) {
    throw InputError("f", "expected " + std::to_string(g) + " expressions, got " +
                              std::to_string(f.size()));
  }
  for (std::size_t j = 0; j < f.size(); ++j) {
    try {
      check_variables(f[j], n, m);
    } catch (const UnknownVariable& e) {
      throw UnknownVariable("f[" + std::to_string(j) + "]: " + e.what());
    }
  }
  if (omega.size() != n + m) {
    throw InputError("omega", "expected " + std::to_string(n + m) + " intervals, got " +
                                  std::to_string(omega.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(omega[i].lo() < omega[i].hi())) {
      throw InputError("omega[" + std::to_string(i) + "]", "state intervals need a nonempty interior");
    }
  }
}

IntervalBox SystemModel::state_box() const {
  return IntervalBox(std::vector<Interval>(omega.dims().begin(), omega.dims().begin() + n));
}

ExprMatrix jacobian_exprs(const SystemModel& model) {
  std::vector<std::vector<Expr>> partials(model.g);  // partials[k][j] = d f_k / d x_j
  for (std::size_t k = 0; k < model.g; ++k) {
    for (std::size_t j = 0; j < model.n; ++j) partials[k].push_back(diff(model.f[k], j));
  }
  ExprMatrix xi(model.n);
  for (std::size_t i = 0; i < model.n; ++i) {
    for (std::size_t j = 0; j < model.n; ++j) {
      Expr acc = Expr::constant(0.0);
      for (std::size_t k = 0; k < model.g; ++k) {
        if (model.G(i, k) == 0.0) continue;
        acc = Expr::add(acc, Expr::mul(Expr::constant(model.G(i, k)), partials[k][j]));
      }
      xi[i].push_back(normalize(acc));
    }
  }
  return xi;
}

std::vector<Expr> xi_exprs(const SystemModel& model) {
  std::vector<Expr> out;
  for (std::size_t i = 0; i < model.n; ++i) {
    Expr acc = Expr::constant(0.0);
    for (std::size_t j = 0; j < model.g; ++j) {
      if (model.G(i, j) == 0.0) continue;
      acc = Expr::add(acc, Expr::mul(Expr::constant(model.G(i, j)), model.f[j]));
    }
    out.push_back(normalize(acc));
  }
  return out;
}

ExprMatrix symmetric_part(const ExprMatrix& xi) {
  const std::size_t n = xi.size();
  ExprMatrix psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        psi[i].push_back(xi[i][i]);
      } else {
        psi[i].push_back(
            normalize(Expr::mul(Expr::constant(0.5), Expr::add(xi[i][j], xi[j][i]))));
      }
    }
  }
  return psi;
}

Nonlinearity::Nonlinearity(const SystemModel& model) : n_(model.n), m_(model.m), G_(model.G) {
  for (const auto& fj : model.f) tapes_.emplace_back(fj);
}

std::vector<double> Nonlinearity::gf(std::span<const double> x, std::span<const double> u) const {
  std::vector<double> out(n_);
  gf(x, u, out);
  return out;
}

void Nonlinearity::gf(std::span<const double> x, std::span<const double> u,
                      std::span<double> out) const {
  if (x.size() != n_ || u.size() != m_ || out.size() != n_) {
    throw DimensionMismatch("nonlinearity evaluated with wrong vector lengths");
  }
  thread_local std::vector<double> z;
  thread_local std::vector<double> fv;
  z.assign(x.begin(), x.end());
  z.insert(z.end(), u.begin(), u.end());
  fv.resize(tapes_.size());
  for (std::size_t j = 0; j < tapes_.size(); ++j) fv[j] = tapes_[j].eval(z);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < tapes_.size(); ++j) s += G_(i, j) * fv[j];
    out[i] = s;
  }
}

std::vector<Tape> compile(const ExprMatrix& m) {
  std::vector<Tape> out;
  for (const auto& row : m)
    for (const auto& e : row) out.emplace_back(e);
  return out;
}

Matrix jacobian_at(const std::vector<Tape>& xi_tapes, std::size_t n, std::span<const double> z) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = xi_tapes[i * n + j].eval(z);
  return out;
}

}  // namespace nlclass
