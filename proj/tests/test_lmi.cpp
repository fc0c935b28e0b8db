#include <doctest.h>

#include <random>

#include "nlclass/bounds.hpp"
#include "nlclass/errors.hpp"
#include "nlclass/lmi.hpp"
#include "support.hpp"

using namespace nlclass;
using testing::uniform;

namespace {

LmiProblem lipschitz_problem(Matrix A, Matrix C, double gl, double delta) {
  LmiProblem p;
  p.kind = LmiKind::lipschitz;
  p.A = std::move(A);
  p.C = std::move(C);
  p.gamma_l = gl;
  p.delta = delta;
  return p;
}

LmiVariables unit_vars(std::size_t n, std::size_t p) {
  LmiVariables v;
  v.P = Matrix::identity(n);
  v.Y = Matrix(n, p);
  v.eps = v.sigma = v.eps1 = v.eps2 = 1.0;
  return v;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace

TEST_CASE("assembled blocks") {
  LmiProblem q;
  q.kind = LmiKind::osl_qib;
  q.A = Matrix(2, 2);
  q.C = Matrix::identity(2);
  const Matrix want{{-1, 0, .5, 0}, {0, -1, 0, .5}, {.5, 0, -1, 0}, {0, .5, 0, -1}};
  CHECK(assemble(q, unit_vars(2, 2)).matrix() == want);

  const LmiProblem z = lipschitz_problem(Matrix(2, 2), Matrix(1, 2), 0.0, 0.1);
  const SymMatrix b = assemble(z, unit_vars(2, 1));
  CHECK(b.matrix() == Matrix{{0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, -1, 0}, {0, 1, 0, -1}});
  CHECK_FALSE(certify(z, unit_vars(2, 1)).ok);

  LmiProblem r;
  r.kind = LmiKind::osl_qib;
  r.A = Matrix{{1, 2, 0}, {-1, 0, 3}, {0.5, 0, -2}};
  r.C = Matrix{{1, 0, 1}};
  r.gamma_s = 0.3;
  r.gamma_q1 = 4;
  r.gamma_q2 = -2;
  LmiVariables v = unit_vars(3, 1);
  v.P = Matrix{{2, 0.1, 0}, {0.1, 1, -0.3}, {0, -0.3, 3}};
  v.sigma = 0.7;
  const Matrix m = assemble(r, v).matrix();
  CHECK(m == m.transpose());
  CHECK_THROWS_AS(assemble(r, unit_vars(2, 1)), DimensionMismatch);
  CHECK_THROWS_AS(assemble(lipschitz_problem(r.A, r.C, 1, 0), unit_vars(3, 2)), DimensionMismatch);
}

TEST_CASE("hand solution certifies") {
  const LmiProblem p = lipschitz_problem(-1.0 * Matrix::identity(2), Matrix::identity(2), 0.0, 0.1);
  const Certificate c = certify(p, unit_vars(2, 2));
  CHECK(c.ok);
  CHECK(c.lambda_lmi_max == doctest::Approx((-3 + std::sqrt(5.0)) / 2).epsilon(1e-12));
  CHECK(c.lambda_p_min == doctest::Approx(1.0));
  LmiVariables tight = unit_vars(2, 2);
  tight.P = 0.15 * Matrix::identity(2);
  CHECK(certify(p, tight).ok);
  tight.P = tight.P - 2 * 0.1 * Matrix::identity(2);
  CHECK_FALSE(certify(p, tight).ok);
  LmiVariables zero_eps = unit_vars(2, 2);
  zero_eps.eps = 0.0;
  CHECK_FALSE(certify(p, zero_eps).ok);
}

TEST_CASE("solver on easy and hopeless instances") {
  const LmiProblem easy = lipschitz_problem(-1.0 * Matrix::identity(2), Matrix::identity(2), 0.0, 0.1);
  const LmiSolution s = solve(easy);
  CHECK(s.cert.ok);
  CHECK(certify(easy, s.vars).ok);
  CHECK(s.iterations == 0);  // the starting point already certifies
  CHECK(s.L == Matrix(2, 2));

  const LmiProblem hopeless = lipschitz_problem(Matrix{{-1, 0}, {0, -2}}, Matrix{{1, 0}}, 1e9, 0.0);
  CHECK_THROWS_AS(solve(hopeless), Infeasible);
  const LmiSolution t = solve_trace(hopeless);
  CHECK_FALSE(t.cert.ok);
  CHECK(t.iterations > 0);

  LmiProblem bad = easy;
  bad.C = Matrix(1, 3);
  CHECK_THROWS_AS(solve(bad), DimensionMismatch);
  bad = easy;
  bad.gamma_l = -1;
  CHECK_THROWS_AS(solve(bad), DomainError);
  LmiSolverConfig cfg;
  cfg.relaxation = 2.0;
  CHECK_THROWS_AS(solve(easy, cfg), DomainError);
  CHECK_THROWS_AS(parse_kind("sdp"), InputError);
  CHECK(parse_kind("osl_qib") == LmiKind::osl_qib);
}

TEST_CASE("unstable plant needs output injection") {
  // A has an unstable mode observed through C; the gain must stabilize it.
  const LmiProblem p = lipschitz_problem(Matrix{{0.5, 1}, {0, -1}}, Matrix{{1, 0}}, 0.1, 0.0);
  const LmiSolution s = solve(p);
  CHECK(s.cert.ok);
  const Matrix closed = p.A - s.L * p.C;
  // 2x2 Hurwitz test: negative trace, positive determinant
  CHECK(closed(0, 0) + closed(1, 1) < 0);
  CHECK(closed(0, 0) * closed(1, 1) - closed(0, 1) * closed(1, 0) > 0);
}

TEST_CASE("random stable instances are self-consistent") {
  std::mt19937_64 rng(41);
  int solved = 0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 2 + rng() % 3;
    const std::size_t p = 1 + rng() % n;
    Matrix A(n, n), C(p, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) A(i, j) = uniform(rng, -0.5, 0.5);
      A(i, i) -= 2.0;
    }
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < n; ++j) C(i, j) = uniform(rng, -1, 1);
    // constants of f = gl * sin(x): Lipschitz gl, OSL gl, QIB (gl^2, 0)
    const SystemModel m = testing::model_from(n, std::vector<std::string>(1, "0.3*sin(x1)"), 1.0);
    const double gl = lipschitz_constant(m);
    LmiProblem prob = lipschitz_problem(A, C, gl, 0.0);
    if (k % 2) {
      prob.kind = LmiKind::osl_qib;
      prob.gamma_s = osl_gershgorin(m).gamma_s;
      prob.gamma_q1 = gl * gl;
      prob.gamma_q2 = 0.0;
    }
    try {
      const LmiSolution s = solve(prob);
      ++solved;
      const Certificate c = certify(prob, s.vars);
      CHECK(c.ok);
      CHECK(c.lambda_p_min >= s.delta);
      CHECK(c.lambda_lmi_max <= -s.delta);
      CHECK(max_abs_diff(s.L, gain(prob, s.vars)) <= 1e-10);
      const Matrix PL = s.vars.P * s.L;
      const Matrix want = prob.kind == LmiKind::lipschitz ? s.vars.Y : (0.5 * s.vars.sigma) * C.transpose();
      CHECK(max_abs_diff(PL, want) <= 1e-10 * std::max(1.0, want.frobenius()));
    } catch (const Infeasible&) {
    }
  }
  CHECK(solved >= 40);
}

TEST_CASE("residuals on the bundled example decrease up to relaxation overshoot") {
  const SystemModel m = testing::moving_object();
  LmiProblem prob;
  prob.kind = LmiKind::osl_qib;
  prob.A = m.A;
  prob.C = m.C;
  prob.gamma_s = 0.0;
  prob.gamma_q1 = 25015.0;
  prob.gamma_q2 = -99999.9;
  const LmiSolution s = solve_trace(prob);
  REQUIRE(s.residuals.size() > 2);
  std::size_t worse = 0;
  for (std::size_t k = 1; k < s.residuals.size(); ++k)
    worse += s.residuals[k] > 1.05 * s.residuals[k - 1];
  CHECK(worse == 0);
  CHECK(s.residuals.back() <= s.residuals.front());
}
