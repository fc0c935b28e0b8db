#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nlclass/matfun.hpp"
#include "nlclass/matrix.hpp"

namespace nlclass {

enum class LmiKind { lipschitz, osl_qib };

const char* kind_name(LmiKind k);
LmiKind parse_kind(const std::string& name);

// Observer design inequalities, strict "< 0" replaced by "<= -delta I":
//   lipschitz: [A'P + PA - C'Y' - YC + eps gl^2 I,  P;  P,  -eps I]
//   osl_qib:   [A'P + PA - sigma C'C + (eps1 gs + eps2 q1) I,  *;
//               P + ((q2 eps2 - eps1) / 2) I,  -eps2 I]
// with P >= delta I.
struct LmiProblem {
  LmiKind kind = LmiKind::osl_qib;
  Matrix A;  // n x n
  Matrix C;  // p x n
  double gamma_l = 0.0;
  double gamma_s = 0.0;
  double gamma_q1 = 0.0;
  double gamma_q2 = 0.0;
  double delta = 0.0;  // <= 0 selects the default 1e-4 * max(||A||_F, 1)

  std::size_t n() const { return A.rows(); }
  std::size_t p() const { return C.rows(); }
  // Throws DimensionMismatch or DomainError.
  void validate() const;
  double margin() const;
};

// Decision variables; the fields of the other kind are ignored.
struct LmiVariables {
  Matrix P;
  Matrix Y;  // n x p
  double eps = 0.0;
  double sigma = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
};

// The 2n x 2n block matrix, symmetric by construction.
SymMatrix assemble(const LmiProblem& problem, const LmiVariables& vars);

struct LmiSolverConfig {
  std::size_t max_iters = 20000;
  std::size_t stall_window = 500; // iterations compared for progress
  double stall_ratio = 0.999;     // residual must shrink below ratio * old
  double relaxation = 1.5;        // over-relaxation factor in [1, 2)
};

struct Certificate {
  bool ok = false;
  double lambda_p_min = 0.0;
  double lambda_lmi_max = 0.0;
  bool scalars_positive = false;
};

struct LmiSolution {
  LmiKind kind = LmiKind::osl_qib;
  LmiVariables vars;
  Matrix L;  // n x p
  Certificate cert;
  double delta = 0.0;
  std::size_t iterations = 0;
  std::vector<double> residuals;  // distance to the target cone per iteration
};

// Observer gain from the variables: P^-1 Y, or sigma / 2 P^-1 C'.
Matrix gain(const LmiProblem& problem, const LmiVariables& vars);

// Alternating projections from P = I, scalars = 1, Y = 0, stopping as soon as
// the iterate certifies at delta. Throws Infeasible
// when the residual stalls or the budget runs out ("no certificate found").
LmiSolution solve(const LmiProblem& problem, const LmiSolverConfig& cfg = {});

// As solve, but a stalled run returns its last iterate with cert.ok == false
// instead of throwing.
LmiSolution solve_trace(const LmiProblem& problem, const LmiSolverConfig& cfg = {});

// Recomputes both eigenvalue margins independently.
Certificate certify(const LmiProblem& problem, const LmiVariables& vars);

}  // namespace nlclass
