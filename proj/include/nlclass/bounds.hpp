#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlclass/globopt.hpp"
#include "nlclass/model.hpp"

namespace nlclass {

enum class OslMethod { frobenius, gershgorin, thm3, spectral_sample };

const char* method_name(OslMethod m);
// Accepts frobenius, gershgorin, thm3 and spectral-sample.
OslMethod parse_method(std::string_view name);

// gamma_s with the enclosures it came from. For row-wise methods there is one
// enclosure per row and gamma_s is the largest row upper bound.
struct OslResult {
  double gamma_s = 0.0;
  Interval enclosure;
  std::vector<Enclosure> rows;
};

OslResult osl_frobenius(const SystemModel& model, const BnbConfig& cfg = {});
OslResult osl_gershgorin(const SystemModel& model, const BnbConfig& cfg = {});
OslResult osl_thm3(const SystemModel& model, const BnbConfig& cfg = {});

// Extreme eigenvalues of the symmetric part of Xi over a deterministic sample
// of omega. Not certified.
struct SpectralSample {
  double gamma_bar = 0.0;
  double gamma_lower = 0.0;
  std::size_t points = 0;
};

SpectralSample osl_spectral_bounds(const SystemModel& model, std::size_t sample_budget,
                                   int threads = 0);
SpectralSample osl_spectral_bounds_serial(const SystemModel& model, std::size_t sample_budget);

// Certified lower bound on min lambda_min of the symmetric part:
// min_i min_omega (Psi(i,i) - sum_{j != i} |Psi(i,j)|). gamma_lower is the
// smallest row lower bound.
struct LowerResult {
  double gamma_lower = 0.0;
  Interval enclosure;
  std::vector<Enclosure> rows;
};

LowerResult gamma_lower_gershgorin(const SystemModel& model, const BnbConfig& cfg = {});

// max_omega sum_i ||grad_x xi_i||^2, which is the squared Frobenius norm of Xi.
Enclosure gamma_m_enclosure(const SystemModel& model, const BnbConfig& cfg = {});

struct QibPair {
  double gamma_q1 = 0.0;
  double gamma_q2 = 0.0;
};

// 2 q1 + q2^2 >= 0 holds for every genuine quadratically inner-bounded map.
bool qib_necessity(double gamma_q1, double gamma_q2);

// q1 = eps1 * gamma_bar - eps2 * gamma_lower + gamma_m, q2 = eps2 - eps1.
// Throws NegativeEpsilon, or NecessityViolated if the pair fails the check.
QibPair qib_from_constants(double eps1, double eps2, double gamma_bar, double gamma_lower,
                           double gamma_m);

struct QibResult {
  QibPair pair;
  double gamma_bar = 0.0;    // certified upper bound on max lambda_max
  double gamma_lower = 0.0;  // certified lower bound on min lambda_min
  double gamma_m = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  OslResult bar;
  LowerResult lower;
  Enclosure m;
};

// gamma_bar and gamma_lower are scaled by eps1 and eps2, so their searches run
// at cfg.tol / max(1, eps) to keep q1 within cfg.tol per term.
QibResult qib_constants(const SystemModel& model, double eps1, double eps2,
                        const BnbConfig& cfg = {});

// sqrt of the gamma_m upper bound.
double lipschitz_constant(const SystemModel& model, const BnbConfig& cfg = {});

// sqrt(2 q1 + q2^2); throws NecessityViolated when the radicand is negative.
double qib_to_lipschitz(double gamma_q1, double gamma_q2);

// 2 r^2 <= -q2 / 2, r^4 <= q1 - q2 r^2, q1 >= 0 and q2 < 0.
bool qib_sufficient_ball(double r, double gamma_q1, double gamma_q2);

struct PointPair {
  std::vector<double> x;
  std::vector<double> xhat;
  std::vector<double> u;
};

struct Audit {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

// Evaluates the class inequalities for d = G (f(x, u) - f(xhat, u)) and
// e = x - xhat:
//   osl:       <d, e>  <= gamma_s |e|^2
//   qib:       |d|^2   <= q1 |e|^2 + q2 <d, e>
//   lipschitz: |d|     <= gamma_l |e|
// Both points must lie in omega.
class Auditor {
 public:
  explicit Auditor(const SystemModel& model);

  Audit osl(double gamma_s, const PointPair& pair) const;
  Audit qib(double gamma_q1, double gamma_q2, const PointPair& pair) const;
  Audit lipschitz(double gamma_l, const PointPair& pair) const;

 private:
  struct Diff {
    double dd;  // |d|^2
    double de;  // <d, e>
    double ee;  // |e|^2
  };
  Diff difference(const PointPair& pair) const;

  SystemModel model_;
  Nonlinearity nl_;
};

Audit osl_audit(const SystemModel& model, double gamma_s, const PointPair& pair);
Audit qib_audit(const SystemModel& model, double gamma_q1, double gamma_q2, const PointPair& pair);

struct ReportOptions {
  OslMethod method = OslMethod::gershgorin;
  bool all_methods = false;  // compute every certified method and keep the smallest gamma_s
  double eps1 = 1e5;
  double eps2 = 1e-1;
  BnbConfig cfg;
  std::size_t sample_budget = 100000;
};

struct NamedInterval {
  std::string name;
  Interval value;
};

struct GammaReport {
  double gamma_l = 0.0;
  double gamma_s = 0.0;
  double gamma_bar = 0.0;
  double gamma_lower = 0.0;
  double gamma_m = 0.0;
  double gamma_q1 = 0.0;
  double gamma_q2 = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  OslMethod method = OslMethod::gershgorin;
  bool necessity_ok = true;
  bool converged = true;  // every search met its tolerance
  std::vector<NamedInterval> enclosures;
  std::vector<std::pair<std::string, double>> method_values;  // gamma_s per method
  double gamma_bar_sampled = 0.0;
  double gamma_lower_sampled = 0.0;
};

GammaReport compute_report(const SystemModel& model, const ReportOptions& opts);

}  // namespace nlclass
