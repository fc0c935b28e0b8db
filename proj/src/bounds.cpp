#include "nlclass/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlclass/errors.hpp"
#include "nlclass/matfun.hpp"
#include "nlclass/omp.hpp"
#include "nlclass/sampling.hpp"

namespace nlclass {

const char* method_name(OslMethod m) {
  switch (m) {
    case OslMethod::frobenius: return "frobenius";
    case OslMethod::gershgorin: return "gershgorin";
    case OslMethod::thm3: return "thm3";
    case OslMethod::spectral_sample: return "spectral-sample";
  }
  return "?";
}

OslMethod parse_method(std::string_view name) {
  if (name == "frobenius") return OslMethod::frobenius;
  if (name == "gershgorin") return OslMethod::gershgorin;
  if (name == "thm3") return OslMethod::thm3;
  if (name == "spectral-sample") return OslMethod::spectral_sample;
  throw InputError("method", "unknown method '" + std::string(name) + "'");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Expr sum_of_squares(const ExprMatrix& m) {
  Expr acc = Expr::constant(0.0);
  for (const auto& row : m)
    for (const auto& e : row)
      if (!(e.is_constant() && e.value() == 0.0)) acc = Expr::add(acc, Expr::pow(e, 2));
  return simplify(acc);
}

// Psi(i,i) + sign * sum_{j != i} |Psi(i,j)|
Expr gershgorin_row(const ExprMatrix& psi, std::size_t i, double sign) {
  Expr off = Expr::constant(0.0);
  for (std::size_t j = 0; j < psi.size(); ++j)
    if (j != i) off = Expr::add(off, Expr::call(Func::abs, psi[i][j]));
  return simplify(sign > 0 ? Expr::add(psi[i][i], off) : Expr::sub(psi[i][i], off));
}

struct RowRuns {
  std::vector<Enclosure> rows;
  Interval hull_max;  // [max lb, max ub]
  Interval hull_min;  // [min lb, min ub]
};

RowRuns run_rows(const std::vector<Objective>& objs, const IntervalBox& omega, const BnbConfig& cfg,
                 bool maximizing) {
  RowRuns out;
  double lo_max = -kInf, hi_max = -kInf, lo_min = kInf, hi_min = kInf;
  for (const auto& o : objs) {
    Enclosure e = maximizing ? maximize(o, omega, cfg) : minimize(o, omega, cfg);
    lo_max = std::max(lo_max, e.lb);
    hi_max = std::max(hi_max, e.ub);
    lo_min = std::min(lo_min, e.lb);
    hi_min = std::min(hi_min, e.ub);
    out.rows.push_back(std::move(e));
  }
  out.hull_max = Interval(lo_max, hi_max);
  out.hull_min = Interval(lo_min, hi_min);
  return out;
}

void require_states(const SystemModel& model) {
  if (model.n == 0) throw DimensionMismatch("model has no states");
}

}  // namespace

OslResult osl_frobenius(const SystemModel& model, const BnbConfig& cfg) {
  require_states(model);
  Enclosure e = gamma_m_enclosure(model, cfg);
  OslResult r;
  r.enclosure = Interval(std::sqrt(std::max(e.lb, 0.0)), std::sqrt(std::max(e.ub, 0.0)));
  r.gamma_s = r.enclosure.hi();
  r.rows.push_back(std::move(e));
  return r;
}

OslResult osl_gershgorin(const SystemModel& model, const BnbConfig& cfg) {
  require_states(model);
  const ExprMatrix psi = symmetric_part(jacobian_exprs(model));
  std::vector<Objective> objs;
  for (std::size_t i = 0; i < model.n; ++i) objs.push_back(Objective::from_expr(gershgorin_row(psi, i, 1.0)));
  RowRuns runs = run_rows(objs, model.omega, cfg, true);
  return OslResult{runs.hull_max.hi(), runs.hull_max, std::move(runs.rows)};
}

OslResult osl_thm3(const SystemModel& model, const BnbConfig& cfg) {
  require_states(model);
  const ExprMatrix psi = symmetric_part(jacobian_exprs(model));
  const std::size_t n = model.n;
  std::vector<Objective> objs;
  for (std::size_t i = 0; i < n; ++i) {
    Objective diag = Objective::from_expr(psi[i][i]);
    if (n == 1) {
      objs.push_back(diag);
      continue;
    }
    std::vector<Objective> offs;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) offs.push_back(Objective::from_expr(Expr::call(Func::abs, psi[i][j])));
    objs.push_back(Objective::sum(diag, zeta_n(n), Objective::max_of(std::move(offs))));
  }
  RowRuns runs = run_rows(objs, model.omega, cfg, true);
  return OslResult{runs.hull_max.hi(), runs.hull_max, std::move(runs.rows)};
}

namespace {

struct Extremes {
  double hi = -kInf;
  double lo = kInf;
};

Extremes spectral_at(const std::vector<Tape>& tapes, std::size_t n, std::span<const double> z) {
  const EigenDecomposition d = eig_sym(SymMatrix(jacobian_at(tapes, n, z)));
  return Extremes{d.values.back(), d.values.front()};
}

}  // namespace

SpectralSample osl_spectral_bounds_serial(const SystemModel& model, std::size_t sample_budget) {
  require_states(model);
  if (sample_budget < 1) throw DomainError("sample budget must be at least 1");
  const auto tapes = compile(jacobian_exprs(model));
  const auto pts = design_points(model.omega, sample_budget);
  Extremes acc;
  for (const auto& z : pts) {
    const Extremes e = spectral_at(tapes, model.n, z);
    acc.hi = std::max(acc.hi, e.hi);
    acc.lo = std::min(acc.lo, e.lo);
  }
  return SpectralSample{acc.hi, acc.lo, pts.size()};
}

SpectralSample osl_spectral_bounds(const SystemModel& model, std::size_t sample_budget, int threads) {
  require_states(model);
  if (sample_budget < 1) throw DomainError("sample budget must be at least 1");
  const auto tapes = compile(jacobian_exprs(model));
  const auto pts = design_points(model.omega, sample_budget);
  const int nt = resolve_threads(threads);
  std::vector<Extremes> partial(static_cast<std::size_t>(nt));
  const auto count = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel num_threads(nt)
  {
    Extremes& mine = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const Extremes e = spectral_at(tapes, model.n, pts[static_cast<std::size_t>(k)]);
      mine.hi = std::max(mine.hi, e.hi);
      mine.lo = std::min(mine.lo, e.lo);
    }
  }
  Extremes acc;
  for (const auto& p : partial) {
    acc.hi = std::max(acc.hi, p.hi);
    acc.lo = std::min(acc.lo, p.lo);
  }
  return SpectralSample{acc.hi, acc.lo, pts.size()};
}

LowerResult gamma_lower_gershgorin(const SystemModel& model, const BnbConfig& cfg) {
  require_states(model);
  const ExprMatrix psi = symmetric_part(jacobian_exprs(model));
  std::vector<Objective> objs;
  for (std::size_t i = 0; i < model.n; ++i) objs.push_back(Objective::from_expr(gershgorin_row(psi, i, -1.0)));
  RowRuns runs = run_rows(objs, model.omega, cfg, false);
  return LowerResult{runs.hull_min.lo(), runs.hull_min, std::move(runs.rows)};
}

Enclosure gamma_m_enclosure(const SystemModel& model, const BnbConfig& cfg) {
  require_states(model);
  return maximize(Objective::from_expr(sum_of_squares(jacobian_exprs(model))), model.omega, cfg);
}

bool qib_necessity(double gamma_q1, double gamma_q2) {
  return 2.0 * gamma_q1 + gamma_q2 * gamma_q2 >= 0.0;
}

QibPair qib_from_constants(double eps1, double eps2, double gamma_bar, double gamma_lower,
                           double gamma_m) {
  if (eps1 < 0.0 || eps2 < 0.0 || std::isnan(eps1) || std::isnan(eps2))
    throw NegativeEpsilon("eps1 and eps2 must be nonnegative");
  QibPair q{eps1 * gamma_bar - eps2 * gamma_lower + gamma_m, eps2 - eps1};
  if (!qib_necessity(q.gamma_q1, q.gamma_q2))
    throw NecessityViolated("2*gamma_q1 + gamma_q2^2 < 0");
  return q;
}

QibResult qib_constants(const SystemModel& model, double eps1, double eps2, const BnbConfig& cfg) {
  if (eps1 < 0.0 || eps2 < 0.0 || std::isnan(eps1) || std::isnan(eps2))
    throw NegativeEpsilon("eps1 and eps2 must be nonnegative");
  QibResult r;
  r.eps1 = eps1;
  r.eps2 = eps2;
  BnbConfig bar_cfg = cfg;
  bar_cfg.tol = cfg.tol / std::max(1.0, eps1);
  BnbConfig lower_cfg = cfg;
  lower_cfg.tol = cfg.tol / std::max(1.0, eps2);
  r.bar = osl_gershgorin(model, bar_cfg);
  r.lower = gamma_lower_gershgorin(model, lower_cfg);
  r.m = gamma_m_enclosure(model, cfg);
  r.gamma_bar = r.bar.gamma_s;
  r.gamma_lower = r.lower.gamma_lower;
  r.gamma_m = r.m.ub;
  r.pair = qib_from_constants(eps1, eps2, r.gamma_bar, r.gamma_lower, r.gamma_m);
  return r;
}

double lipschitz_constant(const SystemModel& model, const BnbConfig& cfg) {
  return std::sqrt(std::max(0.0, gamma_m_enclosure(model, cfg).ub));
}

double qib_to_lipschitz(double gamma_q1, double gamma_q2) {
  if (!qib_necessity(gamma_q1, gamma_q2))
    throw NecessityViolated("2*gamma_q1 + gamma_q2^2 < 0: no quadratically inner-bounded map has these constants");
  return std::sqrt(2.0 * gamma_q1 + gamma_q2 * gamma_q2);
}

bool qib_sufficient_ball(double r, double gamma_q1, double gamma_q2) {
  if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  const double r2 = r * r;
  return 2.0 * r2 <= -gamma_q2 / 2.0 && r2 * r2 <= gamma_q1 - gamma_q2 * r2 && gamma_q1 >= 0.0 &&
         gamma_q2 < 0.0;
}

Auditor::Auditor(const SystemModel& model) : model_(model), nl_(model) {}

Auditor::Diff Auditor::difference(const PointPair& pair) const {
  const std::size_t n = model_.n;
  const std::size_t m = model_.m;
  if (pair.x.size() != n || pair.xhat.size() != n || pair.u.size() != m)
    throw DimensionMismatch("audit pair has the wrong dimensions");
  std::vector<double> z(n + m);
  std::copy(pair.u.begin(), pair.u.end(), z.begin() + static_cast<std::ptrdiff_t>(n));
  std::copy(pair.x.begin(), pair.x.end(), z.begin());
  if (!model_.omega.contains(z)) throw DomainError("audit point x lies outside omega");
  std::copy(pair.xhat.begin(), pair.xhat.end(), z.begin());
  if (!model_.omega.contains(z)) throw DomainError("audit point xhat lies outside omega");

  const std::vector<double> a = nl_.gf(pair.x, pair.u);
  const std::vector<double> b = nl_.gf(pair.xhat, pair.u);
  Diff d{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double di = a[i] - b[i];
    const double ei = pair.x[i] - pair.xhat[i];
    d.dd += di * di;
    d.de += di * ei;
    d.ee += ei * ei;
  }
  return d;
}

Audit Auditor::osl(double gamma_s, const PointPair& pair) const {
  const Diff d = difference(pair);
  const double rhs = gamma_s * d.ee;
  return Audit{d.de, rhs, d.de <= rhs};
}

Audit Auditor::qib(double gamma_q1, double gamma_q2, const PointPair& pair) const {
  const Diff d = difference(pair);
  const double rhs = gamma_q1 * d.ee + gamma_q2 * d.de;
  return Audit{d.dd, rhs, d.dd <= rhs};
}

Audit Auditor::lipschitz(double gamma_l, const PointPair& pair) const {
  const Diff d = difference(pair);
  const double lhs = std::sqrt(d.dd);
  const double rhs = gamma_l * std::sqrt(d.ee);
  return Audit{lhs, rhs, lhs <= rhs};
}

Audit osl_audit(const SystemModel& model, double gamma_s, const PointPair& pair) {
  return Auditor(model).osl(gamma_s, pair);
}

Audit qib_audit(const SystemModel& model, double gamma_q1, double gamma_q2, const PointPair& pair) {
  return Auditor(model).qib(gamma_q1, gamma_q2, pair);
}

GammaReport compute_report(const SystemModel& model, const ReportOptions& opts) {
  model.validate();
  GammaReport rep;
  rep.eps1 = opts.eps1;
  rep.eps2 = opts.eps2;

  const QibResult q = qib_constants(model, opts.eps1, opts.eps2, opts.cfg);
  const SpectralSample sampled = osl_spectral_bounds(model, opts.sample_budget, opts.cfg.threads);
  rep.gamma_bar_sampled = sampled.gamma_bar;
  rep.gamma_lower_sampled = sampled.gamma_lower;

  auto converged = [](const std::vector<Enclosure>& rows) {
    return std::all_of(rows.begin(), rows.end(), [](const Enclosure& e) { return e.converged; });
  };
  rep.converged = converged(q.bar.rows) && converged(q.lower.rows) && q.m.converged;

  std::vector<std::pair<OslMethod, OslResult>> runs;
  auto run = [&](OslMethod m) {
    switch (m) {
      case OslMethod::frobenius: {
        OslResult r;
        r.enclosure = Interval(std::sqrt(std::max(q.m.lb, 0.0)), std::sqrt(std::max(q.m.ub, 0.0)));
        r.gamma_s = r.enclosure.hi();
        r.rows.push_back(q.m);
        return r;
      }
      case OslMethod::gershgorin: return q.bar;
      case OslMethod::thm3: return osl_thm3(model, opts.cfg);
      case OslMethod::spectral_sample: {
        OslResult r;
        r.gamma_s = sampled.gamma_bar;
        r.enclosure = Interval(sampled.gamma_bar);
        return r;
      }
    }
    return OslResult{};
  };
  if (opts.all_methods) {
    for (OslMethod m : {OslMethod::frobenius, OslMethod::gershgorin, OslMethod::thm3}) runs.emplace_back(m, run(m));
  } else {
    runs.emplace_back(opts.method, run(opts.method));
  }
  const auto best = std::min_element(runs.begin(), runs.end(), [](const auto& a, const auto& b) {
    return a.second.gamma_s < b.second.gamma_s;
  });
  for (const auto& [m, r] : runs) {
    rep.method_values.emplace_back(method_name(m), r.gamma_s);
    if (m != OslMethod::spectral_sample) rep.converged = rep.converged && converged(r.rows);
  }
  rep.method = best->first;
  rep.gamma_s = best->second.gamma_s;

  rep.gamma_bar = q.gamma_bar;
  rep.gamma_lower = q.gamma_lower;
  rep.gamma_m = q.gamma_m;
  rep.gamma_q1 = q.pair.gamma_q1;
  rep.gamma_q2 = q.pair.gamma_q2;
  rep.gamma_l = std::sqrt(std::max(0.0, q.gamma_m));
  rep.necessity_ok = qib_necessity(rep.gamma_q1, rep.gamma_q2);

  rep.enclosures.push_back({"gamma_s", best->second.enclosure});
  rep.enclosures.push_back({"gamma_bar", q.bar.enclosure});
  rep.enclosures.push_back({"gamma_lower", q.lower.enclosure});
  rep.enclosures.push_back({"gamma_m", Interval(q.m.lb, q.m.ub)});
  return rep;
}

}  // namespace nlclass
