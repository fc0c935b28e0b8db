#include "nlclass/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "nlclass/bounds.hpp"
#include "nlclass/errors.hpp"
#include "nlclass/io.hpp"
#include "nlclass/lmi.hpp"
#include "nlclass/sampling.hpp"
#include "nlclass/sim.hpp"

namespace nlclass {

namespace {

std::string fmt(double v) { return format_double(v); }

std::string vec_string(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

std::string xi_string(const ExprMatrix& xi) {
  std::string s = "[";
  for (std::size_t i = 0; i < xi.size(); ++i) {
    s += i ? ", [" : "[";
    for (std::size_t j = 0; j < xi[i].size(); ++j) s += (j ? ", " : "") + render(xi[i][j]);
    s += "]";
  }
  return s + "]";
}

std::vector<double> parse_vector(const std::string& text, std::size_t n, const std::string& field) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || !std::isfinite(x)) throw InputError(field, "expected comma-separated numbers");
    while (*end == ' ') ++end;
    if (*end != '\0') throw InputError(field, "expected comma-separated numbers");
    v.push_back(x);
  }
  if (v.size() != n) throw InputError(field, "expected " + std::to_string(n) + " values");
  return v;
}

std::ofstream open_out(const std::string& path, const std::string& field) {
  std::ofstream f(path);
  if (!f) throw InputError(field, "cannot write '" + path + "'");
  return f;
}

// ---------------------------------------------------------------------------

int cmd_check(const std::string& path, std::ostream& out) {
  const SystemModel m = load_system(path);
  out << "n = " << m.n << "\nm = " << m.m << "\np = " << m.p << "\ng = " << m.g << "\n";
  out << "A = " << format_matrix(m.A) << "\n";
  out << "B = " << format_matrix(m.B) << "\n";
  out << "C = " << format_matrix(m.C) << "\n";
  out << "G = " << format_matrix(m.G) << "\n";
  for (std::size_t j = 0; j < m.g; ++j) out << "f" << j + 1 << " = " << render(m.f[j]) << "\n";
  const ExprMatrix xi = jacobian_exprs(m);
  out << "Xi = " << xi_string(xi) << "\n";
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j)
      out << "Xi(" << i + 1 << "," << j + 1 << ") = " << render(xi[i][j]) << "\n";
  out << "omega =";
  for (std::size_t i = 0; i < m.omega.size(); ++i) {
    const std::string name = i < m.n ? "x" + std::to_string(i + 1) : "u" + std::to_string(i - m.n + 1);
    out << (i ? ", " : " ") << name << " in " << to_string(m.omega[i]);
  }
  out << "\n";
  return exit_ok;
}

struct BoundsArgs {
  std::string system;
  std::string method = "gershgorin";
  double eps1 = 1e5;
  double eps2 = 1e-1;
  double tol = 1e-6;
  std::size_t budget = 100000;
  std::size_t max_boxes = 1000000;
  double max_seconds = 60.0;
  int threads = 0;
  std::string out;
  double expect_q2 = 0.0;
  bool has_expect_q2 = false;
};

int cmd_bounds(const BoundsArgs& a, std::ostream& out, std::ostream& err) {
  const SystemModel m = load_system(a.system);
  ReportOptions o;
  if (a.method == "all") {
    o.all_methods = true;
  } else {
    o.method = parse_method(a.method);
  }
  if (a.eps1 < 0.0 || a.eps2 < 0.0) throw NegativeEpsilon("eps1 and eps2 must be nonnegative");
  if (!(a.tol > 0.0)) throw InputError("tol", "must be positive");
  if (a.budget < 1) throw InputError("budget", "must be at least 1");
  o.eps1 = a.eps1;
  o.eps2 = a.eps2;
  o.cfg.tol = a.tol;
  o.cfg.max_boxes = a.max_boxes;
  o.cfg.max_seconds = a.max_seconds;
  o.cfg.threads = a.threads;
  o.sample_budget = a.budget;
  const GammaReport rep = compute_report(m, o);

  ReportContext ctx{a.system, a.tol, a.max_boxes, a.max_seconds, a.budget, a.method, a.has_expect_q2, a.expect_q2};
  if (a.out.empty()) {
    write_report(out, rep, ctx);
  } else {
    auto f = open_out(a.out, "out");
    write_report(f, rep, ctx);
    char line[128];
    auto row = [&](const char* name, double v) {
      std::snprintf(line, sizeof line, "%-20s %s\n", name, fmt(v).c_str());
      out << line;
    };
    row("gamma_s", rep.gamma_s);
    row("gamma_bar", rep.gamma_bar);
    row("gamma_lower", rep.gamma_lower);
    row("gamma_m", rep.gamma_m);
    row("gamma_l", rep.gamma_l);
    row("gamma_q1", rep.gamma_q1);
    row("gamma_q2", rep.gamma_q2);
    out << "method               " << method_name(rep.method) << "\n";
    out << "qib_necessity        " << (rep.necessity_ok ? "ok" : "violated") << "\n";
  }
  if (!rep.converged) err << "warning: a search stopped on its budget; constants use the conservative bound\n";
  if (a.has_expect_q2 && !q2_consistent(a.expect_q2, rep.eps1, rep.eps2))
    err << "note: gamma_q2 = " << fmt(a.expect_q2) << " is inconsistent with eps2 - eps1 = "
        << fmt(rep.gamma_q2) << "\n";
  return exit_ok;
}

struct DesignArgs {
  std::string system;
  std::string kind = "osl_qib";
  std::string report;
  double delta = 0.0;
  std::size_t max_iters = 20000;
  std::string out;
};

int cmd_design(const DesignArgs& a, std::ostream& out, std::ostream& err) {
  const SystemModel m = load_system(a.system);
  const KeyValues kv = load_key_values(a.report);
  LmiProblem pr;
  pr.kind = parse_kind(a.kind);
  pr.A = m.A;
  pr.C = m.C;
  pr.delta = a.delta;
  if (pr.kind == LmiKind::lipschitz) {
    pr.gamma_l = get_number(kv, "gamma_l");
  } else {
    pr.gamma_s = get_number(kv, "gamma_s");
    pr.gamma_q1 = get_number(kv, "gamma_q1");
    pr.gamma_q2 = get_number(kv, "gamma_q2");
  }
  LmiSolverConfig cfg;
  cfg.max_iters = a.max_iters;
  LmiSolution sol;
  try {
    sol = solve(pr, cfg);
  } catch (const Infeasible& e) {
    err << e.what() << "\n";
    return exit_no_certificate;
  }
  const Certificate c = certify(pr, sol.vars);
  sol.cert = c;
  if (a.out.empty()) {
    write_gain(out, pr, sol);
  } else {
    auto f = open_out(a.out, "out");
    write_gain(f, pr, sol);
    out << "L = " << format_matrix(sol.L) << "\n";
    out << "lambda_lmi_max = " << fmt(c.lambda_lmi_max) << "\n";
    out << "lambda_p_min = " << fmt(c.lambda_p_min) << "\n";
    out << "ok = " << (c.ok ? "true" : "false") << "\n";
  }
  return c.ok ? exit_ok : exit_numerical;
}

struct SimulateArgs {
  std::string system;
  std::string gain;
  double t_end = 10.0;
  double dt = 1e-3;
  std::string x0;
  std::string xhat0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const SystemModel m = load_system(a.system);
  const Matrix L = read_gain(load_key_values(a.gain), m.n, m.p);
  SimConfig cfg;
  cfg.t_end = a.t_end;
  cfg.dt = a.dt;
  if (!(cfg.dt > 0.0)) throw InputError("dt", "must be positive");
  if (!(cfg.t_end >= cfg.dt)) throw InputError("t-end", "must be at least dt");
  if (a.x0.empty()) {
    cfg.x0.resize(m.n);
    for (std::size_t i = 0; i < m.n; ++i) cfg.x0[i] = i % 2 ? -1.0 : 1.0;
  } else {
    cfg.x0 = parse_vector(a.x0, m.n, "x0");
  }
  cfg.xhat0 = a.xhat0.empty() ? std::vector<double>(m.n, 0.0) : parse_vector(a.xhat0, m.n, "xhat0");
  const Trajectory tr = run(m, L, cfg);
  if (a.out.empty()) {
    write_csv(out, tr);
  } else {
    auto f = open_out(a.out, "out");
    write_csv(f, tr);
    out << "samples = " << tr.size() << "\n";
    out << "final_err = " << fmt(tr.errors.back()) << "\n";
  }
  return exit_ok;
}

struct VerifyArgs {
  std::string system;
  std::string report;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::optional<double> gamma_s;
  std::optional<double> gamma_q1;
  std::optional<double> gamma_q2;
};

bool violated(const Audit& a) {
  return a.lhs - a.rhs > 1e-9 * (1.0 + std::fabs(a.lhs) + std::fabs(a.rhs));
}

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const SystemModel m = load_system(a.system);
  const KeyValues kv = load_key_values(a.report);
  const double gs = a.gamma_s ? *a.gamma_s : get_number(kv, "gamma_s");
  const double q1 = a.gamma_q1 ? *a.gamma_q1 : get_number(kv, "gamma_q1");
  const double q2 = a.gamma_q2 ? *a.gamma_q2 : get_number(kv, "gamma_q2");
  const Auditor aud(m);
  const IntervalBox states = m.state_box();
  const std::vector<Interval> inputs(m.omega.dims().begin() + static_cast<std::ptrdiff_t>(m.n), m.omega.dims().end());
  std::vector<double> u_mid;
  for (const auto& iv : inputs) u_mid.push_back(iv.mid());

  out << "# verify gamma_s=" << fmt(gs) << " gamma_q1=" << fmt(q1) << " gamma_q2=" << fmt(q2)
      << " samples=" << a.samples << " seed=" << a.seed << "\n";

  std::size_t checked = 0;
  std::size_t osl_fail = 0;
  std::size_t qib_fail = 0;
  bool reported = false;
  auto check = [&](const PointPair& pp) {
    ++checked;
    const Audit o = aud.osl(gs, pp);
    const Audit q = aud.qib(q1, q2, pp);
    const bool of = violated(o);
    const bool qf = violated(q);
    osl_fail += of;
    qib_fail += qf;
    if ((of || qf) && !reported) {
      reported = true;
      out << "first_witness x=" << vec_string(pp.x) << " xhat=" << vec_string(pp.xhat);
      if (!pp.u.empty()) out << " u=" << vec_string(pp.u);
      out << " (" << (qf ? "qib" : "osl") << " lhs=" << fmt(qf ? q.lhs : o.lhs)
          << " rhs=" << fmt(qf ? q.rhs : o.rhs) << ")\n";
    }
  };

  // axis probes x = a e_i, xhat = 0 first, then random pairs
  std::vector<double> zero(m.n, 0.0);
  auto inside = [&](const std::vector<double>& x) { return states.contains(x); };
  if (a.samples > 0 && inside(zero)) {
    for (std::size_t i = 0; i < m.n; ++i) {
      for (double s : {1.0, 0.5}) {
        std::vector<double> x(m.n, 0.0);
        x[i] = s;
        if (inside(x)) check(PointPair{x, zero, u_mid});
      }
    }
  }
  std::mt19937_64 rng(a.seed);
  const IntervalBox input_box = inputs.empty() ? IntervalBox() : IntervalBox(inputs);
  for (std::size_t k = 0; k < a.samples; ++k) {
    PointPair pp;
    pp.x = uniform_point(states, rng);
    pp.xhat = uniform_point(states, rng);
    if (!inputs.empty()) pp.u = uniform_point(input_box, rng);
    check(pp);
  }
  if (a.samples == 0) err << "warning: no samples drawn; verification passes vacuously\n";

  // refuted constants must fail on the axis pairs
  struct Replay {
    double q1, q2, a;
  };
  for (const Replay r : {Replay{-200.0, -141.0, 1.0}, Replay{-99.0, -100.0, 0.5}}) {
    std::vector<double> x(m.n, 0.0);
    x[0] = r.a;
    if (!inside(x) || !inside(zero)) continue;
    const Audit q = aud.qib(r.q1, r.q2, PointPair{x, zero, u_mid});
    out << "replay gamma_q1=" << fmt(r.q1) << " gamma_q2=" << fmt(r.q2) << " x=" << vec_string(x)
        << " lhs=" << fmt(q.lhs) << " rhs=" << fmt(q.rhs) << " "
        << (violated(q) ? "expected-failure-observed" : "expected-failure-missing") << "\n";
  }

  out << "pairs = " << checked << "\n";
  out << "osl_violations = " << osl_fail << "\n";
  out << "qib_violations = " << qib_fail << "\n";
  const bool pass = osl_fail == 0 && qib_fail == 0;
  out << "result = " << (pass ? "pass" : "fail") << "\n";
  return pass ? exit_ok : exit_verify_failed;
}

}  // namespace

int report_exception(std::ostream& err) {
  try {
    throw;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return exit_input;
  } catch (const SyntaxError& e) {
    err << "syntax error: " << e.what() << "\n";
    return exit_input;
  } catch (const UnknownVariable& e) {
    err << "unknown variable: " << e.what() << "\n";
    return exit_input;
  } catch (const UnknownFunction& e) {
    err << "unknown function: " << e.what() << "\n";
    return exit_input;
  } catch (const DimensionMismatch& e) {
    err << "dimension mismatch: " << e.what() << "\n";
    return exit_input;
  } catch (const NegativeEpsilon& e) {
    err << "input error: " << e.what() << "\n";
    return exit_input;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return exit_input;
  } catch (const Infeasible& e) {
    err << e.what() << "\n";
    return exit_no_certificate;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_numerical;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonlinearity class constants and observer design", "nlclass"};
  app.set_version_flag("--version", std::string("nlclass ") + NLCLASS_VERSION);
  app.require_subcommand(1);

  std::string check_path;
  auto* check = app.add_subcommand("check", "Print dimensions, the symbolic Jacobian and the domain");
  check->add_option("system", check_path, "System file")->required();

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "Compute Lipschitz, OSL and QIB constants");
  bounds->add_option("system", ba.system, "System file")->required();
  bounds->add_option("--method", ba.method, "frobenius | gershgorin | thm3 | spectral-sample | all")
      ->capture_default_str();
  bounds->add_option("--eps1", ba.eps1, "QIB multiplier eps1")->capture_default_str();
  bounds->add_option("--eps2", ba.eps2, "QIB multiplier eps2")->capture_default_str();
  bounds->add_option("--tol", ba.tol, "Branch-and-bound gap")->capture_default_str();
  bounds->add_option("--budget", ba.budget, "Spectral sample points")->capture_default_str();
  bounds->add_option("--max-boxes", ba.max_boxes, "Box budget per search")->capture_default_str();
  bounds->add_option("--max-seconds", ba.max_seconds, "Time budget per search")->capture_default_str();
  bounds->add_option("--threads", ba.threads, "Worker threads (0 = default)")->capture_default_str();
  bounds->add_option("--out", ba.out, "Report file (default: stdout)");
  auto* expect = bounds->add_option("--expect-gamma-q2", ba.expect_q2,
                                    "Externally quoted gamma_q2 to check against eps2 - eps1");

  DesignArgs da;
  auto* design = app.add_subcommand("design", "Solve the observer LMI");
  design->add_option("system", da.system, "System file")->required();
  design->add_option("--kind", da.kind, "lipschitz | osl_qib")->capture_default_str();
  design->add_option("--report", da.report, "Bounds report")->required();
  design->add_option("--delta", da.delta, "Strictness margin (default 1e-4 * max(|A|_F, 1))");
  design->add_option("--max-iters", da.max_iters, "Projection iterations")->capture_default_str();
  design->add_option("--out", da.out, "Gain file (default: stdout)");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Co-simulate plant and observer");
  simulate->add_option("system", sa.system, "System file")->required();
  simulate->add_option("--gain", sa.gain, "Gain file")->required();
  simulate->add_option("--t-end", sa.t_end, "Horizon in seconds")->capture_default_str();
  simulate->add_option("--dt", sa.dt, "Step in seconds")->capture_default_str();
  simulate->add_option("--x0", sa.x0, "Plant initial state, comma separated (default 1,-1,...)");
  simulate->add_option("--xhat0", sa.xhat0, "Observer initial state (default 0)");
  simulate->add_option("--out", sa.out, "CSV file (default: stdout)");

  VerifyArgs va;
  double vs = 0, vq1 = 0, vq2 = 0;
  auto* verify = app.add_subcommand("verify", "Audit the class inequalities on random pairs");
  verify->add_option("system", va.system, "System file")->required();
  verify->add_option("--report", va.report, "Bounds report")->required();
  verify->add_option("--samples", va.samples, "Random pairs")->capture_default_str();
  verify->add_option("--seed", va.seed, "Random seed")->capture_default_str();
  auto* ovs = verify->add_option("--gamma-s", vs, "Override gamma_s");
  auto* ovq1 = verify->add_option("--gamma-q1", vq1, "Override gamma_q1");
  auto* ovq2 = verify->add_option("--gamma-q2", vq2, "Override gamma_q2");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_input;
  }

  try {
    if (*check) return cmd_check(check_path, out);
    if (*bounds) {
      ba.has_expect_q2 = expect->count() > 0;
      return cmd_bounds(ba, out, err);
    }
    if (*design) return cmd_design(da, out, err);
    if (*simulate) return cmd_simulate(sa, out);
    if (*verify) {
      if (ovs->count()) va.gamma_s = vs;
      if (ovq1->count()) va.gamma_q1 = vq1;
      if (ovq2->count()) va.gamma_q2 = vq2;
      return cmd_verify(va, out, err);
    }
  } catch (...) {
    return report_exception(err);
  }
  return exit_input;
}

}  // namespace nlclass
