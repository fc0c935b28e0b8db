#include "nlclass/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "nlclass/errors.hpp"

namespace nlclass {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t as_dim(const json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw InputError(field, "expected a nonnegative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

double as_real(const json& v, const std::string& field) {
  if (!v.is_number()) throw InputError(field, "expected a number");
  return v.get<double>();
}

Matrix as_matrix(const json& v, std::size_t rows, std::size_t cols, const std::string& field) {
  if (!v.is_array()) throw InputError(field, "expected a nested array of rows");
  if (cols == 0 && v.empty()) return Matrix(rows, 0);
  if (v.size() != rows)
    throw InputError(field, "expected " + std::to_string(rows) + " rows, got " + std::to_string(v.size()));
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_field = field + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != cols)
      throw InputError(row_field, "expected a row of " + std::to_string(cols) + " numbers");
    for (std::size_t j = 0; j < cols; ++j)
      m(i, j) = as_real(v[i][j], row_field + "[" + std::to_string(j) + "]");
  }
  return m;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::ifstream open(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw InputError(field, "cannot open '" + path + "'");
  return in;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
  return buf;
}

KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InputError("line " + std::to_string(lineno), "expected 'name = value'");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw InputError("line " + std::to_string(lineno), "empty name");
    if (!kv.emplace(key, trim(t.substr(eq + 1))).second) throw InputError(key, "duplicate entry");
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  auto in = open(path, path);
  return read_key_values(in);
}

bool has_key(const KeyValues& kv, const std::string& key) { return kv.count(key) != 0; }

double get_number(const KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw InputError(key, "missing entry");
  const char* s = it->second.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0' || std::isnan(v)) throw InputError(key, "expected a number, got '" + it->second + "'");
  return v;
}

SystemModel read_system(std::istream& in) {
  static const char* const order[] = {"n", "m", "p", "g", "A", "B", "C", "G", "f", "omega"};
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InputError("line " + std::to_string(lineno), "expected 'name = value'");
    entries.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  std::vector<json> values;
  for (std::size_t k = 0; k < std::size(order); ++k) {
    if (k >= entries.size()) throw InputError(order[k], "missing entry");
    if (entries[k].first != order[k])
      throw InputError(order[k], "expected '" + std::string(order[k]) + "' here, found '" + entries[k].first + "'");
    try {
      values.push_back(json::parse(entries[k].second));
    } catch (const json::parse_error& e) {
      throw InputError(order[k], std::string("malformed value: ") + e.what());
    }
  }
  if (entries.size() > std::size(order)) throw InputError(entries[std::size(order)].first, "unexpected entry");

  SystemModel m;
  m.n = as_dim(values[0], "n");
  m.m = as_dim(values[1], "m");
  m.p = as_dim(values[2], "p");
  m.g = as_dim(values[3], "g");
  if (m.n == 0) throw InputError("n", "at least one state is required");
  m.A = as_matrix(values[4], m.n, m.n, "A");
  m.B = as_matrix(values[5], m.n, m.m, "B");
  m.C = as_matrix(values[6], m.p, m.n, "C");
  m.G = as_matrix(values[7], m.n, m.g, "G");

  const json& f = values[8];
  if (!f.is_array() || f.size() != m.g)
    throw InputError("f", "expected a list of " + std::to_string(m.g) + " expression strings");
  for (std::size_t j = 0; j < m.g; ++j) {
    const std::string field = "f[" + std::to_string(j) + "]";
    if (!f[j].is_string()) throw InputError(field, "expected an expression string");
    try {
      m.f.push_back(parse(f[j].get<std::string>(), m.n, m.m));
    } catch (const SyntaxError& e) {
      throw SyntaxError(field + ": " + std::string(e.what()).substr(0, std::string(e.what()).rfind(" at byte")), e.offset());
    } catch (const UnknownVariable& e) {
      throw UnknownVariable(field + ": " + e.what());
    } catch (const UnknownFunction& e) {
      throw UnknownFunction(field + ": " + e.what());
    }
  }

  const json& om = values[9];
  if (!om.is_array() || om.size() != m.n + m.m)
    throw InputError("omega", "expected " + std::to_string(m.n + m.m) + " [lo, hi] pairs");
  std::vector<Interval> dims;
  for (std::size_t i = 0; i < om.size(); ++i) {
    const std::string field = "omega[" + std::to_string(i) + "]";
    if (!om[i].is_array() || om[i].size() != 2) throw InputError(field, "expected [lo, hi]");
    const double lo = as_real(om[i][0], field);
    const double hi = as_real(om[i][1], field);
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) throw InputError(field, "expected finite lo <= hi");
    dims.emplace_back(lo, hi);
  }
  m.omega = IntervalBox(std::move(dims));
  m.validate();
  return m;
}

SystemModel load_system(const std::string& path) {
  auto in = open(path, "system");
  return read_system(in);
}

void write_system(std::ostream& out, const SystemModel& model) {
  out << "n = " << model.n << "\n";
  out << "m = " << model.m << "\n";
  out << "p = " << model.p << "\n";
  out << "g = " << model.g << "\n";
  auto mat = [&](const char* name, const Matrix& m) {
    out << name << " = " << matrix_json(m).dump() << "\n";
  };
  mat("A", model.A);
  mat("B", model.B);
  mat("C", model.C);
  mat("G", model.G);
  json f = json::array();
  for (const auto& e : model.f) f.push_back(render(e));
  out << "f = " << f.dump() << "\n";
  json om = json::array();
  for (const auto& iv : model.omega.dims()) om.push_back({iv.lo(), iv.hi()});
  out << "omega = " << om.dump() << "\n";
}

bool q2_consistent(double printed, double eps1, double eps2) {
  const double q2 = eps2 - eps1;
  return std::fabs(printed - q2) <= 1e-9 * std::max(1.0, std::fabs(q2));
}

void write_report(std::ostream& out, const GammaReport& rep, const ReportContext& ctx) {
  out << "# nlclass " << NLCLASS_VERSION << " bounds report\n";
  out << "# system = " << ctx.system << "\n";
  out << "# config: method=" << ctx.method << " tol=" << format_double(ctx.tol)
      << " max_boxes=" << ctx.max_boxes << " max_seconds=" << format_double(ctx.max_seconds)
      << " budget=" << ctx.budget << "\n";
  auto line = [&](const std::string& k, double v) { out << k << " = " << format_double(v) << "\n"; };
  line("gamma_l", rep.gamma_l);
  line("gamma_s", rep.gamma_s);
  line("gamma_bar", rep.gamma_bar);
  line("gamma_lower", rep.gamma_lower);
  line("gamma_m", rep.gamma_m);
  line("gamma_q1", rep.gamma_q1);
  line("gamma_q2", rep.gamma_q2);
  line("eps1", rep.eps1);
  line("eps2", rep.eps2);
  out << "method = " << method_name(rep.method) << "\n";
  out << "qib_necessity = " << (rep.necessity_ok ? "ok" : "violated") << "\n";
  out << "converged = " << (rep.converged ? "true" : "false") << "\n";
  for (const auto& [name, v] : rep.method_values) line("gamma_s_" + name, v);
  for (const auto& e : rep.enclosures) {
    line(e.name + "_lb", e.value.lo());
    line(e.name + "_ub", e.value.hi());
  }
  line("gamma_bar_sampled", rep.gamma_bar_sampled);
  line("gamma_lower_sampled", rep.gamma_lower_sampled);
  out << "sampled_certified = false\n";
  if (ctx.has_expected_q2) {
    line("gamma_q2_expected", ctx.expected_q2);
    out << "gamma_q2_expected_consistent = "
        << (q2_consistent(ctx.expected_q2, rep.eps1, rep.eps2) ? "true" : "false") << "\n";
  }
}

void write_gain(std::ostream& out, const LmiProblem& problem, const LmiSolution& sol) {
  out << "# nlclass " << NLCLASS_VERSION << " observer gain\n";
  out << "kind = " << kind_name(sol.kind) << "\n";
  out << "L = " << format_matrix(sol.L) << "\n";
  out << "lambda_lmi_max = " << format_double(sol.cert.lambda_lmi_max) << "\n";
  out << "lambda_p_min = " << format_double(sol.cert.lambda_p_min) << "\n";
  out << "delta = " << format_double(sol.delta) << "\n";
  out << "ok = " << (sol.cert.ok ? "true" : "false") << "\n";
  out << "iterations = " << sol.iterations << "\n";
  out << "P = " << format_matrix(sol.vars.P) << "\n";
  if (problem.kind == LmiKind::lipschitz) {
    out << "Y = " << format_matrix(sol.vars.Y) << "\n";
    out << "eps = " << format_double(sol.vars.eps) << "\n";
  } else {
    out << "sigma = " << format_double(sol.vars.sigma) << "\n";
    out << "eps1 = " << format_double(sol.vars.eps1) << "\n";
    out << "eps2 = " << format_double(sol.vars.eps2) << "\n";
  }
}

Matrix read_gain(const KeyValues& kv, std::size_t rows, std::size_t cols) {
  const auto it = kv.find("L");
  if (it == kv.end()) throw InputError("L", "missing entry");
  json v;
  try {
    v = json::parse(it->second);
  } catch (const json::parse_error& e) {
    throw InputError("L", std::string("malformed value: ") + e.what());
  }
  return as_matrix(v, rows, cols, "L");
}

}  // namespace nlclass
