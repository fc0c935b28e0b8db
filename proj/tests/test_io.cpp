#include <doctest.h>

#include <sstream>

#include "nlclass/errors.hpp"
#include "nlclass/io.hpp"
#include "support.hpp"

using namespace nlclass;

namespace {

const char* const kSystem = R"sys(# comment
n = 2
m = 1
p = 1
g = 1

A = [[0, 1], [-1, 0]]
B = [[0], [1]]
C = [[1, 0]]
G = [[0], [1]]
f = ["-x2^3 + u1*sin(x1)"]
omega = [[-1, 1], [-2, 2], [0, 0.5]]
)sys";

std::string with(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

std::string failing_field(const std::string& text) {
  std::istringstream in(text);
  try {
    read_system(in);
  } catch (const InputError& e) {
    return e.field();
  }
  return "none";
}

GammaReport sample_report() {
  GammaReport r;
  r.gamma_l = std::sqrt(25000.0);
  r.gamma_s = 0.0;
  r.gamma_bar = 0.0;
  r.gamma_lower = -150.0;
  r.gamma_m = 25000.0;
  r.gamma_q1 = 25015.0;
  r.gamma_q2 = 0.1 - 1e5;
  r.eps1 = 1e5;
  r.eps2 = 0.1;
  r.method_values = {{"gershgorin", 0.0}};
  r.enclosures = {{"gamma_s", Interval(-1e-9, 0.0)}};
  r.gamma_bar_sampled = -0.0;
  r.gamma_lower_sampled = -149.99;
  return r;
}

}  // namespace

TEST_CASE("system files parse and round-trip") {
  std::istringstream in(kSystem);
  const SystemModel m = read_system(in);
  CHECK(m.n == 2);
  CHECK(m.m == 1);
  CHECK(m.B == Matrix{{0}, {1}});
  CHECK(m.omega.size() == 3);
  CHECK(m.omega[2] == Interval(0, 0.5));
  CHECK(render(m.f[0]) == "-x2^3 + u1*sin(x1)");
  std::ostringstream out;
  write_system(out, m);
  std::istringstream again(out.str());
  const SystemModel r = read_system(again);
  CHECK(r.A == m.A);
  CHECK(r.B == m.B);
  CHECK(r.G == m.G);
  CHECK(r.f[0] == m.f[0]);
  CHECK(r.omega[1] == m.omega[1]);
  std::ostringstream twice;
  write_system(twice, r);
  CHECK(twice.str() == out.str());
}

TEST_CASE("the bundled system loads") {
  const SystemModel m = testing::moving_object();
  CHECK(m.n == 2);
  CHECK(m.m == 0);
  CHECK(m.B.rows() == 2);
  CHECK(m.B.cols() == 0);
  CHECK(m.omega[0] == Interval(-5, 5));
}

TEST_CASE("system errors name the field") {
  CHECK(failing_field(kSystem) == "none");
  CHECK(failing_field(with(kSystem, "B = [[0], [1]]", "B = [[0], [1], [2]]")) == "B");
  CHECK(failing_field(with(kSystem, "A = [[0, 1], [-1, 0]]", "A = [[0, 1], [-1]]")) == "A[1]");
  CHECK(failing_field(with(kSystem, "A = [[0, 1], [-1, 0]]", "A = [[0, 1], [-1, \"a\"]]")) == "A[1][1]");
  CHECK(failing_field(with(kSystem, "n = 2", "n = -2")) == "n");
  CHECK(failing_field(with(kSystem, "n = 2", "n = 0")) == "n");
  CHECK(failing_field(with(kSystem, "p = 1\n", "")) == "p");
  CHECK(failing_field(with(kSystem, "[0, 0.5]]", "[0.5, 0]]")) == "omega[2]");
  CHECK(failing_field(with(kSystem, "[[-1, 1], ", "")) == "omega");
  CHECK(failing_field(with(kSystem, "C = [[1, 0]]", "C = [[1, 0]")) == "C");
  CHECK(failing_field(with(kSystem, "n = 2", "n 2")) == "line 2");
  CHECK(failing_field(std::string(kSystem) + "extra = 1\n") == "extra");
  std::istringstream bad_var(with(kSystem, "u1*sin(x1)", "u2*sin(x1)"));
  CHECK_THROWS_AS(read_system(bad_var), UnknownVariable);
  std::istringstream bad_syntax(with(kSystem, "-x2^3", "-x2^^3"));
  try {
    read_system(bad_syntax);
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(std::string(e.what()).rfind("f[0]: ", 0) == 0);
  }
  CHECK_THROWS_AS(load_system("/nonexistent/system.sys"), InputError);
}

TEST_CASE("key-value documents") {
  std::istringstream in("# c\na = 1.5\n\n b =  -2e3 \nname = osl\n");
  const KeyValues kv = read_key_values(in);
  CHECK(get_number(kv, "a") == 1.5);
  CHECK(get_number(kv, "b") == -2000.0);
  CHECK(has_key(kv, "name"));
  CHECK_THROWS_AS(get_number(kv, "name"), InputError);
  CHECK_THROWS_AS(get_number(kv, "missing"), InputError);
  std::istringstream dup("a = 1\na = 2\n");
  CHECK_THROWS_AS(read_key_values(dup), InputError);
  std::istringstream noeq("a 1\n");
  CHECK_THROWS_AS(read_key_values(noeq), InputError);
}

TEST_CASE("number formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(25015) == "25015");
  CHECK(format_double(-99999.9) == "-99999.899999999994");
  CHECK(std::stod(format_double(std::sqrt(2.0))) == std::sqrt(2.0));
}

TEST_CASE("reports are deterministic and readable") {
  ReportContext ctx;
  ctx.system = "moving_object.sys";
  ctx.tol = 1e-6;
  ctx.max_boxes = 1000000;
  ctx.max_seconds = 60;
  ctx.budget = 100000;
  ctx.method = "gershgorin";
  ctx.has_expected_q2 = true;
  ctx.expected_q2 = -9999.89;
  std::ostringstream a, b;
  write_report(a, sample_report(), ctx);
  write_report(b, sample_report(), ctx);
  CHECK(a.str() == b.str());
  std::istringstream in(a.str());
  const KeyValues kv = read_key_values(in);
  CHECK(get_number(kv, "gamma_q1") == 25015.0);
  CHECK(get_number(kv, "gamma_q2") == 0.1 - 1e5);
  CHECK(get_number(kv, "gamma_s_lb") == -1e-9);
  CHECK(get_number(kv, "gamma_bar_sampled") == 0.0);
  CHECK(kv.at("qib_necessity") == "ok");
  CHECK(kv.at("sampled_certified") == "false");
  CHECK(kv.at("gamma_q2_expected_consistent") == "false");
  CHECK(q2_consistent(-99999.9, 1e5, 0.1));
  CHECK_FALSE(q2_consistent(-9999.89, 1e5, 0.1));
}

TEST_CASE("gain files") {
  LmiProblem pr;
  pr.kind = LmiKind::lipschitz;
  pr.A = Matrix{{-1, 0}, {0, -1}};
  pr.C = Matrix{{1, 0}};
  LmiSolution sol;
  sol.kind = pr.kind;
  sol.L = Matrix{{0.25}, {-1.5}};
  sol.vars.P = Matrix::identity(2);
  sol.vars.Y = sol.L;
  sol.vars.eps = 1;
  std::ostringstream out;
  write_gain(out, pr, sol);
  std::istringstream in(out.str());
  const KeyValues kv = read_key_values(in);
  CHECK(read_gain(kv, 2, 1) == sol.L);
  CHECK(kv.at("kind") == "lipschitz");
  CHECK(has_key(kv, "eps"));
  CHECK_FALSE(has_key(kv, "sigma"));
  CHECK_THROWS_AS(read_gain(kv, 1, 2), InputError);
  CHECK_THROWS_AS(read_gain(KeyValues{}, 2, 1), InputError);
  CHECK_THROWS_AS(read_gain(KeyValues{{"L", "[[1"}}, 1, 1), InputError);
}
