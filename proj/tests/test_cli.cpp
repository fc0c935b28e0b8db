#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "nlclass/cli.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlclass::run_cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Scratch directory removed at scope exit.
struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("nlclass_cli_" + std::to_string(std::rand()) + "_" +
                                       std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string file(const std::string& name, const std::string& text) const {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kMoving = testing::data_path("moving_object.sys");

const char* const kStable = R"sys(n = 2
m = 0
p = 2
g = 2
A = [[-1, 0], [0, -1]]
B = [[], []]
C = [[1, 0], [0, 1]]
G = [[1, 0], [0, 1]]
f = ["0", "0"]
omega = [[-1, 1], [-1, 1]]
)sys";

}  // namespace

TEST_CASE("check prints the symbolic Jacobian") {
  const Result r = cli({"check", kMoving});
  CHECK(r.code == 0);
  CHECK(r.out.find("Xi = [[-3*x1^2 - x2^2, -2*x1*x2], [-2*x1*x2, -x1^2 - 3*x2^2]]") != std::string::npos);
  CHECK(r.out.find("Xi(2,2) = -x1^2 - 3*x2^2") != std::string::npos);
  CHECK(r.out.find("n = 2") == 0);
}

TEST_CASE("input errors exit with code 2") {
  Scratch s;
  const std::string text = slurp(kMoving);
  std::string bad_b = text;
  bad_b.replace(bad_b.find("B = [[], []]"), 12, "B = [[1], []]");
  const Result b = cli({"check", s.file("b.sys", bad_b)});
  CHECK(b.code == 2);
  CHECK(b.err.find("B") != std::string::npos);
  std::string bad_var = text;
  bad_var.replace(bad_var.find("-x2*(x1^2"), 3, "-x3");
  const Result v = cli({"check", s.file("v.sys", bad_var)});
  CHECK(v.code == 2);
  CHECK(v.err.find("unknown variable") != std::string::npos);
  CHECK(cli({"check", s.path("missing.sys")}).code == 2);
  CHECK(cli({"bounds", kMoving, "--method", "eigen"}).code == 2);
  CHECK(cli({"bounds", kMoving, "--eps1", "-1"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"--help"}).code == 0);
  CHECK(cli({"--version"}).code == 0);
}

TEST_CASE("bounds reports") {
  Scratch s;
  const Result f = cli({"bounds", kMoving, "--method", "frobenius", "--budget", "1000"});
  CHECK(f.code == 0);
  CHECK(f.out.find("gamma_s = 158.1138") != std::string::npos);
  CHECK(f.out.find("method = frobenius") != std::string::npos);

  const std::string zero = s.file("zero.sys", kStable);
  const Result z = cli({"bounds", zero, "--method", "all", "--budget", "100", "--out", s.path("z.rep")});
  CHECK(z.code == 0);
  const std::string rep = slurp(s.path("z.rep"));
  for (const char* key : {"gamma_l = 0\n", "gamma_s = 0\n", "gamma_m = 0\n", "gamma_bar = 0\n"})
    CHECK(rep.find(key) != std::string::npos);
  CHECK(z.out.find("gamma_s") != std::string::npos);

  const Result e = cli({"bounds", kMoving, "--budget", "100", "--expect-gamma-q2", "-9999.89"});
  CHECK(e.code == 0);
  CHECK(e.out.find("gamma_q2_expected_consistent = false") != std::string::npos);
  CHECK(e.err.find("inconsistent") != std::string::npos);
}

TEST_CASE("design, simulate and verify") {
  Scratch s;
  const std::string sys = s.file("stable.sys", kStable);
  const std::string rep = s.path("stable.rep");
  REQUIRE(cli({"bounds", sys, "--budget", "100", "--out", rep}).code == 0);

  const Result d = cli({"design", sys, "--kind", "lipschitz", "--report", rep, "--out", s.path("g.txt")});
  CHECK(d.code == 0);
  CHECK(d.out.find("ok = true") != std::string::npos);

  const std::string huge = s.file("huge.rep", "gamma_l = 1e9\n");
  const Result h = cli({"design", sys, "--kind", "lipschitz", "--report", huge, "--max-iters", "2000"});
  CHECK(h.code == 3);
  CHECK(h.err.find("no certificate found") != std::string::npos);
  CHECK(cli({"design", sys, "--kind", "osl_qib", "--report", huge}).code == 2);

  const Result sim = cli({"simulate", sys, "--gain", s.path("g.txt"), "--t-end", "0.01", "--dt", "0.01"});
  CHECK(sim.code == 0);
  CHECK(std::count(sim.out.begin(), sim.out.end(), '\n') == 3);
  CHECK(sim.out.rfind("t,x1,x2,xhat1,xhat2,err\n0,1,-1,0,0,", 0) == 0);
  CHECK(cli({"simulate", sys, "--gain", s.path("nogain.txt")}).code == 2);
  CHECK(cli({"simulate", sys, "--gain", s.path("g.txt"), "--x0", "1,2,3"}).code == 2);
  CHECK(cli({"simulate", sys, "--gain", s.path("g.txt"), "--dt", "0"}).code == 2);

  const Result v = cli({"verify", kMoving, "--report", rep, "--gamma-s", "0", "--gamma-q1", "25015",
                        "--gamma-q2", "-99999.9", "--samples", "2000"});
  CHECK(v.code == 0);
  CHECK(v.out.find("result = pass") != std::string::npos);
  CHECK(v.out.find("expected-failure-missing") == std::string::npos);
  CHECK(v.out.find("expected-failure-observed") != std::string::npos);

  const Result bad = cli({"verify", kMoving, "--report", rep, "--gamma-q1", "-200", "--gamma-q2", "-141"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("first_witness x=[1, 0] xhat=[0, 0]") != std::string::npos);
  CHECK(bad.out.find("result = fail") != std::string::npos);

  const Result none = cli({"verify", sys, "--report", rep, "--samples", "0"});
  CHECK(none.code == 0);
  CHECK(none.err.find("warning") != std::string::npos);
}

TEST_CASE("the installed tool reports exit codes") {
  const std::string tool = NLCLASS_TOOL;
  auto status = [&](const std::string& args) {
    const int raw = std::system((tool + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("check " + kMoving) == 0);
  CHECK(status("check /nonexistent.sys") == 2);
  CHECK(status("bounds " + kMoving + " --method nope") == 2);
}
