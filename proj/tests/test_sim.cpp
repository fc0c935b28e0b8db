#include <doctest.h>

#include <sstream>

#include "nlclass/errors.hpp"
#include "nlclass/sim.hpp"
#include "support.hpp"

using namespace nlclass;

namespace {

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> integrate(const SystemModel& m, std::vector<double> x, double t_end, double dt) {
  const auto steps = static_cast<long>(std::llround(t_end / dt));
  for (long k = 0; k < steps; ++k) x = step_plant(m, x, {}, dt);
  return x;
}

SimConfig config(double t_end, double dt, std::vector<double> x0, std::vector<double> xhat0) {
  SimConfig c;
  c.t_end = t_end;
  c.dt = dt;
  c.x0 = std::move(x0);
  c.xhat0 = std::move(xhat0);
  return c;
}

}  // namespace

TEST_CASE("zero dynamics leave the state unchanged") {
  const SystemModel m = testing::model_from(2, {"0", "0"}, 5.0);
  const std::vector<double> x{0.3, -4.0};
  CHECK(step_plant(m, x, {}, 0.1) == x);
  const std::vector<double> y{0.3, -4.0};
  CHECK(step_observer(m, Matrix(2, 2), x, {}, y, 0.1) == x);
}

TEST_CASE("one step against a fine reference") {
  const SystemModel m = testing::moving_object();
  const std::vector<double> x0{1, 1};
  const std::vector<double> coarse = step_plant(m, x0, {}, 1e-3);
  const std::vector<double> fine = integrate(m, x0, 1e-3, 1e-6);
  CHECK(std::fabs(coarse[0] - fine[0]) <= 1e-9);
  CHECK(std::fabs(coarse[1] - fine[1]) <= 1e-9);
}

TEST_CASE("fourth-order convergence") {
  const SystemModel m = testing::moving_object();
  const std::vector<double> x0{1, -1};
  const std::vector<double> ref = integrate(m, x0, 1.0, 1e-3);
  const std::vector<double> a = integrate(m, x0, 1.0, 0.1);
  const std::vector<double> b = integrate(m, x0, 1.0, 0.05);
  const double ea = std::hypot(a[0] - ref[0], a[1] - ref[1]);
  const double eb = std::hypot(b[0] - ref[0], b[1] - ref[1]);
  CHECK(ea / eb >= 8.0);
  CHECK(ea / eb <= 32.0);
}

TEST_CASE("observer without injection copies the plant") {
  const SystemModel m = testing::moving_object();
  const Trajectory t = run(m, Matrix(2, 1), config(2.0, 1e-3, {1, -1}, {1, -1}));
  for (double e : t.errors) REQUIRE(e == 0.0);
  CHECK(t.size() == 2001);
  CHECK(t.states.size() == t.size());
  CHECK(t.estimates.size() == t.size());
}

TEST_CASE("sample grid") {
  const SystemModel m = testing::moving_object();
  const Trajectory t = run(m, Matrix(2, 1), config(1e-3, 1e-3, {1, -1}, {0, 0}));
  CHECK(t.size() == 2);
  CHECK(t.times[0] == 0.0);
  CHECK(t.times[1] == 1e-3);
  CHECK(t.errors[0] == doctest::Approx(std::sqrt(2.0)));
  const Trajectory u = run(m, Matrix(2, 1), config(0.5, 0.01, {1, -1}, {0, 0}));
  for (std::size_t k = 1; k < u.size(); ++k) REQUIRE(u.times[k] > u.times[k - 1]);
  CHECK(u.times.back() == doctest::Approx(0.5));
}

TEST_CASE("divergent plant is reported") {
  const SystemModel m = testing::model_from(2, {"0", "0"}, 5.0, Matrix::identity(2));
  CHECK_THROWS_AS(run(m, Matrix(2, 2), config(40.0, 1e-2, {1, 1}, {0, 0})), NonFiniteState);
  const Trajectory t = run(m, Matrix(2, 2), config(5.0, 1e-2, {1, 1}, {0, 0}));
  CHECK(t.errors.back() > t.errors.front());
}

TEST_CASE("cubic damping keeps the plant near the unit circle") {
  const SystemModel m = testing::moving_object();
  for (const std::vector<double>& x0 : std::vector<std::vector<double>>{{1, -1}, {3, 4}, {0.1, 0}, {-2, 0.5}}) {
    const Trajectory t = run(m, Matrix(2, 1), config(10.0, 1e-3, x0, {0, 0}));
    double peak = 0.0;
    for (const auto& x : t.states) peak = std::max(peak, norm(x));
    CHECK(peak <= std::max(norm(x0), 1.0) + 1e-6);
  }
}

TEST_CASE("input errors") {
  const SystemModel m = testing::moving_object();
  CHECK_THROWS_AS(run(m, Matrix(2, 2), config(1, 1e-3, {1, 1}, {0, 0})), DimensionMismatch);
  CHECK_THROWS_AS(run(m, Matrix(2, 1), config(1, 1e-3, {1}, {0, 0})), DimensionMismatch);
  CHECK_THROWS_AS(run(m, Matrix(2, 1), config(1, 0.0, {1, 1}, {0, 0})), DomainError);
  CHECK_THROWS_AS(run(m, Matrix(2, 1), config(1e-4, 1e-3, {1, 1}, {0, 0})), DomainError);
}

TEST_CASE("input signals") {
  InputSignal s;
  CHECK(s.at(1.0, 2) == std::vector<double>{0, 0});
  s.kind = InputSignal::Kind::constant;
  s.offset = {2.0};
  CHECK(s.at(1.0, 2) == std::vector<double>{2, 0});
  s.kind = InputSignal::Kind::sinusoid;
  s.amplitude = {1.0};
  s.omega = {2.0};
  CHECK(s.at(0.25, 1)[0] == doctest::Approx(2.0 + std::sin(0.5)));
}

TEST_CASE("CSV export") {
  const SystemModel m = testing::moving_object();
  const Trajectory t = run(m, Matrix(2, 1), config(2e-3, 1e-3, {1, -1}, {0, 0}));
  std::ostringstream out;
  write_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,x1,x2,xhat1,xhat2,err");
  std::getline(in, line);
  CHECK(line == "0,1,-1,0,0,1.4142135623730951");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}
