#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "nlclass/errors.hpp"
#include "nlclass/interval.hpp"
#include "support.hpp"

using namespace nlclass;
using testing::uniform;

namespace {

// Endpoints may move outward by the inflation only.
bool near_exact(const Interval& got, double lo, double hi) {
  const double slack = 1e-13 * (1.0 + std::fabs(lo) + std::fabs(hi));
  return got.lo() <= lo && got.lo() >= lo - slack && got.hi() >= hi && got.hi() <= hi + slack;
}

Interval random_interval(std::mt19937_64& rng, double lo, double hi) {
  double a = uniform(rng, lo, hi);
  double b = uniform(rng, lo, hi);
  if (a > b) std::swap(a, b);
  return Interval(a, b);
}

}  // namespace

TEST_CASE("construction validates endpoints") {
  CHECK_THROWS_AS(Interval(2.0, 1.0), DomainError);
  CHECK_THROWS_AS(Interval(std::nan(""), 1.0), DomainError);
  CHECK_NOTHROW(Interval(-INFINITY, INFINITY));
  const Interval p(3.0);
  CHECK(p.lo() == 3.0);
  CHECK(p.hi() == 3.0);
  CHECK(Interval(-3, 2).mag() == 3.0);
  CHECK(Interval(-1, 3).mid() == 1.0);
}

TEST_CASE("endpoint arithmetic") {
  CHECK(near_exact(Interval(1, 2) + Interval(3, 4), 4, 6));
  CHECK(near_exact(Interval(1, 2) - Interval(3, 4), -3, -1));
  CHECK(near_exact(Interval(-1, 2) * Interval(-1, 2), -2, 4));
  CHECK(near_exact(Interval(1, 2) / Interval(-4, -2), -1, -0.25));
  CHECK(near_exact(-Interval(1, 2), -2, -1));
}

TEST_CASE("multiplication by exact zero or unit stays exact") {
  CHECK(Interval(0.0) * Interval(-5, 5) == Interval(0.0));
  CHECK(Interval(-5, 5) * Interval(1.0) == Interval(-5, 5));
  CHECK(Interval(-1.0) * Interval(2, 3) == Interval(-3, -2));
}

TEST_CASE("division by an interval containing zero throws") {
  CHECK_THROWS_AS(Interval(1, 2) / Interval(-1, 1), DomainError);
  CHECK_THROWS_AS(Interval(1, 2) / Interval(0, 1), DomainError);
  CHECK_THROWS_AS(Interval(1, 2) / Interval(0.0), DomainError);
}

TEST_CASE("integer powers") {
  CHECK(pow_int(Interval(-1, 2), 2).lo() == 0.0);
  CHECK(near_exact(pow_int(Interval(-1, 2), 2), 0, 4));
  CHECK(near_exact(pow_int(Interval(-2, -1), 3), -8, -1));
  CHECK(pow_int(Interval(0.0), 0) == Interval(1.0));
  CHECK(near_exact(pow_int(Interval(-3, -2), 2), 4, 9));
  CHECK(near_exact(pow_int(Interval(-2, 3), 1), -2, 3));
  CHECK_THROWS_AS(pow_int(Interval(1, 2), -1), DomainError);
}

TEST_CASE("elementary functions") {
  CHECK(near_exact(abs_i(Interval(-3, 2)), 0, 3));
  CHECK(near_exact(abs_i(Interval(-3, -2)), 2, 3));
  CHECK(near_exact(sin_i(Interval(0, std::numbers::pi)), 0, 1));
  CHECK(near_exact(max_i(Interval(1, 2), Interval(0, 5)), 1, 5));
  CHECK(near_exact(min_i(Interval(1, 2), Interval(0, 5)), 0, 2));
  CHECK(near_exact(cos_i(Interval(-1, 1)), std::cos(1.0), 1));
  CHECK(near_exact(sin_i(Interval(0, 10)), -1, 1));
  CHECK(near_exact(sqrt_i(Interval(4, 9)), 2, 3));
  CHECK(near_exact(exp_i(Interval(0, 1)), 1, std::exp(1.0)));
  CHECK(near_exact(tanh_i(Interval(-1, 1)), std::tanh(-1.0), std::tanh(1.0)));
  CHECK_THROWS_AS(sqrt_i(Interval(-1, 4)), DomainError);
  CHECK(near_exact(hull(Interval(0, 1), Interval(3, 4)), 0, 4));
}

TEST_CASE("inflation is configurable") {
  const Inflation saved = inflation();
  set_inflation({0.0, 0.0});
  CHECK(Interval(1, 2) + Interval(3, 4) == Interval(4, 6));
  set_inflation({1e-3, 0.0});
  const Interval r = Interval(1, 2) + Interval(3, 4);
  CHECK(r.lo() == doctest::Approx(4 - 4e-3));
  CHECK(r.hi() == doctest::Approx(6 + 6e-3));
  set_inflation(saved);
}

TEST_CASE("boxes") {
  CHECK_THROWS_AS(IntervalBox(std::vector<Interval>{}), DomainError);
  CHECK_THROWS_AS(IntervalBox({Interval(-INFINITY, 0.0)}), DomainError);
  const IntervalBox b{Interval(0, 1), Interval(-2, 2)};
  CHECK(b.width() == 4.0);
  CHECK(b.widest_dim() == 1);
  CHECK(b.midpoint() == std::vector<double>{0.5, 0.0});
  auto [l, r] = b.bisect(1);
  CHECK(l[1] == Interval(-2, 0));
  CHECK(r[1] == Interval(0, 2));
  const std::vector<double> in{0.5, 1.0};
  const std::vector<double> out{1.5, 1.0};
  CHECK(b.contains(in));
  CHECK_FALSE(b.contains(out));
  CHECK(b.with(0, Interval(7.0))[0] == Interval(7.0));
}

// Random points inside the operands must map inside the result.
TEST_CASE("containment fuzz") {
  std::mt19937_64 rng(11);
  using Bin = std::function<Interval(const Interval&, const Interval&)>;
  using BinR = std::function<double(double, double)>;
  const std::vector<std::pair<Bin, BinR>> binary = {
      {[](auto& a, auto& b) { return a + b; }, [](double x, double y) { return x + y; }},
      {[](auto& a, auto& b) { return a - b; }, [](double x, double y) { return x - y; }},
      {[](auto& a, auto& b) { return a * b; }, [](double x, double y) { return x * y; }},
      {[](auto& a, auto& b) { return min_i(a, b); }, [](double x, double y) { return std::min(x, y); }},
      {[](auto& a, auto& b) { return max_i(a, b); }, [](double x, double y) { return std::max(x, y); }},
  };
  for (const auto& [op, real] : binary) {
    for (int k = 0; k < 10000; ++k) {
      const Interval a = random_interval(rng, -10, 10);
      const Interval b = random_interval(rng, -10, 10);
      const Interval r = op(a, b);
      REQUIRE(r.contains(real(uniform(rng, a.lo(), a.hi()), uniform(rng, b.lo(), b.hi()))));
    }
  }
  for (int k = 0; k < 10000; ++k) {
    const Interval a = random_interval(rng, -10, 10);
    const Interval b = random_interval(rng, 0.5, 10);
    const double x = uniform(rng, a.lo(), a.hi());
    const double y = uniform(rng, b.lo(), b.hi());
    REQUIRE((a / b).contains(x / y));
    REQUIRE((a / (-b)).contains(x / -y));
  }
  using Un = std::function<Interval(const Interval&)>;
  using UnR = std::function<double(double)>;
  const std::vector<std::tuple<Un, UnR, double, double>> unary = {
      {[](auto& a) { return abs_i(a); }, [](double x) { return std::fabs(x); }, -10, 10},
      {[](auto& a) { return sqrt_i(a); }, [](double x) { return std::sqrt(x); }, 0, 100},
      {[](auto& a) { return exp_i(a); }, [](double x) { return std::exp(x); }, -20, 20},
      {[](auto& a) { return sin_i(a); }, [](double x) { return std::sin(x); }, -20, 20},
      {[](auto& a) { return cos_i(a); }, [](double x) { return std::cos(x); }, -20, 20},
      {[](auto& a) { return tanh_i(a); }, [](double x) { return std::tanh(x); }, -5, 5},
      {[](auto& a) { return pow_int(a, 2); }, [](double x) { return x * x; }, -10, 10},
      {[](auto& a) { return pow_int(a, 3); }, [](double x) { return x * x * x; }, -10, 10},
      {[](auto& a) { return pow_int(a, 4); }, [](double x) { return x * x * x * x; }, -10, 10},
  };
  for (const auto& [op, real, lo, hi] : unary) {
    for (int k = 0; k < 10000; ++k) {
      const Interval a = random_interval(rng, lo, hi);
      REQUIRE(op(a).contains(real(uniform(rng, a.lo(), a.hi()))));
    }
  }
}

TEST_CASE("inclusion monotonicity") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 2000; ++k) {
    const Interval big_a = random_interval(rng, -5, 5);
    const Interval big_b = random_interval(rng, -5, 5);
    const Interval a = random_interval(rng, big_a.lo(), big_a.hi());
    const Interval b = random_interval(rng, big_b.lo(), big_b.hi());
    REQUIRE((a + b).subset_of(big_a + big_b));
    REQUIRE((a - b).subset_of(big_a - big_b));
    REQUIRE((a * b).subset_of(big_a * big_b));
    REQUIRE(pow_int(a, 2).subset_of(pow_int(big_a, 2)));
    REQUIRE(pow_int(a, 3).subset_of(pow_int(big_a, 3)));
    REQUIRE(sin_i(a).subset_of(sin_i(big_a)));
    REQUIRE(cos_i(a).subset_of(cos_i(big_a)));
    REQUIRE(exp_i(a).subset_of(exp_i(big_a)));
    REQUIRE(abs_i(a).subset_of(abs_i(big_a)));
  }
}

TEST_CASE("width shrinks with the operands") {
  const std::vector<std::function<Interval(const Interval&)>> ops = {
      [](auto& a) { return a * a + a; },  [](auto& a) { return sin_i(a); },
      [](auto& a) { return exp_i(a); },   [](auto& a) { return pow_int(a, 3); },
      [](auto& a) { return tanh_i(a); }, [](auto& a) { return cos_i(a); },
  };
  for (const auto& op : ops) {
    double prev = INFINITY;
    for (int k = 0; k < 30; ++k) {
      const double h = std::ldexp(1.0, -k);
      const double w = op(Interval(0.3 - h, 0.3 + h)).width();
      CHECK(w <= prev * 1.000001);
      prev = w;
    }
    CHECK(prev < 1e-8);
  }
}
