#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace nlclass {

// Outward rounding is emulated by inflating each computed endpoint by
// `rel * |endpoint| + abs` instead of switching the FPU rounding mode.
struct Inflation {
  double rel = 1e-15;
  double abs = 1e-300;
};

// Process-wide inflation. Change it only while no interval arithmetic runs
// on other threads.
Inflation inflation();
void set_inflation(Inflation inf);

// Closed real interval [lo, hi] with lo <= hi and no NaN endpoints.
class Interval {
 public:
  constexpr Interval() = default;
  constexpr Interval(double x) : lo_(x), hi_(x) {}  // NOLINT: degenerate interval
  Interval(double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }
  double mid() const;
  double mag() const;  // max |x|
  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  bool subset_of(const Interval& other) const {
    return other.lo_ <= lo_ && hi_ <= other.hi_;
  }
  bool operator==(const Interval&) const = default;

  // Endpoints as computed, then pushed outward by the current Inflation.
  static Interval outward(double lo, double hi);

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
// Throws DomainError when b contains zero.
Interval operator/(const Interval& a, const Interval& b);

Interval pow_int(const Interval& a, int k);
Interval abs_i(const Interval& a);
Interval min_i(const Interval& a, const Interval& b);
Interval max_i(const Interval& a, const Interval& b);
Interval sqrt_i(const Interval& a);
Interval exp_i(const Interval& a);
Interval sin_i(const Interval& a);
Interval cos_i(const Interval& a);
Interval tanh_i(const Interval& a);

Interval hull(const Interval& a, const Interval& b);
std::string to_string(const Interval& a);

// Cartesian product of intervals; states first, then inputs.
class IntervalBox {
 public:
  IntervalBox() = default;
  explicit IntervalBox(std::vector<Interval> dims);
  IntervalBox(std::initializer_list<Interval> dims);

  std::size_t size() const { return dims_.size(); }
  const Interval& operator[](std::size_t i) const { return dims_[i]; }
  std::span<const Interval> dims() const { return dims_; }

  double width() const;
  std::size_t widest_dim() const;
  std::vector<double> midpoint() const;
  bool contains(std::span<const double> point) const;

  // Halves along dimension d at its midpoint.
  std::pair<IntervalBox, IntervalBox> bisect(std::size_t d) const;
  IntervalBox with(std::size_t d, Interval value) const;

 private:
  std::vector<Interval> dims_;
};

}  // namespace nlclass
