#include "nlclass/interval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nlclass/errors.hpp"

namespace nlclass {

namespace {

Inflation g_inflation{};

double down(double x) {
  if (std::isinf(x)) return x;
  return x - (g_inflation.rel * std::fabs(x) + g_inflation.abs);
}

double up(double x) {
  if (std::isinf(x)) return x;
  return x + (g_inflation.rel * std::fabs(x) + g_inflation.abs);
}

// True if some point c + k*period (k integer) lies in [lo, hi].
bool hits(double lo, double hi, double c, double period) {
  const double k = std::ceil((lo - c) / period);
  return c + k * period <= hi;
}

}  // namespace

Inflation inflation() { return g_inflation; }
void set_inflation(Inflation inf) { g_inflation = inf; }

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (std::isnan(lo) || std::isnan(hi)) throw DomainError("interval endpoint is NaN");
  if (lo > hi) {
    std::ostringstream os;
    os << "interval lower endpoint " << lo << " exceeds upper endpoint " << hi;
    throw DomainError(os.str());
  }
}

Interval Interval::outward(double lo, double hi) { return Interval(down(lo), up(hi)); }

double Interval::mid() const {
  if (lo_ == hi_) return lo_;
  return lo_ + 0.5 * (hi_ - lo_);
}

double Interval::mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }

Interval operator+(const Interval& a, const Interval& b) {
  return Interval::outward(a.lo() + b.lo(), a.hi() + b.hi());
}

Interval operator-(const Interval& a, const Interval& b) {
  return Interval::outward(a.lo() - b.hi(), a.hi() - b.lo());
}

Interval operator-(const Interval& a) { return Interval(-a.hi(), -a.lo()); }

Interval operator*(const Interval& a, const Interval& b) {
  // Degenerate operands are common (constants in expressions); keep them exact
  // where the product is exact.
  if (a.lo() == a.hi() && (a.lo() == 0.0 || a.lo() == 1.0 || a.lo() == -1.0)) {
    if (a.lo() == 0.0) return Interval(0.0);
    return a.lo() == 1.0 ? b : -b;
  }
  if (b.lo() == b.hi() && (b.lo() == 0.0 || b.lo() == 1.0 || b.lo() == -1.0)) return b * a;
  const double p1 = a.lo() * b.lo();
  const double p2 = a.lo() * b.hi();
  const double p3 = a.hi() * b.lo();
  const double p4 = a.hi() * b.hi();
  return Interval::outward(std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4}));
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw DomainError("division by an interval containing zero: " + to_string(b));
  const double q1 = a.lo() / b.lo();
  const double q2 = a.lo() / b.hi();
  const double q3 = a.hi() / b.lo();
  const double q4 = a.hi() / b.hi();
  return Interval::outward(std::min({q1, q2, q3, q4}), std::max({q1, q2, q3, q4}));
}

Interval pow_int(const Interval& a, int k) {
  if (k < 0) throw DomainError("negative integer power");
  if (k == 0) return Interval(1.0);
  if (k == 1) return a;
  const double pl = std::pow(a.lo(), k);
  const double ph = std::pow(a.hi(), k);
  if (k % 2 == 1) return Interval::outward(pl, ph);
  if (a.contains_zero()) return Interval(0.0, up(std::max(pl, ph)));
  const Interval r = Interval::outward(std::min(pl, ph), std::max(pl, ph));
  return Interval(std::max(0.0, r.lo()), r.hi());
}

Interval abs_i(const Interval& a) {
  if (a.lo() >= 0.0) return a;
  if (a.hi() <= 0.0) return -a;
  return Interval(0.0, std::max(-a.lo(), a.hi()));
}

Interval min_i(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

Interval max_i(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

Interval sqrt_i(const Interval& a) {
  if (a.lo() < 0.0) throw DomainError("sqrt of interval with negative part: " + to_string(a));
  const Interval r = Interval::outward(std::sqrt(a.lo()), std::sqrt(a.hi()));
  return Interval(std::max(0.0, r.lo()), r.hi());
}

Interval exp_i(const Interval& a) {
  const Interval r = Interval::outward(std::exp(a.lo()), std::exp(a.hi()));
  return Interval(std::max(0.0, r.lo()), r.hi());
}

Interval tanh_i(const Interval& a) {
  const Interval r = Interval::outward(std::tanh(a.lo()), std::tanh(a.hi()));
  return Interval(std::max(-1.0, r.lo()), std::min(1.0, r.hi()));
}

Interval sin_i(const Interval& a) {
  constexpr double pi = std::numbers::pi;
  if (a.width() >= 2.0 * pi) return Interval(-1.0, 1.0);
  const double sl = std::sin(a.lo());
  const double sh = std::sin(a.hi());
  double lo = std::min(sl, sh);
  double hi = std::max(sl, sh);
  const bool has_max = hits(a.lo(), a.hi(), 0.5 * pi, 2.0 * pi);
  const bool has_min = hits(a.lo(), a.hi(), -0.5 * pi, 2.0 * pi);
  Interval r = Interval::outward(lo, hi);
  lo = has_min ? -1.0 : std::max(-1.0, r.lo());
  hi = has_max ? 1.0 : std::min(1.0, r.hi());
  return Interval(lo, hi);
}

Interval cos_i(const Interval& a) {
  constexpr double pi = std::numbers::pi;
  if (a.width() >= 2.0 * pi) return Interval(-1.0, 1.0);
  const double cl = std::cos(a.lo());
  const double ch = std::cos(a.hi());
  double lo = std::min(cl, ch);
  double hi = std::max(cl, ch);
  const bool has_max = hits(a.lo(), a.hi(), 0.0, 2.0 * pi);
  const bool has_min = hits(a.lo(), a.hi(), pi, 2.0 * pi);
  Interval r = Interval::outward(lo, hi);
  lo = has_min ? -1.0 : std::max(-1.0, r.lo());
  hi = has_max ? 1.0 : std::min(1.0, r.hi());
  return Interval(lo, hi);
}

Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

std::string to_string(const Interval& a) {
  std::ostringstream os;
  os.precision(17);
  os << '[' << a.lo() << ", " << a.hi() << ']';
  return os.str();
}

IntervalBox::IntervalBox(std::vector<Interval> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw DomainError("interval box must have at least one dimension");
  if (!std::isfinite(width())) throw DomainError("interval box width must be finite");
}

IntervalBox::IntervalBox(std::initializer_list<Interval> dims)
    : IntervalBox(std::vector<Interval>(dims)) {}

double IntervalBox::width() const {
  double w = 0.0;
  for (const auto& d : dims_) w = std::max(w, d.width());
  return w;
}

std::size_t IntervalBox::widest_dim() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < dims_.size(); ++i) {
    if (dims_[i].width() > dims_[best].width()) best = i;
  }
  return best;
}

std::vector<double> IntervalBox::midpoint() const {
  std::vector<double> m(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) m[i] = dims_[i].mid();
  return m;
}

bool IntervalBox::contains(std::span<const double> point) const {
  if (point.size() != dims_.size()) return false;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (!dims_[i].contains(point[i])) return false;
  }
  return true;
}

std::pair<IntervalBox, IntervalBox> IntervalBox::bisect(std::size_t d) const {
  const double m = dims_[d].mid();
  return {with(d, Interval(dims_[d].lo(), m)), with(d, Interval(m, dims_[d].hi()))};
}

IntervalBox IntervalBox::with(std::size_t d, Interval value) const {
  IntervalBox out = *this;
  out.dims_[d] = value;
  return out;
}

}  // namespace nlclass
