#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nlclass/expr.hpp"
#include "nlclass/interval.hpp"

namespace nlclass {

// A scalar objective that can be evaluated at points and enclosed over boxes.
// Implementations must be safe to call concurrently.
class Objective {
 public:
  struct Impl {
    virtual ~Impl() = default;
    virtual double value(std::span<const double> z) const = 0;
    virtual Interval enclose(std::span<const Interval> box) const = 0;
  };

  explicit Objective(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  static Objective from_expr(const Expr& e);
  // max over the given objectives, enclosed by interval max.
  static Objective max_of(std::vector<Objective> parts);
  // a + scale * b
  static Objective sum(Objective a, double scale, Objective b);

  double value(std::span<const double> z) const { return impl_->value(z); }
  Interval enclose(const IntervalBox& box) const { return impl_->enclose(box.dims()); }
  Objective negated() const;

 private:
  std::shared_ptr<const Impl> impl_;
};

enum class SplitRule { widest_dimension };

struct BnbConfig {
  double tol = 1e-6;            // required gap ub - lb
  std::size_t max_boxes = 1000000;
  double max_seconds = 60.0;
  SplitRule split_rule = SplitRule::widest_dimension;
  int threads = 0;              // parallel kernel only; 0 = runtime default
  std::size_t batch = 64;       // boxes expanded per parallel round
};

// Certified bracket of a global optimum. For maximize: lb is attained at
// argbest, ub bounds the maximum from above. For minimize the roles swap in
// the original sign convention: lb bounds the minimum from below and ub is
// attained at argbest.
struct Enclosure {
  double lb = 0.0;
  double ub = 0.0;
  std::vector<double> argbest;
  std::size_t boxes_processed = 0;
  bool converged = false;

  double gap() const { return ub - lb; }
};

// Batched branch and bound: each round expands up to cfg.batch boxes and
// evaluates their children in parallel. The result does not depend on the
// thread count.
Enclosure maximize(const Objective& objective, const IntervalBox& omega, const BnbConfig& cfg = {});
Enclosure minimize(const Objective& objective, const IntervalBox& omega, const BnbConfig& cfg = {});

// One box at a time, no threads. Reference implementation for tests and
// benchmarks.
Enclosure maximize_serial(const Objective& objective, const IntervalBox& omega,
                          const BnbConfig& cfg = {});
Enclosure minimize_serial(const Objective& objective, const IntervalBox& omega,
                          const BnbConfig& cfg = {});

// Observer for lb/ub after every expansion (tests assert monotone progress).
using ProgressFn = std::function<void(double lb, double ub)>;
Enclosure maximize_serial(const Objective& objective, const IntervalBox& omega,
                          const BnbConfig& cfg, const ProgressFn& progress);

}  // namespace nlclass
