#include "nlclass/globopt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <queue>

#include "nlclass/errors.hpp"
#include "nlclass/omp.hpp"

namespace nlclass {

namespace {

class ExprObjective : public Objective::Impl {
 public:
  explicit ExprObjective(const Expr& e) : tape_(e) {}
  double value(std::span<const double> z) const override { return tape_.eval(z); }
  Interval enclose(std::span<const Interval> box) const override { return tape_.eval(box); }

 private:
  Tape tape_;
};

class MaxObjective : public Objective::Impl {
 public:
  explicit MaxObjective(std::vector<Objective> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw DomainError("max over an empty list of objectives");
  }
  double value(std::span<const double> z) const override {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : parts_) best = std::max(best, p.value(z));
    return best;
  }
  Interval enclose(std::span<const Interval> box) const override {
    const IntervalBox b(std::vector<Interval>(box.begin(), box.end()));
    Interval acc = parts_.front().enclose(b);
    for (std::size_t i = 1; i < parts_.size(); ++i) acc = max_i(acc, parts_[i].enclose(b));
    return acc;
  }

 private:
  std::vector<Objective> parts_;
};

class SumObjective : public Objective::Impl {
 public:
  SumObjective(Objective a, double scale, Objective b)
      : a_(std::move(a)), scale_(scale), b_(std::move(b)) {}
  double value(std::span<const double> z) const override {
    return a_.value(z) + scale_ * b_.value(z);
  }
  Interval enclose(std::span<const Interval> box) const override {
    const IntervalBox bx(std::vector<Interval>(box.begin(), box.end()));
    return a_.enclose(bx) + Interval(scale_) * b_.enclose(bx);
  }

 private:
  Objective a_;
  double scale_;
  Objective b_;
};

class NegObjective : public Objective::Impl {
 public:
  explicit NegObjective(Objective inner) : inner_(std::move(inner)) {}
  double value(std::span<const double> z) const override { return -inner_.value(z); }
  Interval enclose(std::span<const Interval> box) const override {
    return -inner_.enclose(IntervalBox(std::vector<Interval>(box.begin(), box.end())));
  }

 private:
  Objective inner_;
};

}  // namespace

Objective Objective::from_expr(const Expr& e) {
  return Objective(std::make_shared<const ExprObjective>(e));
}

Objective Objective::max_of(std::vector<Objective> parts) {
  if (parts.size() == 1) return parts.front();
  return Objective(std::make_shared<const MaxObjective>(std::move(parts)));
}

Objective Objective::sum(Objective a, double scale, Objective b) {
  return Objective(std::make_shared<const SumObjective>(std::move(a), scale, std::move(b)));
}

Objective Objective::negated() const { return Objective(std::make_shared<const NegObjective>(*this)); }

// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Node {
  IntervalBox box;
  double ub;
  std::uint64_t seq;
};

// Highest ub on top; equal ubs leave in insertion order.
struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.ub != b.ub) return a.ub < b.ub;
    return a.seq > b.seq;
  }
};

void check_config(const BnbConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw DomainError("BnB tolerance must be positive");
  if (cfg.max_boxes < 1) throw DomainError("BnB max_boxes must be at least 1");
}

// Shared bookkeeping of both drivers.
class Search {
 public:
  Search(const Objective& obj, const IntervalBox& omega, const BnbConfig& cfg)
      : cfg_(cfg), start_(Clock::now()) {
    check_config(cfg);
    argbest_ = omega.midpoint();
    lb_ = obj.value(argbest_);
    if (std::isnan(lb_)) lb_ = kNegInf;
    const Interval root = obj.enclose(omega);
    processed_ = 1;
    push(omega, root.hi());
  }

  // Drops pruned nodes and reports whether the search should stop.
  bool done() {
    while (!heap_.empty() && heap_.top().ub < lb_) heap_.pop();
    if (global_ub() - lb_ <= cfg_.tol) {
      converged_ = true;
      return true;
    }
    if (heap_.empty()) return true;
    if (processed_ >= cfg_.max_boxes) return true;
    if ((++rounds_ & 63u) == 0) {
      const double elapsed = std::chrono::duration<double>(Clock::now() - start_).count();
      if (elapsed > cfg_.max_seconds) return true;
    }
    return false;
  }

  double global_ub() const {
    double ub = std::max(stuck_ub_, heap_.empty() ? kNegInf : heap_.top().ub);
    return std::max(ub, lb_);
  }

  // Pops the best node and bisects it. Returns false if the node was pruned
  // or cannot be split further (its bound then stays in the result).
  bool take(std::vector<std::pair<IntervalBox, double>>& children) {
    Node node = heap_.top();
    heap_.pop();
    if (node.ub < lb_) return false;
    const std::size_t d = node.box.widest_dim();
    const Interval& iv = node.box[d];
    const double mid = iv.mid();
    if (!(iv.lo() < mid && mid < iv.hi())) {
      stuck_ub_ = std::max(stuck_ub_, node.ub);
      return false;
    }
    auto [left, right] = node.box.bisect(d);
    children.emplace_back(std::move(left), node.ub);
    children.emplace_back(std::move(right), node.ub);
    return true;
  }

  bool empty() const { return heap_.empty(); }

  void offer_point(std::vector<double> z, double v) {
    if (v > lb_) {
      lb_ = v;
      argbest_ = std::move(z);
    }
  }

  void offer_box(IntervalBox box, double ub) {
    if (ub >= lb_) push(std::move(box), ub);
  }

  void count(std::size_t k) { processed_ += k; }

  Enclosure result() const {
    Enclosure e;
    e.lb = lb_;
    e.ub = global_ub();
    e.argbest = argbest_;
    e.boxes_processed = processed_;
    e.converged = converged_;
    return e;
  }

  double lb() const { return lb_; }

 private:
  void push(IntervalBox box, double ub) { heap_.push(Node{std::move(box), ub, seq_++}); }

  const BnbConfig& cfg_;
  Clock::time_point start_;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> heap_;
  double lb_ = kNegInf;
  std::vector<double> argbest_;
  double stuck_ub_ = kNegInf;
  std::size_t processed_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t rounds_ = 0;
  bool converged_ = false;
};

Enclosure flip(Enclosure e) {
  const double lb = -e.ub;
  e.ub = -e.lb;
  e.lb = lb;
  return e;
}

}  // namespace

Enclosure maximize_serial(const Objective& objective, const IntervalBox& omega,
                          const BnbConfig& cfg, const ProgressFn& progress) {
  Search s(objective, omega, cfg);
  std::vector<std::pair<IntervalBox, double>> children;
  while (!s.done()) {
    if (progress) progress(s.lb(), s.global_ub());
    children.clear();
    if (!s.take(children)) continue;
    for (auto& [box, parent_ub] : children) {
      const double ub = std::min(objective.enclose(box).hi(), parent_ub);
      std::vector<double> mid = box.midpoint();
      const double v = objective.value(mid);
      s.count(1);
      s.offer_point(std::move(mid), v);
      s.offer_box(std::move(box), ub);
    }
  }
  if (progress) progress(s.lb(), s.global_ub());
  return s.result();
}

Enclosure maximize_serial(const Objective& objective, const IntervalBox& omega,
                          const BnbConfig& cfg) {
  return maximize_serial(objective, omega, cfg, ProgressFn{});
}

Enclosure minimize_serial(const Objective& objective, const IntervalBox& omega,
                          const BnbConfig& cfg) {
  return flip(maximize_serial(objective.negated(), omega, cfg));
}

Enclosure maximize(const Objective& objective, const IntervalBox& omega, const BnbConfig& cfg) {
  Search s(objective, omega, cfg);
  const std::size_t batch = std::max<std::size_t>(1, cfg.batch);
  const int threads = resolve_threads(cfg.threads);

  std::vector<std::pair<IntervalBox, double>> children;
  std::vector<double> ubs;
  std::vector<double> values;
  std::vector<std::vector<double>> mids;
  while (!s.done()) {
    children.clear();
    for (std::size_t k = 0; k < batch && !s.empty(); ++k) s.take(children);
    const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(children.size());
    if (count == 0) continue;
    ubs.assign(children.size(), 0.0);
    values.assign(children.size(), 0.0);
    mids.resize(children.size());

    std::exception_ptr failure;
#pragma omp parallel for num_threads(threads) schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        const auto& [box, parent_ub] = children[i];
        ubs[i] = std::min(objective.enclose(box).hi(), parent_ub);
        mids[i] = box.midpoint();
        values[i] = objective.value(mids[i]);
      } catch (...) {
#pragma omp critical(nlclass_bnb_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);

    s.count(children.size());
    for (std::size_t i = 0; i < children.size(); ++i) s.offer_point(mids[i], values[i]);
    for (std::size_t i = 0; i < children.size(); ++i) s.offer_box(std::move(children[i].first), ubs[i]);
  }
  return s.result();
}

Enclosure minimize(const Objective& objective, const IntervalBox& omega, const BnbConfig& cfg) {
  return flip(maximize(objective.negated(), omega, cfg));
}

}  // namespace nlclass
