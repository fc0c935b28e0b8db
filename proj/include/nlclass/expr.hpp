#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlclass/interval.hpp"

namespace nlclass {

enum class Op { constant, var, neg, add, sub, mul, div, pow_int, call };
enum class VarKind { state, input };
enum class Func { sin, cos, exp, sqrt, abs, tanh };

struct ExprNode;

// Immutable expression tree for a component f_j(x, u). Subtrees are shared,
// so copies are cheap.
//
// Variables carry their kind, their 0-based index within that kind, and a
// flat slot (states first, then inputs) used when evaluating over a point of
// length n + m.
class Expr {
 public:
  static Expr constant(double value);
  static Expr state(std::size_t index);
  static Expr input(std::size_t index, std::size_t n_states);
  static Expr neg(Expr a);
  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b);
  static Expr mul(Expr a, Expr b);
  static Expr div(Expr a, Expr b);
  static Expr pow(Expr base, int k);
  static Expr call(Func f, Expr arg);

  Op op() const;
  double value() const;          // constant
  VarKind kind() const;          // var
  std::size_t index() const;     // var
  std::size_t slot() const;      // var
  int exponent() const;          // pow_int
  Func func() const;             // call
  const Expr& lhs() const;       // unary operand, or left operand
  const Expr& rhs() const;       // right operand

  bool is_constant() const { return op() == Op::constant; }
  const ExprNode* node() const { return node_.get(); }

  // Structural equality.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  static Expr make(ExprNode node);
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  Op op = Op::constant;
  double value = 0.0;
  VarKind kind = VarKind::state;
  std::size_t index = 0;
  std::size_t slot = 0;
  int exponent = 0;
  Func func = Func::sin;
  std::vector<Expr> args;
};

// Grammar (whitespace insignificant):
//   expr   := term (('+'|'-') term)*
//   term   := ['-'] factor (('*'|'/') factor)*     leading '-' negates the product
//   factor := '-' factor | atom ['^' integer]
//   atom   := number | ident | func '(' expr ')' | '(' expr ')'
//   ident  := ('x'|'u') digits                      1-based: x1..xn, u1..um
//   func   := sin | cos | exp | sqrt | abs | tanh
Expr parse(std::string_view src, std::size_t n_states, std::size_t n_inputs);

// Infix rendering; parse(render(e)) reproduces e for any tree the parser can
// produce.
std::string render(const Expr& e);

// Constant folding and identity elimination (0+e, 1*e, 0*e, e^1, --e, ...).
Expr simplify(const Expr& e);

// If e is a polynomial in its variables (constants, +, -, *, ^k, division by
// constants), returns it expanded with like terms collected, monomials in
// graded order; otherwise returns simplify(e).
Expr normalize(const Expr& e);

// Exact partial derivative with respect to state x_{wrt+1}, normalized.
// Throws NonDifferentiable if e contains abs.
Expr diff(const Expr& e, std::size_t wrt);

bool contains_abs(const Expr& e);
// Throws UnknownVariable if e references a state >= n or an input >= m.
void check_variables(const Expr& e, std::size_t n_states, std::size_t n_inputs);

// Linearized evaluation program. Shared subtrees are evaluated once.
class Tape {
 public:
  Tape() = default;
  explicit Tape(const Expr& e);

  double eval(std::span<const double> point) const;
  Interval eval(std::span<const Interval> box) const;
  Interval eval(const IntervalBox& box) const { return eval(box.dims()); }
  std::size_t size() const { return code_.size(); }

 private:
  struct Instr {
    Op op;
    Func func;
    int exponent;
    double value;
    std::size_t slot;
    std::size_t a;
    std::size_t b;
  };
  template <class T>
  T run(std::span<const T> vars) const;

  std::vector<Instr> code_;
};

double eval_point(const Expr& e, std::span<const double> point);
Interval eval_interval(const Expr& e, const IntervalBox& box);

const char* func_name(Func f);

}  // namespace nlclass
