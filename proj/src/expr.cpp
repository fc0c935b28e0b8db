#include "nlclass/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <unordered_map>

#include "nlclass/errors.hpp"

namespace nlclass {

// ---------------------------------------------------------------------------
// Construction and access

Expr Expr::make(ExprNode node) { return Expr(std::make_shared<const ExprNode>(std::move(node))); }

Expr Expr::constant(double value) {
  ExprNode n;
  n.op = Op::constant;
  n.value = value;
  return make(std::move(n));
}

Expr Expr::state(std::size_t index) {
  ExprNode n;
  n.op = Op::var;
  n.kind = VarKind::state;
  n.index = index;
  n.slot = index;
  return make(std::move(n));
}

Expr Expr::input(std::size_t index, std::size_t n_states) {
  ExprNode n;
  n.op = Op::var;
  n.kind = VarKind::input;
  n.index = index;
  n.slot = n_states + index;
  return make(std::move(n));
}

Expr Expr::neg(Expr a) {
  ExprNode n;
  n.op = Op::neg;
  n.args = {std::move(a)};
  return make(std::move(n));
}

namespace {

ExprNode binary_node(Op op, Expr a, Expr b) {
  ExprNode n;
  n.op = op;
  n.args = {std::move(a), std::move(b)};
  return n;
}

}  // namespace

Expr Expr::add(Expr a, Expr b) { return make(binary_node(Op::add, std::move(a), std::move(b))); }
Expr Expr::sub(Expr a, Expr b) { return make(binary_node(Op::sub, std::move(a), std::move(b))); }
Expr Expr::mul(Expr a, Expr b) { return make(binary_node(Op::mul, std::move(a), std::move(b))); }
Expr Expr::div(Expr a, Expr b) { return make(binary_node(Op::div, std::move(a), std::move(b))); }

Expr Expr::pow(Expr base, int k) {
  if (k < 0) throw DomainError("integer power must be nonnegative");
  ExprNode n;
  n.op = Op::pow_int;
  n.exponent = k;
  n.args = {std::move(base)};
  return make(std::move(n));
}

Expr Expr::call(Func f, Expr arg) {
  ExprNode n;
  n.op = Op::call;
  n.func = f;
  n.args = {std::move(arg)};
  return make(std::move(n));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
VarKind Expr::kind() const { return node_->kind; }
std::size_t Expr::index() const { return node_->index; }
std::size_t Expr::slot() const { return node_->slot; }
int Expr::exponent() const { return node_->exponent; }
Func Expr::func() const { return node_->func; }
const Expr& Expr::lhs() const { return node_->args.at(0); }
const Expr& Expr::rhs() const { return node_->args.at(1); }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const ExprNode& x = *a.node_;
  const ExprNode& y = *b.node_;
  if (x.op != y.op) return false;
  switch (x.op) {
    case Op::constant:
      return x.value == y.value;
    case Op::var:
      return x.kind == y.kind && x.index == y.index && x.slot == y.slot;
    case Op::pow_int:
      if (x.exponent != y.exponent) return false;
      break;
    case Op::call:
      if (x.func != y.func) return false;
      break;
    default:
      break;
  }
  if (x.args.size() != y.args.size()) return false;
  for (std::size_t i = 0; i < x.args.size(); ++i) {
    if (!(x.args[i] == y.args[i])) return false;
  }
  return true;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::sqrt: return "sqrt";
    case Func::abs: return "abs";
    case Func::tanh: return "tanh";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }

std::optional<Func> lookup_func(std::string_view name) {
  static constexpr std::pair<std::string_view, Func> table[] = {
      {"sin", Func::sin},   {"cos", Func::cos}, {"exp", Func::exp},
      {"sqrt", Func::sqrt}, {"abs", Func::abs}, {"tanh", Func::tanh},
  };
  for (const auto& [n, f] : table) {
    if (n == name) return f;
  }
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view src, std::size_t n, std::size_t m) : src_(src), n_(n), m_(m) {}

  Expr parse_all() {
    Expr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      const char c = peek();
      if (c == '+') {
        ++pos_;
        lhs = Expr::add(lhs, term());
      } else if (c == '-') {
        ++pos_;
        lhs = Expr::sub(lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    bool negate = false;
    if (peek() == '-') {
      ++pos_;
      negate = true;
    }
    Expr lhs = factor();
    for (;;) {
      const char c = peek();
      if (c == '*') {
        ++pos_;
        lhs = Expr::mul(lhs, factor());
      } else if (c == '/') {
        ++pos_;
        lhs = Expr::div(lhs, factor());
      } else {
        break;
      }
    }
    return negate ? Expr::neg(lhs) : lhs;
  }

  Expr factor() {
    if (peek() == '-') {
      ++pos_;
      return Expr::neg(factor());
    }
    Expr base = atom();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      if (start == pos_) fail("expected nonnegative integer exponent after '^'");
      int k = 0;
      const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, k);
      if (ec != std::errc() || ptr != src_.data() + pos_) {
        pos_ = start;
        fail("exponent out of range");
      }
      if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E')) {
        fail("exponent must be an integer literal");
      }
      return Expr::pow(base, k);
    }
    return base;
  }

  Expr atom() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (is_digit(c) || c == '.') return number();
    if (is_alpha(c)) return identifier();
    if (c == '\0') fail("unexpected end of input");
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && is_digit(src_[p])) {
        pos_ = p;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::constant(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_alpha(src_[pos_])) ++pos_;
    const std::string_view letters = src_.substr(start, pos_ - start);
    const std::size_t digits_start = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    const std::string_view digits = src_.substr(digits_start, pos_ - digits_start);
    const std::string name(src_.substr(start, pos_ - start));

    if (digits.empty() && peek() == '(') {
      const auto f = lookup_func(letters);
      if (!f) throw UnknownFunction("unknown function '" + name + "' at byte " + std::to_string(start));
      ++pos_;
      Expr arg = expr();
      if (peek() != ')') fail("expected ')' to close " + name + "(");
      ++pos_;
      return Expr::call(*f, arg);
    }
    if ((letters == "x" || letters == "u") && !digits.empty()) {
      std::size_t k = 0;
      std::from_chars(digits.data(), digits.data() + digits.size(), k);
      const std::size_t limit = letters == "x" ? n_ : m_;
      if (k == 0 || k > limit) {
        throw UnknownVariable("variable '" + name + "' out of range (" +
                              std::string(letters) + "1.." + std::string(letters) +
                              std::to_string(limit) + ")");
      }
      return letters == "x" ? Expr::state(k - 1) : Expr::input(k - 1, n_);
    }
    throw UnknownVariable("unknown identifier '" + name + "' at byte " + std::to_string(start));
  }

  std::string_view src_;
  std::size_t n_;
  std::size_t m_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view src, std::size_t n_states, std::size_t n_inputs) {
  return Parser(src, n_states, n_inputs).parse_all();
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string var_name(const Expr& e) {
  return (e.kind() == VarKind::state ? "x" : "u") + std::to_string(e.index() + 1);
}

bool is_additive(const Expr& e) { return e.op() == Op::add || e.op() == Op::sub; }
bool is_multiplicative(const Expr& e) { return e.op() == Op::mul || e.op() == Op::div; }

std::string r_expr(const Expr& e);
std::string r_factor(const Expr& e);

std::string r_product(const Expr& e) {
  if (!is_multiplicative(e)) return r_factor(e);
  const Expr& a = e.lhs();
  const Expr& b = e.rhs();
  std::string out = is_multiplicative(a) ? r_product(a) : r_factor(a);
  out += e.op() == Op::mul ? "*" : "/";
  if (is_multiplicative(b)) {
    out += "(" + r_product(b) + ")";
  } else {
    out += r_factor(b);
  }
  return out;
}

std::string r_term(const Expr& e) {
  if (e.op() == Op::neg) {
    const Expr& a = e.lhs();
    if (is_additive(a) || a.op() == Op::neg || (a.is_constant() && a.value() < 0)) {
      return "-(" + r_expr(a) + ")";
    }
    return "-" + r_product(a);
  }
  return r_product(e);
}

std::string r_expr(const Expr& e) {
  if (e.is_constant() && e.value() < 0) return "-" + format_number(-e.value());
  if (!is_additive(e)) return r_term(e);
  const Expr& b = e.rhs();
  std::string out = r_expr(e.lhs());
  out += e.op() == Op::add ? " + " : " - ";
  if (is_additive(b) || b.op() == Op::neg) {
    out += "(" + r_expr(b) + ")";
  } else {
    out += r_term(b);
  }
  return out;
}

std::string r_atom(const Expr& e) {
  switch (e.op()) {
    case Op::var:
      return var_name(e);
    case Op::call:
      return std::string(func_name(e.func())) + "(" + r_expr(e.lhs()) + ")";
    case Op::constant:
      if (e.value() >= 0) return format_number(e.value());
      return "(-" + format_number(-e.value()) + ")";
    default:
      return "(" + r_expr(e) + ")";
  }
}

std::string r_factor(const Expr& e) {
  if (e.op() == Op::pow_int) return r_atom(e.lhs()) + "^" + std::to_string(e.exponent());
  return r_atom(e);
}

}  // namespace

std::string render(const Expr& e) { return r_expr(e); }

// ---------------------------------------------------------------------------
// Simplification

namespace {

bool is_const(const Expr& e, double v) { return e.is_constant() && e.value() == v; }

double apply_func(Func f, double x) {
  switch (f) {
    case Func::sin: return std::sin(x);
    case Func::cos: return std::cos(x);
    case Func::exp: return std::exp(x);
    case Func::sqrt: return std::sqrt(x);
    case Func::abs: return std::fabs(x);
    case Func::tanh: return std::tanh(x);
  }
  return std::nan("");
}

Interval apply_func(Func f, const Interval& x) {
  switch (f) {
    case Func::sin: return sin_i(x);
    case Func::cos: return cos_i(x);
    case Func::exp: return exp_i(x);
    case Func::sqrt: return sqrt_i(x);
    case Func::abs: return abs_i(x);
    case Func::tanh: return tanh_i(x);
  }
  throw DomainError("unknown function");
}

Expr simplify_neg(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (a.op() == Op::neg) return a.lhs();
  return Expr::neg(a);
}

}  // namespace

Expr simplify(const Expr& e) {
  switch (e.op()) {
    case Op::constant:
    case Op::var:
      return e;
    case Op::neg:
      return simplify_neg(simplify(e.lhs()));
    case Op::add: {
      const Expr a = simplify(e.lhs());
      const Expr b = simplify(e.rhs());
      if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      return Expr::add(a, b);
    }
    case Op::sub: {
      const Expr a = simplify(e.lhs());
      const Expr b = simplify(e.rhs());
      if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return simplify_neg(b);
      return Expr::sub(a, b);
    }
    case Op::mul: {
      const Expr a = simplify(e.lhs());
      const Expr b = simplify(e.rhs());
      if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
      if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      if (is_const(a, -1.0)) return simplify_neg(b);
      if (is_const(b, -1.0)) return simplify_neg(a);
      return Expr::mul(a, b);
    }
    case Op::div: {
      const Expr a = simplify(e.lhs());
      const Expr b = simplify(e.rhs());
      if (a.is_constant() && b.is_constant() && b.value() != 0.0) {
        return Expr::constant(a.value() / b.value());
      }
      if (is_const(a, 0.0) && !is_const(b, 0.0)) return Expr::constant(0.0);
      if (is_const(b, 1.0)) return a;
      return Expr::div(a, b);
    }
    case Op::pow_int: {
      const Expr a = simplify(e.lhs());
      const int k = e.exponent();
      if (k == 0) return Expr::constant(1.0);
      if (k == 1) return a;
      if (a.is_constant()) return Expr::constant(std::pow(a.value(), k));
      return Expr::pow(a, k);
    }
    case Op::call: {
      const Expr a = simplify(e.lhs());
      if (a.is_constant()) {
        const double v = apply_func(e.func(), a.value());
        if (std::isfinite(v)) return Expr::constant(v);
      }
      return Expr::call(e.func(), a);
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Polynomial normal form

namespace {

// Variable ordering key: states before inputs, then by index.
using VarKey = std::pair<int, std::size_t>;
using Monomial = std::vector<std::pair<VarKey, int>>;  // sorted by key, powers >= 1
using Poly = std::map<Monomial, double>;

constexpr std::size_t kMaxTerms = 512;

VarKey key_of(const Expr& v) { return {v.kind() == VarKind::state ? 0 : 1, v.index()}; }

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      out.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

void prune(Poly& p) {
  std::erase_if(p, [](const auto& kv) { return kv.second == 0.0; });
}

std::optional<Poly> poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      out[mono_mul(ma, mb)] += ca * cb;
      if (out.size() > kMaxTerms) return std::nullopt;
    }
  }
  prune(out);
  return out;
}

std::optional<Poly> to_poly(const Expr& e, std::map<VarKey, Expr>& vars) {
  switch (e.op()) {
    case Op::constant: {
      Poly p;
      if (e.value() != 0.0) p[{}] = e.value();
      return p;
    }
    case Op::var: {
      vars.emplace(key_of(e), e);
      return Poly{{Monomial{{key_of(e), 1}}, 1.0}};
    }
    case Op::neg: {
      auto p = to_poly(e.lhs(), vars);
      if (!p) return std::nullopt;
      for (auto& kv : *p) kv.second = -kv.second;
      return p;
    }
    case Op::add:
    case Op::sub: {
      auto a = to_poly(e.lhs(), vars);
      if (!a) return std::nullopt;
      auto b = to_poly(e.rhs(), vars);
      if (!b) return std::nullopt;
      const double sign = e.op() == Op::add ? 1.0 : -1.0;
      for (const auto& [m, c] : *b) (*a)[m] += sign * c;
      prune(*a);
      if (a->size() > kMaxTerms) return std::nullopt;
      return a;
    }
    case Op::mul: {
      auto a = to_poly(e.lhs(), vars);
      if (!a) return std::nullopt;
      auto b = to_poly(e.rhs(), vars);
      if (!b) return std::nullopt;
      return poly_mul(*a, *b);
    }
    case Op::div: {
      auto a = to_poly(e.lhs(), vars);
      if (!a) return std::nullopt;
      auto b = to_poly(e.rhs(), vars);
      if (!b || b->size() != 1 || !b->begin()->first.empty()) return std::nullopt;
      const double d = b->begin()->second;
      for (auto& kv : *a) kv.second /= d;
      return a;
    }
    case Op::pow_int: {
      auto base = to_poly(e.lhs(), vars);
      if (!base) return std::nullopt;
      Poly acc{{Monomial{}, 1.0}};
      for (int i = 0; i < e.exponent(); ++i) {
        auto next = poly_mul(acc, *base);
        if (!next) return std::nullopt;
        acc = std::move(*next);
      }
      return acc;
    }
    case Op::call:
      return std::nullopt;
  }
  return std::nullopt;
}

int degree(const Monomial& m) {
  int d = 0;
  for (const auto& [k, p] : m) d += p;
  return d;
}

// Higher degree first; within a degree, higher powers of earlier variables
// first (x1^2 before x1*x2 before x2^2).
bool display_before(const Monomial& a, const Monomial& b) {
  const int da = degree(a);
  const int db = degree(b);
  if (da != db) return da > db;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first != b[j].first) return a[i].first < b[j].first;
    if (a[i].second != b[j].second) return a[i].second > b[j].second;
    ++i;
    ++j;
  }
  return i < a.size();
}

Expr monomial_expr(const Monomial& m, double magnitude, const std::map<VarKey, Expr>& vars) {
  std::optional<Expr> out;
  if (m.empty() || magnitude != 1.0) out = Expr::constant(magnitude);
  for (const auto& [k, p] : m) {
    Expr f = p == 1 ? vars.at(k) : Expr::pow(vars.at(k), p);
    out = out ? Expr::mul(*out, f) : f;
  }
  return *out;
}

Expr from_poly(const Poly& p, const std::map<VarKey, Expr>& vars) {
  if (p.empty()) return Expr::constant(0.0);
  std::vector<std::pair<Monomial, double>> terms(p.begin(), p.end());
  std::stable_sort(terms.begin(), terms.end(),
                   [](const auto& a, const auto& b) { return display_before(a.first, b.first); });
  std::optional<Expr> out;
  for (const auto& [m, c] : terms) {
    const Expr t = monomial_expr(m, std::fabs(c), vars);
    if (!out) {
      out = c < 0 ? Expr::neg(t) : t;
    } else {
      out = c < 0 ? Expr::sub(*out, t) : Expr::add(*out, t);
    }
  }
  return *out;
}

}  // namespace

Expr normalize(const Expr& e) {
  const Expr s = simplify(e);
  std::map<VarKey, Expr> vars;
  const auto p = to_poly(s, vars);
  if (!p) return s;
  return from_poly(*p, vars);
}

// ---------------------------------------------------------------------------
// Differentiation

bool contains_abs(const Expr& e) {
  if (e.op() == Op::call && e.func() == Func::abs) return true;
  for (const auto& a : e.node()->args) {
    if (contains_abs(a)) return true;
  }
  return false;
}

namespace {

Expr d(const Expr& e, std::size_t wrt) {
  const auto c = [](double v) { return Expr::constant(v); };
  switch (e.op()) {
    case Op::constant:
      return c(0.0);
    case Op::var:
      return c(e.kind() == VarKind::state && e.index() == wrt ? 1.0 : 0.0);
    case Op::neg:
      return Expr::neg(d(e.lhs(), wrt));
    case Op::add:
      return Expr::add(d(e.lhs(), wrt), d(e.rhs(), wrt));
    case Op::sub:
      return Expr::sub(d(e.lhs(), wrt), d(e.rhs(), wrt));
    case Op::mul:
      return Expr::add(Expr::mul(d(e.lhs(), wrt), e.rhs()), Expr::mul(e.lhs(), d(e.rhs(), wrt)));
    case Op::div: {
      const Expr& a = e.lhs();
      const Expr& b = e.rhs();
      return Expr::div(Expr::sub(Expr::mul(d(a, wrt), b), Expr::mul(a, d(b, wrt))), Expr::pow(b, 2));
    }
    case Op::pow_int: {
      const int k = e.exponent();
      if (k == 0) return c(0.0);
      return Expr::mul(Expr::mul(c(k), Expr::pow(e.lhs(), k - 1)), d(e.lhs(), wrt));
    }
    case Op::call: {
      const Expr& a = e.lhs();
      const Expr da = d(a, wrt);
      switch (e.func()) {
        case Func::sin:
          return Expr::mul(Expr::call(Func::cos, a), da);
        case Func::cos:
          return Expr::mul(Expr::neg(Expr::call(Func::sin, a)), da);
        case Func::exp:
          return Expr::mul(e, da);
        case Func::sqrt:
          return Expr::div(da, Expr::mul(c(2.0), e));
        case Func::tanh:
          return Expr::mul(Expr::sub(c(1.0), Expr::pow(e, 2)), da);
        case Func::abs:
          throw NonDifferentiable("abs is not differentiable");
      }
    }
  }
  return c(0.0);
}

}  // namespace

Expr diff(const Expr& e, std::size_t wrt) {
  if (contains_abs(e)) throw NonDifferentiable("cannot differentiate an expression containing abs");
  return normalize(d(e, wrt));
}

void check_variables(const Expr& e, std::size_t n_states, std::size_t n_inputs) {
  if (e.op() == Op::var) {
    const bool state = e.kind() == VarKind::state;
    const std::size_t limit = state ? n_states : n_inputs;
    if (e.index() >= limit || e.slot() != (state ? e.index() : n_states + e.index())) {
      throw UnknownVariable("variable " + std::string(state ? "x" : "u") +
                            std::to_string(e.index() + 1) + " is not declared");
    }
  }
  for (const auto& a : e.node()->args) check_variables(a, n_states, n_inputs);
}

// ---------------------------------------------------------------------------
// Evaluation

Tape::Tape(const Expr& e) {
  std::unordered_map<const ExprNode*, std::size_t> seen;
  auto emit = [&](auto&& self, const Expr& x) -> std::size_t {
    if (auto it = seen.find(x.node()); it != seen.end()) return it->second;
    Instr in{x.op(), Func::sin, 0, 0.0, 0, 0, 0};
    switch (x.op()) {
      case Op::constant:
        in.value = x.value();
        break;
      case Op::var:
        in.slot = x.slot();
        break;
      case Op::pow_int:
        in.exponent = x.exponent();
        in.a = self(self, x.lhs());
        break;
      case Op::call:
        in.func = x.func();
        in.a = self(self, x.lhs());
        break;
      case Op::neg:
        in.a = self(self, x.lhs());
        break;
      default:
        in.a = self(self, x.lhs());
        in.b = self(self, x.rhs());
        break;
    }
    code_.push_back(in);
    const std::size_t id = code_.size() - 1;
    seen.emplace(x.node(), id);
    return id;
  };
  emit(emit, e);
}

namespace {

double pow_k(double x, int k) { return std::pow(x, k); }
Interval pow_k(const Interval& x, int k) { return pow_int(x, k); }

}  // namespace

template <class T>
T Tape::run(std::span<const T> vars) const {
  thread_local std::vector<T> reg;
  reg.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    switch (in.op) {
      case Op::constant: reg[i] = T(in.value); break;
      case Op::var:
        if (in.slot >= vars.size()) throw DimensionMismatch("evaluation point is too short");
        reg[i] = vars[in.slot];
        break;
      case Op::neg: reg[i] = -reg[in.a]; break;
      case Op::add: reg[i] = reg[in.a] + reg[in.b]; break;
      case Op::sub: reg[i] = reg[in.a] - reg[in.b]; break;
      case Op::mul: reg[i] = reg[in.a] * reg[in.b]; break;
      case Op::div: reg[i] = reg[in.a] / reg[in.b]; break;
      case Op::pow_int: reg[i] = pow_k(reg[in.a], in.exponent); break;
      case Op::call: reg[i] = apply_func(in.func, reg[in.a]); break;
    }
  }
  return reg.back();
}

double Tape::eval(std::span<const double> point) const { return run<double>(point); }
Interval Tape::eval(std::span<const Interval> box) const { return run<Interval>(box); }

double eval_point(const Expr& e, std::span<const double> point) { return Tape(e).eval(point); }
Interval eval_interval(const Expr& e, const IntervalBox& box) { return Tape(e).eval(box); }

}  // namespace nlclass
