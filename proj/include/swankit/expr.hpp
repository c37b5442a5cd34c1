#pragma once

// Immutable expression trees for real functions of one variable.
//
// A ScalarExpr is a shared, immutable DAG. All combinators return new trees
// and fold constants on the way (c op c, e*0, e*1, e+0, e^1, ...). No other
// algebraic rewriting is attempted; identities between expressions are
// checked pointwise (see compare_pointwise).

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "swankit/errors.hpp"

namespace swankit {

enum class Var : std::uint8_t { x = 0, u = 1, z = 2 };

inline char var_name(Var v) {
  switch (v) {
    case Var::x: return 'x';
    case Var::u: return 'u';
    case Var::z: return 'z';
  }
  return '?';
}

inline constexpr unsigned var_bit(Var v) { return 1u << static_cast<unsigned>(v); }

using ParamMap = std::map<std::string, double, std::less<>>;

enum class UnaryOp : std::uint8_t { neg, exp, log, sqrt, sin, cos, sinh, cosh, tanh };
enum class BinaryOp : std::uint8_t { add, sub, mul, div, pow };

inline const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::neg: return "-";
    case UnaryOp::exp: return "exp";
    case UnaryOp::log: return "log";
    case UnaryOp::sqrt: return "sqrt";
    case UnaryOp::sin: return "sin";
    case UnaryOp::cos: return "cos";
    case UnaryOp::sinh: return "sinh";
    case UnaryOp::cosh: return "cosh";
    case UnaryOp::tanh: return "tanh";
  }
  return "?";
}

inline std::optional<UnaryOp> unary_from_name(std::string_view name) {
  static constexpr std::pair<std::string_view, UnaryOp> table[] = {
      {"exp", UnaryOp::exp},   {"log", UnaryOp::log},   {"sqrt", UnaryOp::sqrt},
      {"sin", UnaryOp::sin},   {"cos", UnaryOp::cos},   {"sinh", UnaryOp::sinh},
      {"cosh", UnaryOp::cosh}, {"tanh", UnaryOp::tanh},
  };
  for (const auto& [n, op] : table) {
    if (n == name) return op;
  }
  return std::nullopt;
}

class ScalarExpr;

/// A function of one variable whose values come from a numerical procedure
/// (quadrature, root finding) instead of a closed form. The derivative is
/// supplied exactly as an expression in `variable()`, so differentiation of
/// trees containing opaque nodes stays closed.
class OpaqueFunction {
 public:
  virtual ~OpaqueFunction() = default;
  virtual double value(double t) const = 0;
  virtual ScalarExpr derivative() const = 0;
  virtual Var variable() const = 0;
  virtual std::string name() const = 0;
};

namespace detail {
struct Node;
struct NodeFactory;
}  // namespace detail

class ScalarExpr {
 public:
  /// The zero constant.
  ScalarExpr();
  /// Constants convert implicitly so that `2.0 * e` and `e + 1` read naturally.
  ScalarExpr(double value);  // NOLINT(google-explicit-constructor)

  static ScalarExpr constant(double value) { return ScalarExpr(value); }
  static ScalarExpr variable(Var v);
  static ScalarExpr parameter(std::string name);
  static ScalarExpr opaque(std::shared_ptr<const OpaqueFunction> fn);
  static ScalarExpr opaque(std::shared_ptr<const OpaqueFunction> fn, ScalarExpr arg);

  std::optional<double> constant_value() const;
  bool is_constant() const { return constant_value().has_value(); }
  bool is_zero() const;
  bool is_one() const;

  /// Bit set of the variables (var_bit) occurring anywhere in the tree.
  unsigned variable_mask() const;
  bool depends_on(Var v) const { return (variable_mask() & var_bit(v)) != 0; }

  const detail::Node& node() const { return *node_; }
  bool same_node(const ScalarExpr& other) const { return node_ == other.node_; }

 private:
  explicit ScalarExpr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
  friend struct detail::NodeFactory;

  std::shared_ptr<const detail::Node> node_;
};

namespace detail {

struct Constant {
  double value;
};
struct Variable {
  Var var;
};
struct Parameter {
  std::string name;
};
struct Unary {
  UnaryOp op;
  ScalarExpr arg;
};
struct Binary {
  BinaryOp op;
  ScalarExpr lhs;
  ScalarExpr rhs;
};
struct Opaque {
  std::shared_ptr<const OpaqueFunction> fn;
  ScalarExpr arg;
};

struct Node {
  std::variant<Constant, Variable, Parameter, Unary, Binary, Opaque> data;
  unsigned vars = 0;
};

/// Unfolded node construction. Used by the parser and by the folding
/// combinators once they have decided not to fold.
struct NodeFactory {
  static ScalarExpr make(Node n) { return ScalarExpr(std::make_shared<const Node>(std::move(n))); }
  static ScalarExpr unary(UnaryOp op, ScalarExpr arg) {
    const unsigned v = arg.variable_mask();
    return make(Node{Unary{op, std::move(arg)}, v});
  }
  static ScalarExpr binary(BinaryOp op, ScalarExpr lhs, ScalarExpr rhs) {
    const unsigned v = lhs.variable_mask() | rhs.variable_mask();
    return make(Node{Binary{op, std::move(lhs), std::move(rhs)}, v});
  }
};

}  // namespace detail

inline ScalarExpr::ScalarExpr() : ScalarExpr(0.0) {}

inline ScalarExpr::ScalarExpr(double value)
    : node_(std::make_shared<const detail::Node>(detail::Node{detail::Constant{value}, 0u})) {}

inline ScalarExpr ScalarExpr::variable(Var v) {
  return detail::NodeFactory::make(detail::Node{detail::Variable{v}, var_bit(v)});
}

inline ScalarExpr ScalarExpr::parameter(std::string name) {
  return detail::NodeFactory::make(detail::Node{detail::Parameter{std::move(name)}, 0u});
}

inline ScalarExpr ScalarExpr::opaque(std::shared_ptr<const OpaqueFunction> fn, ScalarExpr arg) {
  const unsigned v = arg.variable_mask();
  return detail::NodeFactory::make(detail::Node{detail::Opaque{std::move(fn), std::move(arg)}, v});
}

inline ScalarExpr ScalarExpr::opaque(std::shared_ptr<const OpaqueFunction> fn) {
  const Var v = fn->variable();
  return opaque(std::move(fn), variable(v));
}

inline std::optional<double> ScalarExpr::constant_value() const {
  if (const auto* c = std::get_if<detail::Constant>(&node_->data)) return c->value;
  return std::nullopt;
}

inline bool ScalarExpr::is_zero() const {
  const auto c = constant_value();
  return c && *c == 0.0;
}

inline bool ScalarExpr::is_one() const {
  const auto c = constant_value();
  return c && *c == 1.0;
}

inline unsigned ScalarExpr::variable_mask() const { return node_->vars; }

// ---------------------------------------------------------------------------
// Pointwise evaluation

namespace detail {

inline double checked(double value, const char* what) {
  if (!std::isfinite(value)) throw DomainError(std::string("non-finite result in ") + what);
  return value;
}

inline double apply_unary(UnaryOp op, double a) {
  switch (op) {
    case UnaryOp::neg: return -a;
    case UnaryOp::exp: return checked(std::exp(a), "exp");
    case UnaryOp::log:
      if (!(a > 0.0)) throw DomainError("log of non-positive argument");
      return std::log(a);
    case UnaryOp::sqrt:
      if (a < 0.0) throw DomainError("sqrt of negative argument");
      return std::sqrt(a);
    case UnaryOp::sin: return std::sin(a);
    case UnaryOp::cos: return std::cos(a);
    case UnaryOp::sinh: return checked(std::sinh(a), "sinh");
    case UnaryOp::cosh: return checked(std::cosh(a), "cosh");
    case UnaryOp::tanh: return std::tanh(a);
  }
  return 0.0;
}

inline double apply_binary(BinaryOp op, double a, double b) {
  switch (op) {
    case BinaryOp::add: return checked(a + b, "addition");
    case BinaryOp::sub: return checked(a - b, "subtraction");
    case BinaryOp::mul: return checked(a * b, "multiplication");
    case BinaryOp::div:
      if (b == 0.0) throw DomainError("division by zero");
      return checked(a / b, "division");
    case BinaryOp::pow:
      if (a == 0.0 && b < 0.0) throw DomainError("zero raised to a negative power");
      if (a < 0.0 && std::trunc(b) != b) throw DomainError("negative base with non-integer exponent");
      return checked(std::pow(a, b), "pow");
  }
  return 0.0;
}

struct Bindings {
  std::optional<double> value[3];
  const ParamMap* params = nullptr;
};

inline double eval(const ScalarExpr& e, const Bindings& env) {
  const Node& n = e.node();
  switch (n.data.index()) {
    case 0: return std::get<Constant>(n.data).value;
    case 1: {
      const Var v = std::get<Variable>(n.data).var;
      const auto& bound = env.value[static_cast<unsigned>(v)];
      if (!bound) throw VariableMismatch(std::string("variable '") + var_name(v) + "' is not bound");
      return *bound;
    }
    case 2: {
      const auto& name = std::get<Parameter>(n.data).name;
      if (env.params != nullptr) {
        if (auto it = env.params->find(name); it != env.params->end()) return it->second;
      }
      throw UnboundParameter("parameter '" + name + "' is not bound");
    }
    case 3: {
      const auto& u = std::get<Unary>(n.data);
      return apply_unary(u.op, eval(u.arg, env));
    }
    case 4: {
      const auto& b = std::get<Binary>(n.data);
      return apply_binary(b.op, eval(b.lhs, env), eval(b.rhs, env));
    }
    case 5: {
      const auto& o = std::get<Opaque>(n.data);
      return checked(o.fn->value(eval(o.arg, env)), "opaque function");
    }
  }
  return 0.0;
}

}  // namespace detail

/// Evaluates `e` with variable `v` bound to `point`.
inline double evaluate(const ScalarExpr& e, Var v, double point, const ParamMap& params = {}) {
  detail::Bindings env;
  env.value[static_cast<unsigned>(v)] = point;
  env.params = &params;
  return detail::eval(e, env);
}

/// Evaluates `e` with its (single) free variable bound to `point`. Constant
/// expressions ignore `point`. Expressions mixing variables are rejected.
inline double evaluate(const ScalarExpr& e, double point, const ParamMap& params = {}) {
  detail::Bindings env;
  env.params = &params;
  const unsigned mask = e.variable_mask();
  if (mask & (mask - 1)) throw VariableMismatch("expression depends on more than one variable");
  for (unsigned k = 0; k < 3; ++k) {
    if (mask & (1u << k)) env.value[k] = point;
  }
  return detail::eval(e, env);
}

// ---------------------------------------------------------------------------
// Folding combinators

inline ScalarExpr operator-(const ScalarExpr& a);

inline ScalarExpr make_unary(UnaryOp op, const ScalarExpr& a) {
  if (const auto c = a.constant_value()) {
    try {
      return ScalarExpr(detail::apply_unary(op, *c));
    } catch (const DomainError&) {
      // leave unfolded; evaluation reports the error
    }
  }
  if (op == UnaryOp::neg) {
    if (const auto* u = std::get_if<detail::Unary>(&a.node().data); u && u->op == UnaryOp::neg) return u->arg;
  }
  return detail::NodeFactory::unary(op, a);
}

/// Same tree shape, same leaves. Shared nodes short-circuit.
inline bool structurally_equal(const ScalarExpr& a, const ScalarExpr& b) {
  if (a.same_node(b)) return true;
  const auto& na = a.node().data;
  const auto& nb = b.node().data;
  if (na.index() != nb.index() || a.variable_mask() != b.variable_mask()) return false;
  return std::visit(
      [&](const auto& l) -> bool {
        using T = std::decay_t<decltype(l)>;
        const auto& r = std::get<T>(nb);
        if constexpr (std::is_same_v<T, detail::Constant>) {
          return l.value == r.value;
        } else if constexpr (std::is_same_v<T, detail::Variable>) {
          return l.var == r.var;
        } else if constexpr (std::is_same_v<T, detail::Parameter>) {
          return l.name == r.name;
        } else if constexpr (std::is_same_v<T, detail::Unary>) {
          return l.op == r.op && structurally_equal(l.arg, r.arg);
        } else if constexpr (std::is_same_v<T, detail::Binary>) {
          return l.op == r.op && structurally_equal(l.lhs, r.lhs) && structurally_equal(l.rhs, r.rhs);
        } else {
          return l.fn == r.fn && structurally_equal(l.arg, r.arg);
        }
      },
      na);
}

inline ScalarExpr make_binary(BinaryOp op, const ScalarExpr& a, const ScalarExpr& b) {
  const auto ca = a.constant_value();
  const auto cb = b.constant_value();
  if (ca && cb) {
    try {
      return ScalarExpr(detail::apply_binary(op, *ca, *cb));
    } catch (const DomainError&) {
      return detail::NodeFactory::binary(op, a, b);
    }
  }
  switch (op) {
    case BinaryOp::add:
      if (a.is_zero()) return b;
      if (b.is_zero()) return a;
      break;
    case BinaryOp::sub:
      if (b.is_zero()) return a;
      if (a.is_zero()) return make_unary(UnaryOp::neg, b);
      if (structurally_equal(a, b)) return ScalarExpr(0.0);
      break;
    case BinaryOp::mul:
      if (a.is_zero() || b.is_zero()) return ScalarExpr(0.0);
      if (a.is_one()) return b;
      if (b.is_one()) return a;
      if (ca && *ca == -1.0) return make_unary(UnaryOp::neg, b);
      if (cb && *cb == -1.0) return make_unary(UnaryOp::neg, a);
      break;
    case BinaryOp::div:
      if (a.is_zero()) return ScalarExpr(0.0);
      if (b.is_one()) return a;
      break;
    case BinaryOp::pow:
      if (b.is_zero()) return ScalarExpr(1.0);
      if (b.is_one()) return a;
      if (a.is_one()) return ScalarExpr(1.0);
      break;
  }
  return detail::NodeFactory::binary(op, a, b);
}

inline ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) { return make_binary(BinaryOp::add, a, b); }
inline ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) { return make_binary(BinaryOp::sub, a, b); }
inline ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) { return make_binary(BinaryOp::mul, a, b); }
inline ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) { return make_binary(BinaryOp::div, a, b); }
inline ScalarExpr operator-(const ScalarExpr& a) { return make_unary(UnaryOp::neg, a); }

inline ScalarExpr pow(const ScalarExpr& a, const ScalarExpr& b) { return make_binary(BinaryOp::pow, a, b); }
inline ScalarExpr exp(const ScalarExpr& a) { return make_unary(UnaryOp::exp, a); }
inline ScalarExpr log(const ScalarExpr& a) { return make_unary(UnaryOp::log, a); }
inline ScalarExpr sqrt(const ScalarExpr& a) { return make_unary(UnaryOp::sqrt, a); }
inline ScalarExpr sin(const ScalarExpr& a) { return make_unary(UnaryOp::sin, a); }
inline ScalarExpr cos(const ScalarExpr& a) { return make_unary(UnaryOp::cos, a); }
inline ScalarExpr sinh(const ScalarExpr& a) { return make_unary(UnaryOp::sinh, a); }
inline ScalarExpr cosh(const ScalarExpr& a) { return make_unary(UnaryOp::cosh, a); }
inline ScalarExpr tanh(const ScalarExpr& a) { return make_unary(UnaryOp::tanh, a); }

inline ScalarExpr square(const ScalarExpr& a) { return a * a; }

// ---------------------------------------------------------------------------
// Tree rewriting

/// Rebuilds `e` bottom-up through the folding combinators.
inline ScalarExpr simplify(const ScalarExpr& e) {
  const auto& n = e.node();
  if (const auto* u = std::get_if<detail::Unary>(&n.data)) return make_unary(u->op, simplify(u->arg));
  if (const auto* b = std::get_if<detail::Binary>(&n.data)) {
    return make_binary(b->op, simplify(b->lhs), simplify(b->rhs));
  }
  if (const auto* o = std::get_if<detail::Opaque>(&n.data)) return ScalarExpr::opaque(o->fn, simplify(o->arg));
  return e;
}

/// Replaces every occurrence of variable `v` by `replacement`.
inline ScalarExpr substitute(const ScalarExpr& e, Var v, const ScalarExpr& replacement) {
  if (!e.depends_on(v)) return e;
  const auto& n = e.node();
  if (std::holds_alternative<detail::Variable>(n.data)) return replacement;
  if (const auto* u = std::get_if<detail::Unary>(&n.data)) return make_unary(u->op, substitute(u->arg, v, replacement));
  if (const auto* b = std::get_if<detail::Binary>(&n.data)) {
    return make_binary(b->op, substitute(b->lhs, v, replacement), substitute(b->rhs, v, replacement));
  }
  if (const auto* o = std::get_if<detail::Opaque>(&n.data)) {
    return ScalarExpr::opaque(o->fn, substitute(o->arg, v, replacement));
  }
  return e;
}

/// Replaces bound named parameters by constants. Unbound names are kept.
inline ScalarExpr bind_parameters(const ScalarExpr& e, const ParamMap& params) {
  const auto& n = e.node();
  if (const auto* p = std::get_if<detail::Parameter>(&n.data)) {
    if (auto it = params.find(p->name); it != params.end()) return ScalarExpr(it->second);
    return e;
  }
  if (const auto* u = std::get_if<detail::Unary>(&n.data)) return make_unary(u->op, bind_parameters(u->arg, params));
  if (const auto* b = std::get_if<detail::Binary>(&n.data)) {
    return make_binary(b->op, bind_parameters(b->lhs, params), bind_parameters(b->rhs, params));
  }
  if (const auto* o = std::get_if<detail::Opaque>(&n.data)) {
    return ScalarExpr::opaque(o->fn, bind_parameters(o->arg, params));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Differentiation

/// Exact derivative with respect to `wrt`. Named parameters are constants.
inline ScalarExpr differentiate(const ScalarExpr& e, Var wrt) {
  if (!e.depends_on(wrt)) return ScalarExpr(0.0);
  const auto& n = e.node();
  if (std::holds_alternative<detail::Variable>(n.data)) return ScalarExpr(1.0);

  if (const auto* u = std::get_if<detail::Unary>(&n.data)) {
    const ScalarExpr& g = u->arg;
    const ScalarExpr dg = differentiate(g, wrt);
    switch (u->op) {
      case UnaryOp::neg: return -dg;
      case UnaryOp::exp: return e * dg;
      case UnaryOp::log: return dg / g;
      case UnaryOp::sqrt: return dg / (2.0 * e);
      case UnaryOp::sin: return cos(g) * dg;
      case UnaryOp::cos: return -(sin(g) * dg);
      case UnaryOp::sinh: return cosh(g) * dg;
      case UnaryOp::cosh: return sinh(g) * dg;
      case UnaryOp::tanh: return (1.0 - e * e) * dg;
    }
  }

  if (const auto* b = std::get_if<detail::Binary>(&n.data)) {
    const ScalarExpr& f = b->lhs;
    const ScalarExpr& g = b->rhs;
    switch (b->op) {
      case BinaryOp::add: return differentiate(f, wrt) + differentiate(g, wrt);
      case BinaryOp::sub: return differentiate(f, wrt) - differentiate(g, wrt);
      case BinaryOp::mul: return differentiate(f, wrt) * g + f * differentiate(g, wrt);
      case BinaryOp::div: return (differentiate(f, wrt) * g - f * differentiate(g, wrt)) / (g * g);
      case BinaryOp::pow:
        if (!g.depends_on(wrt)) return g * pow(f, g - 1.0) * differentiate(f, wrt);
        return e * (differentiate(g, wrt) * log(f) + g * differentiate(f, wrt) / f);
    }
  }

  if (const auto* o = std::get_if<detail::Opaque>(&n.data)) {
    const ScalarExpr outer = substitute(o->fn->derivative(), o->fn->variable(), o->arg);
    return outer * differentiate(o->arg, wrt);
  }
  return ScalarExpr(0.0);
}

/// Derivative with respect to the expression's own variable (constants give 0).
inline ScalarExpr differentiate(const ScalarExpr& e) {
  const unsigned mask = e.variable_mask();
  if (mask == 0) return ScalarExpr(0.0);
  if (mask & (mask - 1)) throw VariableMismatch("differentiate: expression depends on more than one variable");
  for (unsigned k = 0; k < 3; ++k) {
    if (mask & (1u << k)) return differentiate(e, static_cast<Var>(k));
  }
  return ScalarExpr(0.0);
}

inline ScalarExpr differentiate(const ScalarExpr& e, Var wrt, int order) {
  ScalarExpr d = e;
  for (int k = 0; k < order; ++k) d = differentiate(d, wrt);
  return d;
}

// ---------------------------------------------------------------------------
// Printing (parseable by parse_expr, except for opaque nodes)

namespace detail {

inline int precedence(const ScalarExpr& e) {
  const auto& n = e.node();
  if (std::holds_alternative<Constant>(n.data)) return 5;  // negatives print parenthesized
  if (const auto* u = std::get_if<Unary>(&n.data)) return u->op == UnaryOp::neg ? 3 : 5;
  if (const auto* b = std::get_if<Binary>(&n.data)) {
    switch (b->op) {
      case BinaryOp::add:
      case BinaryOp::sub: return 1;
      case BinaryOp::mul:
      case BinaryOp::div: return 2;
      case BinaryOp::pow: return 4;
    }
  }
  return 5;
}

inline std::string format_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline void print(std::ostream& os, const ScalarExpr& e);

inline void print_wrapped(std::ostream& os, const ScalarExpr& e, bool wrap) {
  if (wrap) os << '(';
  print(os, e);
  if (wrap) os << ')';
}

inline void print(std::ostream& os, const ScalarExpr& e) {
  const auto& n = e.node();
  if (const auto* c = std::get_if<Constant>(&n.data)) {
    if (c->value < 0.0) {
      os << "(-" << format_number(-c->value) << ')';
    } else {
      os << format_number(c->value);
    }
    return;
  }
  if (const auto* v = std::get_if<Variable>(&n.data)) {
    os << var_name(v->var);
    return;
  }
  if (const auto* p = std::get_if<Parameter>(&n.data)) {
    os << p->name;
    return;
  }
  if (const auto* u = std::get_if<Unary>(&n.data)) {
    if (u->op == UnaryOp::neg) {
      os << '-';
      print_wrapped(os, u->arg, precedence(u->arg) < 4);
    } else {
      os << unary_name(u->op) << '(';
      print(os, u->arg);
      os << ')';
    }
    return;
  }
  if (const auto* b = std::get_if<Binary>(&n.data)) {
    const int p = precedence(e);
    const int pl = precedence(b->lhs);
    const int pr = precedence(b->rhs);
    const bool right_assoc = b->op == BinaryOp::pow;
    const bool non_assoc = b->op == BinaryOp::sub || b->op == BinaryOp::div;
    print_wrapped(os, b->lhs, right_assoc ? pl <= p : pl < p);
    switch (b->op) {
      case BinaryOp::add: os << " + "; break;
      case BinaryOp::sub: os << " - "; break;
      case BinaryOp::mul: os << '*'; break;
      case BinaryOp::div: os << '/'; break;
      case BinaryOp::pow: os << '^'; break;
    }
    print_wrapped(os, b->rhs, right_assoc ? pr < p : (non_assoc ? pr <= p : pr < p));
    return;
  }
  if (const auto* o = std::get_if<Opaque>(&n.data)) {
    os << o->fn->name() << '(';
    print(os, o->arg);
    os << ')';
  }
}

}  // namespace detail

inline std::string to_string(const ScalarExpr& e) {
  std::ostringstream os;
  detail::print(os, e);
  return os.str();
}

inline std::ostream& operator<<(std::ostream& os, const ScalarExpr& e) {
  detail::print(os, e);
  return os;
}

/// Number of nodes reachable from `e`, counting shared subtrees once per path.
inline std::size_t tree_size(const ScalarExpr& e) {
  const auto& n = e.node();
  if (const auto* u = std::get_if<detail::Unary>(&n.data)) return 1 + tree_size(u->arg);
  if (const auto* b = std::get_if<detail::Binary>(&n.data)) return 1 + tree_size(b->lhs) + tree_size(b->rhs);
  if (const auto* o = std::get_if<detail::Opaque>(&n.data)) return 1 + tree_size(o->arg);
  return 1;
}

}  // namespace swankit
