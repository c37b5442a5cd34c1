#pragma once

// Random generators and numerical oracles shared by the test suites.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "swankit/expr.hpp"

namespace swankit::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Random smooth expression in `var`, finite for |var| <= 3.
/// With `raw` the tree is built without constant folding and sprinkled with
/// foldable patterns (e*1, e+0, c*c, ...).
inline ScalarExpr random_smooth(Rng& rng, int depth, Var var = Var::x, bool raw = false) {
  using detail::NodeFactory;
  auto bin = [&](BinaryOp op, const ScalarExpr& a, const ScalarExpr& b) {
    return raw ? NodeFactory::binary(op, a, b) : make_binary(op, a, b);
  };
  auto un = [&](UnaryOp op, const ScalarExpr& a) { return raw ? NodeFactory::unary(op, a) : make_unary(op, a); };
  auto constant = [&] { return ScalarExpr(std::round(uniform(rng, -2.0, 2.0) * 100.0) / 100.0); };

  if (depth <= 0) {
    if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) return constant();
    return ScalarExpr::variable(var);
  }
  auto sub = [&] { return random_smooth(rng, depth - 1, var, raw); };
  switch (std::uniform_int_distribution<int>(0, 13)(rng)) {
    case 0: return bin(BinaryOp::add, sub(), sub());
    case 1: return bin(BinaryOp::sub, sub(), sub());
    case 2: return bin(BinaryOp::mul, sub(), sub());
    case 3: return un(UnaryOp::sin, sub());
    case 4: return un(UnaryOp::cos, sub());
    case 5: return un(UnaryOp::tanh, sub());
    case 6: return un(UnaryOp::exp, un(UnaryOp::sin, sub()));
    case 7: return un(UnaryOp::sqrt, bin(BinaryOp::add, ScalarExpr(1.5), un(UnaryOp::cos, sub())));
    case 8: return un(UnaryOp::log, bin(BinaryOp::add, ScalarExpr(2.0), un(UnaryOp::sin, sub())));
    case 9: return bin(BinaryOp::div, sub(), bin(BinaryOp::add, ScalarExpr(2.0), un(UnaryOp::cos, sub())));
    case 10:
      return bin(BinaryOp::pow, bin(BinaryOp::add, ScalarExpr(1.5), un(UnaryOp::sin, sub())), ScalarExpr(2.5));
    case 11: return un(UnaryOp::neg, sub());
    case 12: return un(UnaryOp::sinh, un(UnaryOp::tanh, sub()));
    default:
      if (raw) {
        // foldable patterns
        switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
          case 0: return bin(BinaryOp::mul, sub(), ScalarExpr(1.0));
          case 1: return bin(BinaryOp::add, ScalarExpr(0.0), sub());
          case 2: return bin(BinaryOp::add, sub(), bin(BinaryOp::mul, sub(), ScalarExpr(0.0)));
          default: return bin(BinaryOp::mul, bin(BinaryOp::add, ScalarExpr(2.0), ScalarExpr(3.0)), sub());
        }
      }
      return un(UnaryOp::cosh, un(UnaryOp::sin, sub()));
  }
}

/// Central first difference.
inline double central_difference(const std::function<double(double)>& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

/// Composite Simpson rule with `n` (even) panels; used as an independent
/// quadrature oracle.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace swankit::testing
