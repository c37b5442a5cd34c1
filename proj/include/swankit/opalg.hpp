#pragma once

// Linear differential operators in one variable, stored in left-normal form
//   A = sum_k c_k(x) d^k/dx^k
// with expression coefficients.

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "swankit/expr.hpp"
#include "swankit/pointwise.hpp"

namespace swankit {

class DiffOp {
 public:
  explicit DiffOp(Var var = Var::x) : var_(var) {}

  /// coefficients[k] multiplies d^k. Trailing structural zeros are dropped.
  DiffOp(std::vector<ScalarExpr> coefficients, Var var) : coeffs_(std::move(coefficients)), var_(var) {
    check_variables();
    normalize();
  }

  DiffOp(std::initializer_list<ScalarExpr> coefficients, Var var = Var::x)
      : DiffOp(std::vector<ScalarExpr>(coefficients), var) {}

  static DiffOp multiplication(ScalarExpr c, Var var = Var::x) { return DiffOp({std::move(c)}, var); }

  static DiffOp derivative(std::size_t order = 1, Var var = Var::x) {
    std::vector<ScalarExpr> c(order + 1, ScalarExpr(0.0));
    c[order] = ScalarExpr(1.0);
    return DiffOp(std::move(c), var);
  }

  /// -d o w o d, expanded to -w d^2 - w' d.
  static DiffOp divergence_form(const ScalarExpr& w, Var var = Var::x) {
    return DiffOp({ScalarExpr(0.0), -differentiate(w, var), -w}, var);
  }

  Var variable() const { return var_; }

  /// Order of the operator; the zero operator has order 0.
  std::size_t order() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  bool is_zero() const { return coeffs_.empty(); }

  /// Coefficient of d^k (zero beyond the order).
  ScalarExpr coefficient(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : ScalarExpr(0.0); }
  const std::vector<ScalarExpr>& coefficients() const { return coeffs_; }

  /// (A f)(x) as an expression.
  ScalarExpr apply(const ScalarExpr& f) const {
    ScalarExpr result(0.0);
    ScalarExpr dk = f;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) {
      if (k > 0) dk = differentiate(dk, var_);
      result = result + coeffs_[k] * dk;
    }
    return result;
  }

  friend DiffOp operator+(const DiffOp& a, const DiffOp& b) {
    require_same_variable(a, b);
    const std::size_t n = std::max(a.coeffs_.size(), b.coeffs_.size());
    std::vector<ScalarExpr> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = a.coefficient(k) + b.coefficient(k);
    return DiffOp(std::move(c), a.var_);
  }

  friend DiffOp operator-(const DiffOp& a, const DiffOp& b) {
    require_same_variable(a, b);
    const std::size_t n = std::max(a.coeffs_.size(), b.coeffs_.size());
    std::vector<ScalarExpr> c(n);
    for (std::size_t k = 0; k < n; ++k) c[k] = a.coefficient(k) - b.coefficient(k);
    return DiffOp(std::move(c), a.var_);
  }

  /// Left multiplication by a function: (s A) f = s (A f).
  friend DiffOp operator*(const ScalarExpr& s, const DiffOp& a) {
    std::vector<ScalarExpr> c(a.coeffs_.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = s * a.coeffs_[k];
    return DiffOp(std::move(c), a.var_);
  }

  friend DiffOp operator-(const DiffOp& a) { return ScalarExpr(-1.0) * a; }

  static void require_same_variable(const DiffOp& a, const DiffOp& b) {
    if (a.var_ != b.var_) throw VariableMismatch("operators act on different variables");
  }

 private:
  void normalize() {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
  }

  void check_variables() const {
    const unsigned allowed = var_bit(var_);
    for (const auto& c : coeffs_) {
      if (c.variable_mask() & ~allowed) {
        throw VariableMismatch(std::string("coefficient does not depend on '") + var_name(var_) + "' alone");
      }
    }
  }

  std::vector<ScalarExpr> coeffs_;
  Var var_;
};

namespace detail {

inline double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// d^i o (b d^j) = sum_l C(i,l) b^{(i-l)} d^{l+j}, accumulated into `out`.
inline void accumulate_leibniz(std::vector<ScalarExpr>& out, const ScalarExpr& left, std::size_t i,
                               const ScalarExpr& b, std::size_t j, Var var) {
  std::vector<ScalarExpr> derivs{b};
  for (std::size_t k = 1; k <= i; ++k) derivs.push_back(differentiate(derivs.back(), var));
  for (std::size_t l = 0; l <= i; ++l) {
    const ScalarExpr& bd = derivs[i - l];
    if (bd.is_zero()) continue;
    out[l + j] = out[l + j] + binomial(i, l) * (left * bd);
  }
}

}  // namespace detail

/// A o B by Leibniz expansion.
inline DiffOp compose(const DiffOp& a, const DiffOp& b) {
  DiffOp::require_same_variable(a, b);
  if (a.is_zero() || b.is_zero()) return DiffOp(a.variable());
  std::vector<ScalarExpr> out(a.order() + b.order() + 1, ScalarExpr(0.0));
  for (std::size_t i = 0; i <= a.order(); ++i) {
    const ScalarExpr& ai = a.coefficients()[i];
    if (ai.is_zero()) continue;
    for (std::size_t j = 0; j <= b.order(); ++j) {
      const ScalarExpr& bj = b.coefficients()[j];
      if (bj.is_zero()) continue;
      detail::accumulate_leibniz(out, ai, i, bj, j, a.variable());
    }
  }
  return DiffOp(std::move(out), a.variable());
}

/// Formal L2 adjoint for real coefficients: (c d^k)^T = (-1)^k d^k o c.
inline DiffOp formal_adjoint(const DiffOp& a) {
  if (a.is_zero()) return a;
  std::vector<ScalarExpr> out(a.order() + 1, ScalarExpr(0.0));
  for (std::size_t k = 0; k <= a.order(); ++k) {
    const ScalarExpr& c = a.coefficients()[k];
    if (c.is_zero()) continue;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    detail::accumulate_leibniz(out, ScalarExpr(sign), k, c, 0, a.variable());
  }
  return DiffOp(std::move(out), a.variable());
}

inline DiffOp commutator(const DiffOp& a, const DiffOp& b) { return compose(a, b) - compose(b, a); }

/// rho A rho^{-1} where s = (log rho)'. Realized by d -> d - s; rho itself
/// never appears.
inline DiffOp gauge_conjugate(const DiffOp& a, const ScalarExpr& s) {
  const Var v = a.variable();
  const DiffOp shifted({-s, ScalarExpr(1.0)}, v);
  DiffOp power = DiffOp::multiplication(ScalarExpr(1.0), v);
  DiffOp result(v);
  for (std::size_t k = 0; k <= a.order(); ++k) {
    if (k > 0) power = compose(shifted, power);
    const ScalarExpr& c = a.coefficients()[k];
    if (!c.is_zero()) result = result + c * power;
  }
  return result;
}

/// eta = a d/dx + b.
struct FirstOrderOp {
  ScalarExpr a;
  ScalarExpr b;

  DiffOp op(Var var = Var::x) const { return DiffOp({b, a}, var); }
};

/// Coefficient-by-coefficient pointwise comparison of two operators.
inline PointwiseReport compare_pointwise(const DiffOp& a, const DiffOp& b, std::span<const double> samples,
                                         Tolerance tol = {}) {
  DiffOp::require_same_variable(a, b);
  PointwiseReport total;
  const std::size_t n = std::max(a.order(), b.order());
  for (std::size_t k = 0; k <= n; ++k) {
    total.merge(compare_pointwise(a.coefficient(k), b.coefficient(k), samples, tol));
  }
  return total;
}

}  // namespace swankit
