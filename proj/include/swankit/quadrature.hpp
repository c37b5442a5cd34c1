#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>

#include "swankit/expr.hpp"

namespace swankit {

inline constexpr double kQuadratureTolerance = 1e-13;

/// t -> integral of `integrand` from `anchor` to t, computed by adaptive
/// Gauss-Kronrod quadrature. The derivative is the integrand itself.
/// Values are memoized; the cache is guarded so instances can be shared.
class IntegralFunction final : public OpaqueFunction {
 public:
  IntegralFunction(ScalarExpr integrand, Var var, double anchor, std::string name)
      : integrand_(std::move(integrand)), var_(var), anchor_(anchor), name_(std::move(name)) {}

  double value(double t) const override {
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(t); it != cache_.end()) return it->second;
    }
    const double result = integrate(anchor_, t);
    std::lock_guard lock(mutex_);
    cache_.emplace(t, result);
    return result;
  }

  ScalarExpr derivative() const override { return integrand_; }
  Var variable() const override { return var_; }
  std::string name() const override { return name_; }

  double anchor() const { return anchor_; }
  const ScalarExpr& integrand() const { return integrand_; }

  double integrate(double from, double to) const {
    if (from == to) return 0.0;
    return integrate_piece(from, to, 18);
  }

 private:
  // Bisection on top of the fixed 31-point rule. Boost's own adaptive driver
  // mixes scaled and unscaled error terms and stalls on short intervals or
  // vanishing integrals; here the test is against tol * integral of |f|.
  double integrate_piece(double from, double to, int depth) const {
    const double mid = 0.5 * (from + to);
    const double half = 0.5 * (to - from);
    auto f = [&](double s) { return half * evaluate(integrand_, var_, mid + half * s); };
    double error = 0.0;
    double l1 = 0.0;
    const double r = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, -1.0, 1.0, 0, 0.0, &error, &l1);
    if (depth == 0 || error <= kQuadratureTolerance * std::abs(l1)) return r;
    return integrate_piece(from, mid, depth - 1) + integrate_piece(mid, to, depth - 1);
  }

  ScalarExpr integrand_;
  Var var_;
  double anchor_;
  std::string name_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<double, double> cache_;
};

/// Expression node for the integral of `integrand` (in `var`) from `anchor`.
inline ScalarExpr integral_of(ScalarExpr integrand, Var var, double anchor, std::string name = "integral") {
  return ScalarExpr::opaque(std::make_shared<const IntegralFunction>(std::move(integrand), var, anchor, std::move(name)));
}

/// Cumulative trapezoid rule on a uniform grid; result[0] = 0.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& values, double step) {
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t i = 1; i < values.size(); ++i) out[i] = out[i - 1] + 0.5 * step * (values[i] + values[i - 1]);
  return out;
}

}  // namespace swankit
