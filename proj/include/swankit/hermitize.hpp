#pragma once

// Similarity transformation h = rho H rho^{-1} of the Swanson Hamiltonian.
// Only sigma = (log rho)' is ever built; rho itself is left implicit.

#include <cmath>
#include <string>

#include "swankit/errors.hpp"
#include "swankit/expr.hpp"
#include "swankit/opalg.hpp"
#include "swankit/pointwise.hpp"
#include "swankit/swanson.hpp"

namespace swankit {

/// Throws SingularityError if `f` vanishes or changes sign on `domain`
/// (checked on a dense Chebyshev sample).
inline void require_nonvanishing(const ScalarExpr& f, Interval domain, const std::string& what,
                                 std::size_t samples = 401) {
  double first_sign = 0.0;
  for (const double t : chebyshev_points(domain, samples)) {
    const double v = evaluate(f, t);
    if (v == 0.0) throw SingularityError(what + " vanishes at " + std::to_string(t));
    const double s = v > 0.0 ? 1.0 : -1.0;
    if (first_sign == 0.0) {
      first_sign = s;
    } else if (s != first_sign) {
      throw SingularityError(what + " changes sign near " + std::to_string(t));
    }
  }
}

/// sigma = (log rho)' = -b1 / (2 wt a^2).
inline ScalarExpr gauge_log_derivative(const SwansonParams& p, const FirstOrderOp& eta, Interval domain) {
  const double wt = p.omega_tilde();
  if (wt == 0.0) throw ParameterError("omega_tilde must be nonzero");
  require_nonvanishing(eta.a, domain, "a(x)");
  return -swanson_b1(p, eta) / (2.0 * wt * eta.a * eta.a);
}

struct HermitizedModel {
  DiffOp h;
  ScalarExpr sigma;
  ScalarExpr v_eff;
  /// w(x) in the kinetic term -d w d; equals wt a^2.
  ScalarExpr kinetic_weight;
  /// First-order coefficient of h against -w' (divergence form).
  PointwiseReport first_order_residual;
  /// h against its formal adjoint.
  PointwiseReport self_adjoint_check;

  /// -d w d + V_eff rebuilt from the stored pieces.
  DiffOp divergence_form() const {
    return DiffOp::divergence_form(kinetic_weight) + DiffOp::multiplication(v_eff);
  }
};

inline HermitizedModel hermitize(const DiffOp& H, const ScalarExpr& sigma, Interval domain, Tolerance tol = {}) {
  if (H.order() != 2) throw InconsistentInputs("hermitize expects a second-order operator");
  HermitizedModel m;
  m.sigma = sigma;
  m.h = gauge_conjugate(H, sigma);
  m.kinetic_weight = -m.h.coefficient(2);
  m.v_eff = m.h.coefficient(0);
  const auto samples = chebyshev_points(domain);
  m.first_order_residual =
      compare_pointwise(m.h.coefficient(1), -differentiate(m.kinetic_weight, H.variable()), samples, tol);
  if (!m.first_order_residual.passed()) {
    throw InconsistentInputs("gauge function leaves a first-order term (max " +
                             std::to_string(m.first_order_residual.max_abs_diff) + ")");
  }
  m.self_adjoint_check = compare_pointwise(m.h, formal_adjoint(m.h), samples, tol);
  return m;
}

/// Effective potential written directly in terms of a, b and their derivatives.
inline ScalarExpr effective_potential_closed_form(const SwansonParams& p, const FirstOrderOp& eta) {
  const double wt = p.omega_tilde();
  if (wt == 0.0) throw ParameterError("omega_tilde must be nonzero");
  const double dab = p.alpha - p.beta;
  const double dgd = p.gamma - p.delta;
  const double sab = p.alpha + p.beta;
  const ScalarExpr& a = eta.a;
  const ScalarExpr& b = eta.b;
  const ScalarExpr da = differentiate(a, Var::x);
  const ScalarExpr d2a = differentiate(da, Var::x);
  const ScalarExpr db = differentiate(b, Var::x);
  return (dab * dab / wt + wt + 2.0 * sab) * b * (b - da) - (wt + sab) * a * db + 0.5 * sab * a * d2a +
         0.25 * (dab * dab / wt + 2.0 * sab) * da * da + (dab * dgd / wt + p.gamma + p.delta) * (b - 0.5 * da) +
         dgd * dgd / (4.0 * wt) + 0.5 * (wt + sab);
}

}  // namespace swankit
