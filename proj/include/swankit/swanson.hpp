#pragma once

// Extended Swanson oscillator
//   H = omega (eta^T eta + 1/2) + alpha eta^2 + beta (eta^T)^2 + gamma eta + delta eta^T
// with eta = a(x) d/dx + b(x), and the constants derived from its parameters.

#include <cmath>
#include <optional>
#include <string>

#include "swankit/errors.hpp"
#include "swankit/expr.hpp"
#include "swankit/opalg.hpp"

namespace swankit {

struct SwansonParams {
  double omega = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;

  double omega_tilde() const { return omega - alpha - beta; }
  bool hermitian_limit() const { return alpha == beta && gamma == delta; }

  /// Parameter names usable inside DSL expressions of a model.
  ParamMap as_param_map() const {
    return {{"omega", omega}, {"alpha", alpha}, {"beta", beta}, {"gamma", gamma},
            {"delta", delta}, {"omega_tilde", omega_tilde()}};
  }
};

struct DerivedConstants {
  double omega_tilde = 0.0;
  double Omega2 = 0.0;  // omega^2 - 4 alpha beta
  double a1 = 0.0;
  double a2 = 0.0;
  double lambda = 0.0;
  /// a3 and a4 need omega_tilde > 0 (they contain sqrt(2 omega_tilde)).
  std::optional<double> a3;
  std::optional<double> a4;
  std::string diagnostic;

  double require_a3() const {
    if (!a3) throw ParameterError("a3 unavailable: " + diagnostic);
    return *a3;
  }
  double require_a4() const {
    if (!a4) throw ParameterError("a4 unavailable: " + diagnostic);
    return *a4;
  }
};

inline DerivedConstants derive_constants(const SwansonParams& p) {
  const double wt = p.omega_tilde();
  if (wt == 0.0) throw ParameterError("omega_tilde = omega - alpha - beta must be nonzero");
  DerivedConstants c;
  c.omega_tilde = wt;
  c.Omega2 = p.omega * p.omega - 4.0 * p.alpha * p.beta;
  const double dab = p.alpha - p.beta;
  const double dgd = p.gamma - p.delta;
  c.a1 = dab * dab / wt + wt + 2.0 * p.alpha + 2.0 * p.beta;
  c.a2 = dab * dgd / wt + p.gamma + p.delta;
  c.lambda = dgd * dgd / (4.0 * wt);
  if (wt > 0.0) {
    c.a3 = -(wt + p.alpha + p.beta) / std::sqrt(2.0 * wt);
    c.a4 = c.lambda + 0.5 * (wt + p.alpha + p.beta);
  } else {
    c.diagnostic = "omega_tilde < 0: a3 and a4 involve sqrt(2 omega_tilde)";
  }
  return c;
}

/// Parameters together with their eagerly computed constants.
class SwansonModel {
 public:
  explicit SwansonModel(SwansonParams p) : params_(p), constants_(derive_constants(p)) {}

  const SwansonParams& params() const { return params_; }
  const DerivedConstants& constants() const { return constants_; }

  /// omega_tilde > 0 is required for everything touching sqrt(2 omega_tilde).
  void require_positive_omega_tilde() const {
    if (!(constants_.omega_tilde > 0.0)) throw ParameterError("operation requires omega_tilde > 0");
  }

 private:
  SwansonParams params_;
  DerivedConstants constants_;
};

/// The parameter-level PT criterion: both linear terms absent. Exact test.
inline bool is_pt_symmetric(const SwansonParams& p) { return p.gamma == 0.0 && p.delta == 0.0; }

/// H expanded through the operator algebra.
inline DiffOp build_hamiltonian(const SwansonParams& p, const FirstOrderOp& eta) {
  if (eta.a.is_zero()) throw ParameterError("eta: coefficient a(x) is identically zero");
  const DiffOp e = eta.op(Var::x);
  const DiffOp ed = formal_adjoint(e);
  const DiffOp one = DiffOp::multiplication(ScalarExpr(1.0));
  DiffOp h = ScalarExpr(p.omega) * (compose(ed, e) + ScalarExpr(0.5) * one);
  if (p.alpha != 0.0) h = h + ScalarExpr(p.alpha) * compose(e, e);
  if (p.beta != 0.0) h = h + ScalarExpr(p.beta) * compose(ed, ed);
  if (p.gamma != 0.0) h = h + ScalarExpr(p.gamma) * e;
  if (p.delta != 0.0) h = h + ScalarExpr(p.delta) * ed;
  return h;
}

/// First-order coefficient of H in the form -wt d a^2 d + b1 d + c2.
inline ScalarExpr swanson_b1(const SwansonParams& p, const FirstOrderOp& eta) {
  const ScalarExpr& a = eta.a;
  const ScalarExpr& b = eta.b;
  const ScalarExpr da = differentiate(a, Var::x);
  return (p.alpha - p.beta) * a * (2.0 * b - da) + (p.gamma - p.delta) * a;
}

/// Zeroth-order coefficient of H in the form -wt d a^2 d + b1 d + c2.
inline ScalarExpr swanson_c2(const SwansonParams& p, const FirstOrderOp& eta) {
  const double wt = p.omega_tilde();
  const ScalarExpr& a = eta.a;
  const ScalarExpr& b = eta.b;
  const ScalarExpr da = differentiate(a, Var::x);
  const ScalarExpr d2a = differentiate(da, Var::x);
  const ScalarExpr db = differentiate(b, Var::x);
  return (wt + 2.0 * p.alpha + 2.0 * p.beta) * b * b - (wt + p.alpha + 3.0 * p.beta) * da * b -
         (wt + 2.0 * p.beta) * a * db + p.beta * (a * d2a + da * da) + (p.gamma + p.delta) * b - p.delta * da +
         0.5 * (wt + p.alpha + p.beta);
}

/// -wt d a^2 d + b1 d + c2 in left-normal form (closed-form route).
inline DiffOp closed_form_hamiltonian(const SwansonParams& p, const FirstOrderOp& eta) {
  const double wt = p.omega_tilde();
  const DiffOp kinetic = DiffOp::divergence_form(wt * eta.a * eta.a);
  return kinetic + DiffOp({swanson_c2(p, eta), swanson_b1(p, eta)});
}

}  // namespace swankit
