#pragma once

// Constant-commutator branch and the position-dependent-mass picture:
//   a(x) = 1 / sqrt(2 wt m(x)),   u(x) = integral of sqrt(m).

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "swankit/errors.hpp"
#include "swankit/expr.hpp"
#include "swankit/hermitize.hpp"
#include "swankit/opalg.hpp"
#include "swankit/pointwise.hpp"
#include "swankit/quadrature.hpp"
#include "swankit/swanson.hpp"

namespace swankit {

/// Integral of 1/(2a) from x0, as a quadrature-backed expression in x.
inline ScalarExpr half_inverse_integral(const ScalarExpr& a, double x0) {
  return integral_of(1.0 / (2.0 * a), Var::x, x0, "int_half_inv_a");
}

/// b = integral of dx/(2a) + a'/2, which makes [eta, eta^T] = 1.
/// The integration constant is fixed by anchoring the integral at x0.
inline ScalarExpr b_constant_commutator(const ScalarExpr& a, double x0, Interval domain) {
  require_nonvanishing(a, domain, "a(x)");
  return half_inverse_integral(a, x0) + 0.5 * differentiate(a, Var::x);
}

/// Effective potential of the constant-commutator branch written through
/// I(x) = integral of dx/(2a):  a1 I^2 + a2 I - (wt/4)(2 a a'' + a'^2) + lambda.
inline ScalarExpr effective_potential_constant_commutator(const SwansonParams& p, const ScalarExpr& a,
                                                          const ScalarExpr& integral) {
  const DerivedConstants c = derive_constants(p);
  const ScalarExpr da = differentiate(a, Var::x);
  const ScalarExpr d2a = differentiate(da, Var::x);
  return c.a1 * integral * integral + c.a2 * integral - 0.25 * c.omega_tilde * (2.0 * a * d2a + da * da) +
         c.lambda;
}

struct MassProfile {
  ScalarExpr m;
  ScalarExpr dm;
  ScalarExpr d2m;
  Interval domain;

  /// Validates positivity of m on `domain` and differentiates it twice.
  static MassProfile from_expr(ScalarExpr m, Interval domain) {
    for (const double t : chebyshev_points(domain, 401)) {
      if (!(evaluate(m, t) > 0.0)) throw SingularityError("mass m(x) is not positive at " + std::to_string(t));
    }
    MassProfile out;
    out.dm = differentiate(m, Var::x);
    out.d2m = differentiate(out.dm, Var::x);
    out.m = std::move(m);
    out.domain = domain;
    return out;
  }
};

inline void require_positive_omega_tilde(const SwansonParams& p) {
  if (!(p.omega_tilde() > 0.0)) throw ParameterError("the PDM map needs omega_tilde > 0");
}

/// m = 1 / (2 wt a^2).
inline MassProfile mass_from_a(const ScalarExpr& a, const SwansonParams& p, Interval domain) {
  require_positive_omega_tilde(p);
  require_nonvanishing(a, domain, "a(x)");
  return MassProfile::from_expr(1.0 / (2.0 * p.omega_tilde() * a * a), domain);
}

/// a = 1 / sqrt(2 wt m).
inline ScalarExpr a_from_mass(const MassProfile& m, const SwansonParams& p) {
  require_positive_omega_tilde(p);
  return 1.0 / sqrt(2.0 * p.omega_tilde() * m.m);
}

/// u(x) = integral of sqrt(m) from x0, with a root-finding inverse.
class ChangeOfVariable {
 public:
  ChangeOfVariable(const MassProfile& m, double x0)
      : du_dx_(sqrt(m.m)), u_of_x_(integral_of(du_dx_, Var::x, x0, "u")), domain_(m.domain), x0_(x0) {
    if (!domain_.contains(x0)) throw ParameterError("anchor x0 lies outside the mass domain");
  }

  const ScalarExpr& u_of_x() const { return u_of_x_; }
  const ScalarExpr& du_dx() const { return du_dx_; }
  Interval domain() const { return domain_; }
  double anchor() const { return x0_; }

  double u(double x) const { return evaluate(u_of_x_, x); }

  Interval u_range() const { return {u(domain_.lo), u(domain_.hi)}; }

  /// Inverse map by safeguarded Newton iteration inside the domain bracket.
  double x_of_u(double target) const {
    const Interval range = u_range();
    if (target < range.lo || target > range.hi) {
      throw DomainError("u = " + std::to_string(target) + " is outside the image of the domain");
    }
    auto f = [&](double x) { return std::make_pair(u(x) - target, evaluate(du_dx_, x)); };
    // Linear interpolation in the bracket gives a starting guess.
    const double t = (target - range.lo) / (range.hi - range.lo);
    const double guess = domain_.lo + t * domain_.width();
    return boost::math::tools::newton_raphson_iterate(f, guess, domain_.lo, domain_.hi,
                                                      std::numeric_limits<double>::digits - 4);
  }

  /// Composes a function of u with u(x), giving a function of x.
  ScalarExpr compose(const ScalarExpr& g_of_u) const { return substitute(g_of_u, Var::u, u_of_x_); }

 private:
  ScalarExpr du_dx_;
  ScalarExpr u_of_x_;
  Interval domain_;
  double x0_;
};

struct PdmHamiltonian {
  DiffOp h;
  /// (wt/2) a1 u^2 + sqrt(wt/2) a2 u + m''/8m^2 - 7m'^2/32m^3 + lambda
  ScalarExpr potential;
  /// m''/8m^2 - 7m'^2/32m^3 on its own.
  ScalarExpr mass_correction;
  /// Hermitized Swanson operator with b from the constant-commutator branch.
  HermitizedModel reference;
  /// h against reference.h.
  PointwiseReport agreement;
};

inline ScalarExpr pdm_mass_correction(const MassProfile& m) {
  return m.d2m / (8.0 * m.m * m.m) - 7.0 * m.dm * m.dm / (32.0 * m.m * m.m * m.m);
}

inline PdmHamiltonian pdm_hamiltonian(const SwansonParams& p, const MassProfile& m, const ChangeOfVariable& cv,
                                      Tolerance tol = {1e-9, 1e-9}) {
  require_positive_omega_tilde(p);
  const DerivedConstants c = derive_constants(p);
  const double wt = c.omega_tilde;
  const ScalarExpr& u = cv.u_of_x();

  PdmHamiltonian out;
  out.mass_correction = pdm_mass_correction(m);
  out.potential = 0.5 * wt * c.a1 * u * u + std::sqrt(0.5 * wt) * c.a2 * u + out.mass_correction + c.lambda;
  out.h = DiffOp::divergence_form(1.0 / (2.0 * m.m)) + DiffOp::multiplication(out.potential);

  const ScalarExpr a = a_from_mass(m, p);
  const FirstOrderOp eta{a, b_constant_commutator(a, cv.anchor(), m.domain)};
  const DiffOp H = build_hamiltonian(p, eta);
  out.reference = hermitize(H, gauge_log_derivative(p, eta, m.domain), m.domain);
  out.agreement = compare_pointwise(out.h, out.reference.h, chebyshev_points(m.domain), tol);
  return out;
}

}  // namespace swankit
