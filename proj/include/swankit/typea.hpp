#pragma once

// Type A N-fold supersymmetry on top of the PDM picture: the potentials
// V_N^+-, the ansatz b = B0(u) + B2(u) a'(x) with its F-functions, and the
// Riccati/Schroedinger route from a quasi-solvable sector to B0.

#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "swankit/errors.hpp"
#include "swankit/expr.hpp"
#include "swankit/hermitize.hpp"
#include "swankit/opalg.hpp"
#include "swankit/pdm.hpp"
#include "swankit/pointwise.hpp"
#include "swankit/swanson.hpp"

namespace swankit {

enum class FClass { I, II, III, IV, V };

inline const char* fclass_name(FClass c) {
  switch (c) {
    case FClass::I: return "I";
    case FClass::II: return "II";
    case FClass::III: return "III";
    case FClass::IV: return "IV";
    case FClass::V: return "V";
  }
  return "?";
}

inline FClass fclass_from_string(std::string_view s) {
  for (FClass c : {FClass::I, FClass::II, FClass::III, FClass::IV, FClass::V}) {
    if (s == fclass_name(c)) return c;
  }
  throw ParameterError("unknown f class '" + std::string(s) + "' (expected I, II, III, IV or V)");
}

enum class Sign { plus, minus };

inline double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }
inline const char* sign_name(Sign s) { return s == Sign::plus ? "+" : "-"; }

struct TypeAData {
  int N = 1;
  /// Q(z) = q[2] z^2 + q[1] z + q[0]
  std::array<double, 3> q{0.0, 0.0, 0.0};
  double R = 0.0;
  FClass f_class = FClass::I;
  /// Only used by classes III and IV.
  double nu = 1.0;

  int q_degree() const { return q[2] != 0.0 ? 2 : (q[1] != 0.0 ? 1 : 0); }
  bool uses_nu() const { return f_class == FClass::III || f_class == FClass::IV; }
  /// 2 sqrt(nu), the rate inside f for classes III and IV.
  double rate() const { return 2.0 * std::sqrt(nu); }
};

inline void validate(const TypeAData& d) {
  if (d.N < 1) throw ParameterError("N must be a positive integer");
  if (d.f_class == FClass::V) {
    throw UnsupportedClass("class V (Weierstrass elliptic f) is not implemented; f_class_eval is where it would plug in");
  }
  if (d.uses_nu() && !(d.nu > 0.0)) throw ParameterError("nu must be positive for classes III and IV");
}

/// Horner evaluation of sum c[k] z^k.
inline ScalarExpr polynomial(std::span<const double> c, const ScalarExpr& z) {
  if (c.empty()) return ScalarExpr(0.0);
  ScalarExpr r(c.back());
  for (std::size_t k = c.size() - 1; k-- > 0;) r = r * z + c[k];
  return r;
}

inline std::vector<double> polynomial_derivative(std::span<const double> c) {
  std::vector<double> out;
  for (std::size_t k = 1; k < c.size(); ++k) out.push_back(static_cast<double>(k) * c[k]);
  return out;
}

struct FClassFunctions {
  ScalarExpr f, df, d2f, d3f;
};

inline FClassFunctions f_class_eval(const TypeAData& d) {
  validate(d);
  const ScalarExpr u = ScalarExpr::variable(Var::u);
  FClassFunctions out;
  switch (d.f_class) {
    case FClass::I: out.f = u; break;
    case FClass::II: out.f = u * u; break;
    case FClass::III: out.f = exp(d.rate() * u); break;
    case FClass::IV: out.f = cosh(d.rate() * u); break;
    case FClass::V: break;
  }
  out.df = differentiate(out.f, Var::u);
  out.d2f = differentiate(out.df, Var::u);
  out.d3f = differentiate(out.d2f, Var::u);
  return out;
}

/// Q(f(u)) and Q'(f(u)).
inline std::pair<ScalarExpr, ScalarExpr> q_of_f(const TypeAData& d, const ScalarExpr& f) {
  return {polynomial(d.q, f), polynomial(polynomial_derivative(d.q), f)};
}

/// V_N^+- = Q^2/2f'^2 - (N^2-1)/24 (2f'''/f' - 3f''^2/f'^2) +- (N/2)(f''Q/f'^2 - Q') - R.
inline ScalarExpr typea_potential(const TypeAData& d, Sign sign) {
  const FClassFunctions F = f_class_eval(d);
  const auto [Q, dQ] = q_of_f(d, F.f);
  const double n = d.N;
  const ScalarExpr df2 = F.df * F.df;
  const ScalarExpr schwarz = 2.0 * F.d3f / F.df - 3.0 * F.d2f * F.d2f / df2;
  return Q * Q / (2.0 * df2) - (n * n - 1.0) / 24.0 * schwarz +
         sign_value(sign) * (n / 2.0) * (F.d2f * Q / df2 - dQ) - d.R;
}

/// Throws SingularityError when f' vanishes on `domain`.
inline void require_regular(const TypeAData& d, Interval domain) {
  const FClassFunctions F = f_class_eval(d);
  if (F.df.is_constant()) return;
  require_nonvanishing(F.df, domain, "f'(u) for class " + std::string(fclass_name(d.f_class)));
}

inline ScalarExpr typea_potential(const TypeAData& d, Sign sign, Interval domain) {
  require_regular(d, domain);
  return typea_potential(d, sign);
}

/// Sampling window for the invariance fit: a region where the basis f^k is
/// well conditioned and f' stays away from zero.
inline Interval fit_window(const TypeAData& d) {
  switch (d.f_class) {
    case FClass::I: return {-1.5, 1.5};
    case FClass::II: return {0.3, 1.5};
    case FClass::III: return {-1.0 / d.rate(), 1.0 / d.rate()};
    case FClass::IV: return {0.3 / d.rate(), 1.5 / d.rate()};
    case FClass::V: break;
  }
  throw UnsupportedClass("class V has no fit window");
}

inline constexpr double kClassEdgeFraction = 1e-3;

/// [-L, L] for classes I and III, [eps L, L] for II and IV (f' = 0 at u = 0).
/// L defaults to 6/sqrt(max(1, nu)).
inline Interval default_domain(const TypeAData& d, std::optional<double> L = {}) {
  validate(d);
  const double len = L.value_or(6.0 / std::sqrt(std::max(1.0, d.uses_nu() ? d.nu : 1.0)));
  if (!(len > 0.0)) throw ParameterError("domain half-length must be positive");
  if (d.f_class == FClass::II || d.f_class == FClass::IV) return {kClassEdgeFraction * len, len};
  return {-len, len};
}

// ---------------------------------------------------------------------------
// Invariant polynomial sectors

/// W_N' = Q(f)/f' + c f''/f'.
inline ScalarExpr superpotential_derivative(const TypeAData& d, double c) {
  const FClassFunctions F = f_class_eval(d);
  return q_of_f(d, F.f).first / F.df + c * F.d2f / F.df;
}

struct InvarianceResult {
  Sign sign = Sign::plus;
  double c = 0.0;
  ScalarExpr w_prime;
  /// (-1/2 d^2 + V)(f^k e^{-W}) = sum_j M(j, k) f^j e^{-W} + remainder
  Eigen::MatrixXd M;
  double remainder = 0.0;
  bool invariant = false;
  Interval window;
  std::size_t samples = 0;
};

inline constexpr double kMatrixNoiseFloor = 1e-10;

inline InvarianceResult invariance_matrix(const TypeAData& d, Sign sign, double c, double tol = 1e-9,
                                          std::optional<Interval> window = {}) {
  const FClassFunctions F = f_class_eval(d);
  const ScalarExpr V = typea_potential(d, sign);
  const ScalarExpr wp = superpotential_derivative(d, c);
  const ScalarExpr dwp = differentiate(wp, Var::u);
  const int n = d.N;

  InvarianceResult out;
  out.sign = sign;
  out.c = c;
  out.w_prime = wp;
  Interval win = window.value_or(fit_window(d));
  std::size_t m = static_cast<std::size_t>(std::max(16, 4 * n));

  for (int attempt = 0; attempt < 4; ++attempt) {
    const auto pts = chebyshev_points(win, m);
    Eigen::MatrixXd A(m, n);
    Eigen::MatrixXd Y(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      const double t = pts[i];
      const double f = evaluate(F.f, Var::u, t);
      const double f1 = evaluate(F.df, Var::u, t);
      const double f2 = evaluate(F.d2f, Var::u, t);
      const double w1 = evaluate(wp, Var::u, t);
      const double w2 = evaluate(dwp, Var::u, t);
      const double v = evaluate(V, Var::u, t);
      for (int k = 0; k < n; ++k) {
        // g = f^k and its first two derivatives
        const double g = std::pow(f, k);
        const double g1 = k == 0 ? 0.0 : k * std::pow(f, k - 1) * f1;
        const double g2 = k == 0 ? 0.0 : (k == 1 ? f2 : k * (k - 1) * std::pow(f, k - 2) * f1 * f1 + k * std::pow(f, k - 1) * f2);
        A(i, k) = g;
        Y(i, k) = -0.5 * (g2 - 2.0 * w1 * g1 + (w1 * w1 - w2) * g) + v * g;
      }
    }
    Eigen::VectorXd scale = A.cwiseAbs().colwise().maxCoeff().transpose();
    for (int k = 0; k < n; ++k) scale(k) = scale(k) > 0.0 ? 1.0 / scale(k) : 1.0;
    const Eigen::MatrixXd As = A * scale.asDiagonal();
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
    if (qr.rank() < n) {
      // resample: more points on a wider window
      m *= 2;
      win = {win.mid() - 0.75 * win.width(), win.mid() + 0.75 * win.width()};
      if (d.f_class == FClass::II || d.f_class == FClass::IV) win.lo = std::max(win.lo, 0.5 * fit_window(d).lo);
      continue;
    }
    out.M = scale.asDiagonal() * qr.solve(Y);
    // fit noise on structurally zero entries would be amplified by f^k later
    const double floor = kMatrixNoiseFloor * std::max(1.0, out.M.cwiseAbs().maxCoeff());
    out.M = out.M.unaryExpr([floor](double v) { return std::abs(v) < floor ? 0.0 : v; });
    const Eigen::MatrixXd res = A * out.M - Y;
    out.remainder = 0.0;
    for (int k = 0; k < n; ++k) {
      const double ref = std::max(1.0, Y.col(k).cwiseAbs().maxCoeff());
      out.remainder = std::max(out.remainder, res.col(k).cwiseAbs().maxCoeff() / ref);
    }
    out.invariant = out.remainder < tol;
    out.window = win;
    out.samples = m;
    return out;
  }
  throw InconsistentInputs("invariance fit stays rank deficient after resampling");
}

struct SectorSearch {
  InvarianceResult best;
  std::vector<InvarianceResult> candidates;
  bool found = false;

  std::string report() const {
    std::ostringstream os;
    os.precision(3);
    for (const auto& c : candidates) {
      os << "sign " << sign_name(c.sign) << " c " << c.c << ": remainder " << std::scientific << c.remainder
         << std::defaultfloat << (c.invariant ? " (invariant)" : "") << '\n';
    }
    return os.str();
  }
};

/// Tries W' = Q/f' + c f''/f' with c in {(N-1)/2, 0, -(N-1)/2}, on V_N^+
/// and then on V_N^-. The first invariant candidate wins; otherwise the one
/// with the smallest remainder is kept and `found` stays false.
inline SectorSearch find_sector(const TypeAData& d, double tol = 1e-9) {
  SectorSearch s;
  const double h = 0.5 * (d.N - 1);
  std::vector<double> cs{h};
  if (h != 0.0) {
    cs.push_back(0.0);
    cs.push_back(-h);
  }
  for (Sign sign : {Sign::plus, Sign::minus}) {
    for (double c : cs) s.candidates.push_back(invariance_matrix(d, sign, c, tol));
  }
  auto it = std::find_if(s.candidates.begin(), s.candidates.end(), [](const auto& c) { return c.invariant; });
  if (it != s.candidates.end()) {
    s.best = *it;
    s.found = true;
  } else {
    s.best = *std::min_element(s.candidates.begin(), s.candidates.end(),
                               [](const auto& a, const auto& b) { return a.remainder < b.remainder; });
  }
  return s;
}

struct SectorSpectrum {
  /// Ascending.
  std::vector<double> real_eigenvalues;
  /// P coefficients (ascending powers of f), largest entry scaled to +1.
  std::vector<std::vector<double>> polynomials;
  std::vector<std::complex<double>> complex_eigenvalues;
};

/// `basis_scale` is a typical |f| on the working domain; eigenvectors are
/// computed for the balanced basis (f/basis_scale)^k.
inline SectorSpectrum sector_spectrum(const Eigen::MatrixXd& M, double imag_tol = 1e-9, double basis_scale = 1.0) {
  const Eigen::Index n = M.rows();
  Eigen::VectorXd S(n);
  for (Eigen::Index k = 0; k < n; ++k) S(k) = std::pow(basis_scale, static_cast<double>(k));
  const Eigen::MatrixXd balanced = S.asDiagonal() * M * S.cwiseInverse().asDiagonal();
  const Eigen::EigenSolver<Eigen::MatrixXd> es(balanced);
  const auto& values = es.eigenvalues();
  const Eigen::MatrixXcd vectors = S.cwiseInverse().asDiagonal() * es.eigenvectors();
  std::vector<std::pair<double, std::vector<double>>> real;
  SectorSpectrum out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const std::complex<double> l = values(i);
    if (std::abs(l.imag()) > imag_tol * std::max(1.0, std::abs(l))) {
      out.complex_eigenvalues.push_back(l);
      continue;
    }
    std::vector<double> p(vectors.rows());
    Eigen::Index big = 0;
    for (Eigen::Index k = 0; k < vectors.rows(); ++k) {
      p[k] = vectors(k, i).real();
      if (std::abs(p[k]) > std::abs(p[big])) big = k;
    }
    const double norm = p[big];
    for (double& v : p) v /= norm;
    real.emplace_back(l.real(), std::move(p));
  }
  std::sort(real.begin(), real.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [e, p] : real) {
    out.real_eigenvalues.push_back(e);
    out.polynomials.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generalized ansatz and the F-functions

/// u(x) for a given a(x) > 0: m = 1/(2 wt a^2), u = integral of sqrt(m).
inline ChangeOfVariable change_of_variable_for(const ScalarExpr& a, const SwansonParams& p, Interval domain,
                                               double x0) {
  for (const double t : chebyshev_points(domain, 201)) {
    if (!(evaluate(a, t) > 0.0)) throw ParameterError("the u(x) map needs a(x) > 0 on the domain");
  }
  return ChangeOfVariable(mass_from_a(a, p, domain), x0);
}

struct GeneralizedAnsatz {
  ScalarExpr B0;
  ScalarExpr B2 = ScalarExpr(0.5);

  /// b(x) = B0(u(x)) + B2(u(x)) a'(x)
  ScalarExpr b(const ScalarExpr& a, const ChangeOfVariable& cv) const {
    return cv.compose(B0) + cv.compose(B2) * differentiate(a, Var::x);
  }
};

struct FConditions {
  ScalarExpr F0, F1, F2, F3;
};

inline FConditions F_functions(const SwansonParams& p, const ScalarExpr& B0, const ScalarExpr& B2) {
  const DerivedConstants c = derive_constants(p);
  // coefficient of B0' is -(wt + alpha + beta)/sqrt(2 wt) = a3
  const double k = c.require_a3();
  const double sab = p.alpha + p.beta;
  FConditions F;
  F.F0 = c.a1 * B0 * B0 + c.a2 * B0 + k * differentiate(B0, Var::u) + c.lambda + 0.5 * (c.omega_tilde + sab);
  F.F1 = (c.a1 * B0 + 0.5 * c.a2) * (2.0 * B2 - 1.0) + k * differentiate(B2, Var::u);
  F.F2 = -(c.omega_tilde + sab) * B2 + 0.5 * sab;
  F.F3 = c.a1 * (B2 * B2 - B2 + 0.25) - 0.25 * c.omega_tilde;
  return F;
}

struct NecessaryConditionReport {
  PointwiseReport f1;
  PointwiseReport two_f2;
  PointwiseReport four_f3;
  bool holds() const { return f1.passed() && two_f2.passed() && four_f3.passed(); }
};

/// F1 = 0, 2 F2 = 4 F3 = -wt on `samples`.
inline NecessaryConditionReport verify_necessary_condition(const FConditions& F, double omega_tilde,
                                                           std::span<const double> samples,
                                                           Tolerance tol = {1e-12, 1e-12}) {
  NecessaryConditionReport r;
  r.f1 = compare_pointwise(F.F1, ScalarExpr(0.0), samples, tol);
  r.two_f2 = compare_pointwise(2.0 * F.F2, ScalarExpr(-omega_tilde), samples, tol);
  r.four_f3 = compare_pointwise(4.0 * F.F3, ScalarExpr(-omega_tilde), samples, tol);
  return r;
}

/// F0(u) + F1(u) a' + F2(u) a a'' + F3(u) a'^2 as a function of x.
inline ScalarExpr decomposed_effective_potential(const FConditions& F, const ScalarExpr& a,
                                                 const ChangeOfVariable& cv) {
  const ScalarExpr da = differentiate(a, Var::x);
  const ScalarExpr d2a = differentiate(da, Var::x);
  return cv.compose(F.F0) + cv.compose(F.F1) * da + cv.compose(F.F2) * a * d2a + cv.compose(F.F3) * da * da;
}

/// [eta, eta^T] for b = B0(u) + a'/2 against sqrt(2/wt) B0'(u).
inline PointwiseReport generalized_commutator_check(const SwansonParams& p, const ScalarExpr& a, const ScalarExpr& B0,
                                                    const ChangeOfVariable& cv, std::span<const double> samples,
                                                    Tolerance tol = {1e-9, 1e-9}) {
  const DiffOp eta = FirstOrderOp{a, GeneralizedAnsatz{B0}.b(a, cv)}.op();
  const DiffOp comm = commutator(eta, formal_adjoint(eta));
  const ScalarExpr expected = std::sqrt(2.0 / p.omega_tilde()) * cv.compose(differentiate(B0, Var::u));
  return compare_pointwise(comm, DiffOp::multiplication(expected), samples, tol);
}

/// F0(u) - V_N(u) with F0 = a1 B0^2 + a2 B0 + a3 B0' + a4.
inline ScalarExpr nfold_condition_residual(const SwansonParams& p, const ScalarExpr& B0, const TypeAData& d,
                                           Sign sign) {
  return F_functions(p, B0, ScalarExpr(0.5)).F0 - typea_potential(d, sign);
}

// ---------------------------------------------------------------------------
// Riccati chain

/// The zero-energy problem [-1/2 d^2 + multiplier V + shift] psihat = 0 and
/// the substitutions leading to it:
///   B0 = phi/a3,  phi = a3^2 psi'/(a1 psi),  psi = exp(-a2 u/(2 a3)) psihat.
/// psi and psihat enter only through logarithmic derivatives y = psi'/psi and
/// yh = psihat'/psihat.
struct SchrodingerReduction {
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
  /// a1/(2 a3^2)
  double multiplier = 1.0;
  /// -a1 a4/(2 a3^2) + a2^2/(8 a3^2)
  double shift = 0.0;
  /// alpha beta = 0, i.e. a1 = 2 a3^2.
  bool unit_multiplier = false;
  std::string diagnostic;
  ScalarExpr V;
  ScalarExpr potential;

  ScalarExpr phi_from_b0(const ScalarExpr& B0) const { return a3 * B0; }
  ScalarExpr b0_from_phi(const ScalarExpr& phi) const { return phi / a3; }
  ScalarExpr psi_logd_from_phi(const ScalarExpr& phi) const { return (a1 / (a3 * a3)) * phi; }
  ScalarExpr phi_from_psi_logd(const ScalarExpr& y) const { return (a3 * a3 / a1) * y; }
  ScalarExpr psihat_logd_from_psi_logd(const ScalarExpr& y) const { return y + a2 / (2.0 * a3); }
  ScalarExpr psi_logd_from_psihat_logd(const ScalarExpr& yh) const { return yh - a2 / (2.0 * a3); }
  ScalarExpr b0_from_psihat_logd(const ScalarExpr& yh) const { return (a3 / a1) * yh - a2 / (2.0 * a1); }

  /// phi' + (a1/a3^2) phi^2 + (a2/a3) phi - V + a4
  ScalarExpr riccati_residual(const ScalarExpr& phi) const {
    return differentiate(phi, Var::u) + (a1 / (a3 * a3)) * phi * phi + (a2 / a3) * phi - V + a4;
  }
  /// psi''/psi + (a2/a3) psi'/psi + (a1/a3^2)(a4 - V), written through y
  ScalarExpr linear_residual(const ScalarExpr& y) const {
    return differentiate(y, Var::u) + y * y + (a2 / a3) * y + (a1 / (a3 * a3)) * (a4 - V);
  }
  /// -1/2 psihat''/psihat + potential, written through yh
  ScalarExpr schrodinger_residual(const ScalarExpr& yh) const {
    return -0.5 * (differentiate(yh, Var::u) + yh * yh) + potential;
  }
};

inline SchrodingerReduction schrodinger_reduction(const SwansonParams& p, const TypeAData& d, Sign sign) {
  const DerivedConstants c = derive_constants(p);
  SchrodingerReduction r;
  r.a1 = c.a1;
  r.a2 = c.a2;
  r.a3 = c.require_a3();
  r.a4 = c.require_a4();
  if (r.a3 == 0.0) throw ParameterError("a3 = 0 (omega = 0): the Riccati reduction is undefined");
  r.multiplier = r.a1 / (2.0 * r.a3 * r.a3);
  r.shift = -r.a1 * r.a4 / (2.0 * r.a3 * r.a3) + r.a2 * r.a2 / (8.0 * r.a3 * r.a3);
  r.unit_multiplier = p.alpha * p.beta == 0.0;
  if (!r.unit_multiplier) {
    std::ostringstream os;
    os << "alpha*beta != 0: the potential is rescaled by " << r.multiplier << "; ";
    os << (d.q_degree() == 2 ? "with deg Q = 2 this breaks quasi-solvability"
                              : "with deg Q <= 1 solvability survives a rescaling of u");
    r.diagnostic = os.str();
  }
  r.V = typea_potential(d, sign);
  r.potential = r.multiplier * r.V + r.shift;
  return r;
}

// ---------------------------------------------------------------------------
// Quasi-solvable B0

struct SolveOptions {
  std::optional<Interval> domain;
  double tol = 1e-8;
  std::size_t samples = 401;
  double invariance_tol = 1e-9;
};

struct NfoldSolution {
  /// Input data with R replaced by the tuned value.
  TypeAData data;
  Sign sign = Sign::plus;
  double c = 0.0;
  ScalarExpr w_prime;
  /// Sector eigenvalue at R = 0.
  double energy = 0.0;
  std::vector<double> polynomial;
  /// psihat'/psihat = f' P'(f)/P(f) - W'
  ScalarExpr psihat_logd;
  ScalarExpr B0;
  std::vector<double> poles;
  Interval domain;
  /// max |F0 - V| / max(1, |V|) over samples away from poles.
  double residual = 0.0;
  double residual_point = 0.0;
  bool ok = false;
  std::vector<double> real_eigenvalues;
  std::vector<std::complex<double>> complex_eigenvalues;
  SectorSearch search;
  std::string diagnostics;
};

/// Zeros of g on `domain` located by sign changes on a uniform scan.
inline std::vector<double> scan_zeros(const ScalarExpr& g, Interval domain, std::size_t n = 2001) {
  std::vector<double> zeros;
  const auto pts = uniform_points(domain, n);
  double prev = evaluate(g, Var::u, pts[0]);
  if (prev == 0.0) zeros.push_back(pts[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double cur = evaluate(g, Var::u, pts[i]);
    if (cur == 0.0) {
      zeros.push_back(pts[i]);
    } else if (prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
      std::uintmax_t iters = 200;
      auto f = [&](double t) { return evaluate(g, Var::u, t); };
      const auto [lo, hi] = boost::math::tools::toms748_solve(f, pts[i - 1], pts[i], prev, cur,
                                                              boost::math::tools::eps_tolerance<double>(52), iters);
      zeros.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }
  return zeros;
}

inline NfoldSolution solve_nfold_b0(const SwansonParams& p, const TypeAData& d, int j, SolveOptions opt = {}) {
  validate(d);
  if (p.alpha * p.beta != 0.0) {
    throw ParameterError("solve_nfold_b0 needs alpha*beta = 0 (a1 = 2 a3^2); otherwise the rescaled potential is not "
                         "of type A");
  }
  if (j < 0 || j >= d.N) throw ParameterError("solution index must lie in [0, N)");
  if (!(p.omega_tilde() > 0.0)) throw ParameterError("solve_nfold_b0 needs omega_tilde > 0");

  NfoldSolution out;
  out.domain = opt.domain.value_or(default_domain(d));
  require_regular(d, out.domain);

  TypeAData d0 = d;
  d0.R = 0.0;
  out.search = find_sector(d0, opt.invariance_tol);
  if (!out.search.found) {
    throw InconsistentInputs("no invariant polynomial sector among the candidate superpotentials:\n" +
                             out.search.report());
  }
  const InvarianceResult& sector = out.search.best;
  out.sign = sector.sign;
  out.c = sector.c;
  out.w_prime = sector.w_prime;

  double f_scale = 1.0;
  {
    const ScalarExpr f = f_class_eval(d).f;
    for (const double t : {out.domain.lo, out.domain.hi}) f_scale = std::max(f_scale, std::abs(evaluate(f, Var::u, t)));
  }
  const SectorSpectrum spec = sector_spectrum(sector.M, 1e-9, f_scale);
  out.real_eigenvalues = spec.real_eigenvalues;
  out.complex_eigenvalues = spec.complex_eigenvalues;
  std::ostringstream diag;
  if (!spec.complex_eigenvalues.empty()) {
    diag << spec.complex_eigenvalues.size() << " complex eigenvalue(s) of M skipped\n";
  }
  if (j >= static_cast<int>(spec.real_eigenvalues.size())) {
    throw InconsistentInputs("only " + std::to_string(spec.real_eigenvalues.size()) +
                             " real sector eigenvalue(s); index " + std::to_string(j) + " unavailable");
  }
  out.energy = spec.real_eigenvalues[j];
  out.polynomial = spec.polynomials[j];

  const SchrodingerReduction red = schrodinger_reduction(p, d0, out.sign);
  // Zero-energy condition: V shifts by -R, so eps_j - R - a4 + a2^2/(8 a3^2) = 0.
  out.data = d;
  out.data.R = out.energy - red.a4 + red.a2 * red.a2 / (8.0 * red.a3 * red.a3);

  const FClassFunctions F = f_class_eval(d);
  const ScalarExpr P = polynomial(out.polynomial, F.f);
  const ScalarExpr dP = polynomial(polynomial_derivative(out.polynomial), F.f);
  out.psihat_logd = F.df * dP / P - out.w_prime;
  out.B0 = red.b0_from_psihat_logd(out.psihat_logd);

  if (!P.is_constant()) out.poles = scan_zeros(P, out.domain);
  if (!out.poles.empty()) {
    diag << "B0 has pole(s) at u =";
    for (double z : out.poles) diag << ' ' << z;
    diag << " (excluded from the residual)\n";
  }

  const ScalarExpr V = typea_potential(out.data, out.sign);
  const ScalarExpr res = nfold_condition_residual(p, out.B0, out.data, out.sign);
  const double exclusion = 1e-3 * out.domain.width();
  for (const double t : chebyshev_points(out.domain, opt.samples)) {
    if (std::any_of(out.poles.begin(), out.poles.end(), [&](double z) { return std::abs(t - z) < exclusion; })) {
      continue;
    }
    const double r = std::abs(evaluate(res, Var::u, t)) / std::max(1.0, std::abs(evaluate(V, Var::u, t)));
    if (r > out.residual) {
      out.residual = r;
      out.residual_point = t;
    }
  }
  out.ok = out.residual < opt.tol;
  if (!out.ok) diag << "N-fold condition residual " << out.residual << " exceeds " << opt.tol << '\n';
  out.diagnostics = diag.str();
  return out;
}

// ---------------------------------------------------------------------------
// Rescaling V -> r V

struct ScalingResult {
  TypeAData data;
  /// u = s t
  double s = 1.0;
  /// -1/2 d_t^2 + r V(t) = e (-1/2 d_u^2 + V'(u))
  double e = 1.0;
  PointwiseReport check;
};

/// Finds data' of the same class with r V(t) = e V'(s t) pointwise, R' fitted.
inline ScalingResult absorb_scaling(const TypeAData& d, double r, Sign sign, double tol = 1e-9) {
  validate(d);
  if (!(r > 0.0)) throw ParameterError("scale factor r must be positive");
  if (d.q_degree() == 2) {
    throw ParameterError("deg Q = 2: rescaling V -> r V breaks quasi-solvability; only deg Q <= 1 (solvable) cases "
                         "can absorb it into u");
  }
  ScalingResult out;
  out.s = std::pow(r, 0.25);
  out.e = std::sqrt(r);
  const double s = out.s;
  const double sr = out.e;
  const double n = d.N;
  const double pm = sign_value(sign);
  TypeAData nd = d;
  const double q0 = d.q[0];
  const double q1 = d.q[1];

  switch (d.f_class) {
    case FClass::I:
      nd.q[0] = s * q0;
      break;
    case FClass::II: {
      // 1/u^2 coefficient ((q0 +- N)^2 - 1)/8 scales by r
      const double K = (q0 + pm * n) * (q0 + pm * n) - 1.0;
      const double arg = 1.0 + r * K;
      if (arg < 0.0) throw ParameterError("rescaling leaves class II: (q0 +- N)^2 would be negative");
      const double branch = (q0 + pm * n) < 0.0 ? -1.0 : 1.0;
      nd.q[0] = branch * std::sqrt(arg) - pm * n;
      break;
    }
    case FClass::III: {
      nd.nu = d.nu / (s * s);
      if (q0 != 0.0) nd.q[1] = q1 + pm * 2.0 * nd.nu * n * (sr - 1.0);
      break;
    }
    case FClass::IV: {
      // V = (A + B cosh)/sinh^2 + const; A +- B fix X = q1 + q0 and Y = q1 - q0.
      nd.nu = d.nu / (s * s);
      const double g2 = d.rate() * d.rate();
      const double h2 = nd.rate() * nd.rate();
      const double A = (q1 * q1 + q0 * q0) / (2.0 * g2) + (n * n - 1.0) * g2 / 8.0 + pm * 0.5 * n * q1;
      const double B = q1 * q0 / g2 + pm * 0.5 * n * q0;
      auto solve = [&](double target, double original) {
        const double qa = 1.0 / (2.0 * h2);
        const double qb = pm * 0.5 * n;
        const double qc = (n * n - 1.0) * h2 / 8.0 - sr * target;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc < 0.0) throw ParameterError("rescaling leaves class IV: no real Q' reproduces r V");
        const double branch = (original / g2 + qb) < 0.0 ? -1.0 : 1.0;
        return (-qb + branch * std::sqrt(disc)) / (2.0 * qa);
      };
      const double X = solve(A + B, q1 + q0);
      const double Y = solve(A - B, q1 - q0);
      nd.q[1] = 0.5 * (X + Y);
      nd.q[0] = 0.5 * (X - Y);
      break;
    }
    case FClass::V: break;
  }

  const ScalarExpr u = ScalarExpr::variable(Var::u);
  const ScalarExpr target = sr * substitute(typea_potential(d, sign), Var::u, u / s);
  nd.R = 0.0;
  const Interval win = fit_window(nd);
  const double u0 = win.mid();
  nd.R = evaluate(typea_potential(nd, sign), Var::u, u0) - evaluate(target, Var::u, u0);
  out.data = nd;
  out.check = compare_pointwise(typea_potential(nd, sign), target, chebyshev_points(win), {tol, tol});
  if (!out.check.passed()) {
    throw InconsistentInputs("rescaled potential does not match r V (max diff " +
                             std::to_string(out.check.max_abs_diff) + ")");
  }
  return out;
}

}  // namespace swankit
