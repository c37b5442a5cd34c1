#pragma once

// The ten end-to-end checks run by `swankit verify` and by the acceptance
// test binary. Each returns PASS/FAIL plus the measured numbers.

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "swankit/hermitize.hpp"
#include "swankit/pdm.hpp"
#include "swankit/spectral.hpp"
#include "swankit/swanson.hpp"
#include "swankit/typea.hpp"

namespace swankit {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  /// wall-clock budget; exceeding it fails the criterion
  double budget = 0.0;
};

namespace acceptance {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline SwansonParams random_params(Rng& rng) {
  for (;;) {
    SwansonParams p{uniform(rng, 0.5, 4.0), uniform(rng, -0.6, 0.9), uniform(rng, -0.6, 0.9), uniform(rng, -1.0, 1.0),
                    uniform(rng, -1.0, 1.0)};
    if (p.omega_tilde() > 0.2) return p;
  }
}

inline ScalarExpr random_positive(Rng& rng) {
  const ScalarExpr x = ScalarExpr::variable(Var::x);
  const double s = uniform(rng, 0.3, 1.5), c = uniform(rng, -1.5, 1.5), d = uniform(rng, -2.0, 2.0);
  return s * (1.2 + 0.5 * tanh(c * x) + 0.3 * cos(d * x));
}

inline ScalarExpr random_b(Rng& rng) {
  const ScalarExpr x = ScalarExpr::variable(Var::x);
  return uniform(rng, -1, 1) + uniform(rng, -1, 1) * x + uniform(rng, -0.5, 0.5) * sin(uniform(rng, 0.5, 2.0) * x);
}

/// Collects measured worst cases and the pass flag.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    if (!ok) {
      passed_ = false;
      if (failures_++ < 3) notes_ << "failed: " << what << "; ";
    }
  }
  void worst(const std::string& name, double value, double tol) {
    auto& [v, t] = worst_[name];
    v = std::max(v, value);
    t = tol;
    check(value < tol, name + " = " + fmt(value) + " (tol " + fmt(tol) + ")");
  }
  /// Pointwise report judged by its own abs + rel tolerance.
  void report(const std::string& name, const PointwiseReport& r, double tol) {
    auto& [v, t] = worst_[name];
    v = std::max(v, r.max_abs_diff);
    t = tol;
    check(r.passed(), name + " = " + fmt(r.max_abs_diff) + " at " + fmt(r.worst_point));
  }
  void note(const std::string& s) { notes_ << s << "; "; }
  bool passed() const { return passed_; }
  std::string detail() const {
    std::ostringstream os;
    for (const auto& [name, vt] : worst_) os << name << " " << fmt(vt.first) << " < " << fmt(vt.second) << "; ";
    os << notes_.str();
    std::string s = os.str();
    while (!s.empty() && (s.back() == ' ' || s.back() == ';')) s.pop_back();
    return s;
  }
  static std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << v;
    return os.str();
  }

 private:
  bool passed_ = true;
  int failures_ = 0;
  std::map<std::string, std::pair<double, double>> worst_;
  std::ostringstream notes_;
};

inline const ScalarExpr& xvar() {
  static const ScalarExpr x = ScalarExpr::variable(Var::x);
  return x;
}
inline const ScalarExpr& uvar() {
  static const ScalarExpr u = ScalarExpr::variable(Var::u);
  return u;
}

inline constexpr SwansonParams kReference{2.0, 0.5, 0.25, 1.0, 0.0};
inline constexpr SwansonParams kOneSided{2.0, 0.0, 0.5, 0.0, 0.0};
inline constexpr Interval kDomain{-2.0, 2.0};

inline FirstOrderOp harmonic_eta() {
  const double r = 1.0 / std::sqrt(2.0);
  return {ScalarExpr(r), r * xvar()};
}

inline void expansion_identity(Tally& t) {
  Rng rng(101);
  const auto samples = chebyshev_points(kDomain, 101);
  for (int i = 0; i < 20; ++i) {
    const SwansonParams p = random_params(rng);
    const FirstOrderOp eta{random_positive(rng), random_b(rng)};
    t.report("max |expanded - closed form|", compare_pointwise(build_hamiltonian(p, eta), closed_form_hamiltonian(p, eta), samples, {1e-10, 1e-10}), 1e-10);
  }
  t.note("20 draws, 101 points");
}

inline void hermitization(Tally& t) {
  Rng rng(102);
  const auto samples = chebyshev_points(kDomain, 101);
  std::vector<std::pair<SwansonParams, FirstOrderOp>> cases{{kReference, harmonic_eta()}};
  for (int i = 0; i < 10; ++i) cases.emplace_back(random_params(rng), FirstOrderOp{random_positive(rng), random_b(rng)});
  for (const auto& [p, eta] : cases) {
    const HermitizedModel m = hermitize(build_hamiltonian(p, eta), gauge_log_derivative(p, eta, kDomain), kDomain);
    t.check(m.first_order_residual.passed(), "first-order term");
    t.check(m.self_adjoint_check.passed(), "self-adjointness");
    const ScalarExpr w1 = m.h.coefficient(1) + differentiate(m.kinetic_weight, Var::x);
    t.report("sup |h_1 + w'|", sup_norm(w1, samples, 1e-10), 1e-10);
    t.report("sup |h - h^T|", compare_pointwise(m.h, formal_adjoint(m.h), samples, {1e-10, 1e-10}), 1e-10);
    t.report("sup |V_eff - closed form|", compare_pointwise(m.v_eff, effective_potential_closed_form(p, eta), samples, {1e-10, 1e-10}), 1e-10);
  }
  t.note(std::to_string(cases.size()) + " models");
}

inline void constant_commutator(Tally& t) {
  Rng rng(103);
  const auto samples = chebyshev_points(kDomain, 101);
  for (int i = 0; i < 6; ++i) {
    const SwansonParams p = random_params(rng);
    const ScalarExpr a = random_positive(rng);
    const double x0 = uniform(rng, -1, 1);
    const FirstOrderOp eta{a, b_constant_commutator(a, x0, kDomain)};
    const DiffOp c = commutator(eta.op(), formal_adjoint(eta.op()));
    t.report("sup |[eta, eta^T] - 1|", compare_pointwise(c, DiffOp::multiplication(1.0), samples, {1e-10, 0.0}), 1e-10);
    const ScalarExpr general = effective_potential_closed_form(p, eta);
    const ScalarExpr special = effective_potential_constant_commutator(p, a, half_inverse_integral(a, x0));
    t.report("sup |general V_eff - constant-commutator V_eff|", compare_pointwise(general, special, samples, {1e-9, 1e-9}), 1e-9);
  }
  t.note("6 random a(x)");
}

inline void pdm_equivalence(Tally& t) {
  const ScalarExpr x = xvar();
  for (const ScalarExpr& mexpr : {ScalarExpr(1.0) + 0.0 * x, 1.0 / (1.0 + x * x)}) {
    const MassProfile m = MassProfile::from_expr(mexpr, kDomain);
    const PdmHamiltonian h = pdm_hamiltonian(kReference, m, ChangeOfVariable(m, 0.0), {1e-9, 1e-9});
    t.report("sup |PDM h - hermitized h|", h.agreement, 1e-9);
  }
  t.note("m = 1 and m = 1/(1+x^2)");
}

inline void constant_mass_spectrum(Tally& t) {
  const IsospectralReport r = isospectral_report(kReference, harmonic_eta(), Grid{-14.0, 14.0, 3000}, 5);
  std::ostringstream os;
  os << std::setprecision(9) << "E =";
  double raw_err = 0.0, raw_res = 0.0;
  for (std::size_t n = 0; n < 5; ++n) {
    const auto& e = r.entries[n];
    const double exact = harmonic_level(kReference, n);
    os << ' ' << e.eigenvalue_extrapolated;
    t.worst("|E_n - closed form|", std::abs(e.eigenvalue_extrapolated - exact), 1e-4);
    t.worst("H-residual", e.residual_extrapolated, 1e-5);
    t.check(e.eigenvalue_extrapolated > 0.0, "positive eigenvalue");
    raw_err = std::max(raw_err, std::abs(e.eigenvalue - exact));
    raw_res = std::max(raw_res, e.residual);
  }
  t.check(r.spectrum.certified(), "Sturm certificates");
  t.note(os.str());
  t.note("Richardson h/2; raw grid error " + Tally::fmt(raw_err) + ", raw residual " + Tally::fmt(raw_res));
}

inline void f_conditions(Tally& t) {
  Rng rng(106);
  const auto usamples = chebyshev_points({-2.0, 2.0}, 101);
  for (int i = 0; i < 10; ++i) {
    const SwansonParams p = random_params(rng);
    const ScalarExpr B0 = uniform(rng, -1, 1) * uvar() + uniform(rng, -0.5, 0.5) * sin(uvar()) + uniform(rng, -1, 1);
    const FConditions F = F_functions(p, B0, ScalarExpr(0.5));
    const double wt = p.omega_tilde();
    t.report("sup |F1|", sup_norm(F.F1, usamples, 1e-12), 1e-12);
    t.report("sup |F2 + wt/2|", compare_pointwise(F.F2, ScalarExpr(-0.5 * wt), usamples, {1e-12, 0.0}), 1e-12);
    t.report("sup |F3 + wt/4|", compare_pointwise(F.F3, ScalarExpr(-0.25 * wt), usamples, {1e-12, 0.0}), 1e-12);
  }
  const Interval domain{-1.5, 1.5};
  const auto xs = chebyshev_points(domain, 21);
  for (int i = 0; i < 6; ++i) {
    const SwansonParams p = random_params(rng);
    const ScalarExpr a = uniform(rng, 0.4, 1.2) * (1.3 + 0.4 * tanh(uniform(rng, -1, 1) * xvar()));
    const ChangeOfVariable cv = change_of_variable_for(a, p, domain, 0.0);
    const ScalarExpr B0 = uniform(rng, -1, 1) * uvar() + uniform(rng, -0.5, 0.5) * sin(uvar());
    const FirstOrderOp eta{a, GeneralizedAnsatz{B0}.b(a, cv)};
    const HermitizedModel m = hermitize(build_hamiltonian(p, eta), gauge_log_derivative(p, eta, domain), domain);
    const FConditions F = F_functions(p, B0, ScalarExpr(0.5));
    t.report("sup |V_eff - decomposition|", compare_pointwise(m.v_eff, decomposed_effective_potential(F, a, cv), xs, {1e-9, 1e-9}), 1e-9);
  }
  t.note("10 random B0 for F1..F3, 6 end-to-end decompositions");
}

inline void generalized_commutator(Tally& t) {
  const SwansonParams p = kReference;
  const double wt = p.omega_tilde();
  const Interval domain{-1.5, 1.5};
  const auto xs = chebyshev_points(domain, 101);
  const ScalarExpr a = (1.0 + 0.2 * xvar() * xvar()) / std::sqrt(2.0 * wt);
  const ChangeOfVariable cv = change_of_variable_for(a, p, domain, 0.0);
  const ScalarExpr u = uvar();
  for (const ScalarExpr& B0 : {std::sqrt(wt / 2.0) * u, std::sqrt(wt / 2.0) * u * u / 2.0, 0.3 * sin(u) + 0.1 * u * u * u}) {
    t.report("sup |[eta, eta^T] - sqrt(2/wt) B0'(u)|", generalized_commutator_check(p, a, B0, cv, xs, {1e-9, 1e-9}), 1e-9);
  }
  // the linear B0 is the constant-commutator branch
  const FirstOrderOp gen{a, GeneralizedAnsatz{std::sqrt(wt / 2.0) * u}.b(a, cv)};
  const FirstOrderOp cc{a, b_constant_commutator(a, 0.0, domain)};
  t.report("sup |b_generalized - b_constant_commutator|", compare_pointwise(gen.b, cc.b, xs, {1e-10, 0.0}), 1e-10);
  t.report("sup |[eta, eta^T] - 1| (linear B0)",
           compare_pointwise(commutator(gen.op(), formal_adjoint(gen.op())), DiffOp::multiplication(1.0), xs, {1e-10, 0.0}),
           1e-10);
  t.note("B0 = sqrt(wt/2) u, sqrt(wt/2) u^2/2, 0.3 sin u + 0.1 u^3");
}

inline void quasi_solvability(Tally& t) {
  for (int N : {1, 2, 4}) {
    TypeAData d;
    d.N = N;
    d.q = {0.0, 1.0, 0.0};
    const SectorSearch s = find_sector(d);
    t.check(s.found, "class I N=" + std::to_string(N) + " sector");
    t.worst("remainder (class I, Q=z)", s.best.remainder, 1e-9);
    const SectorSpectrum sp = sector_spectrum(s.best.M);
    if (N == 2) {
      const bool pair = sp.real_eigenvalues.size() == 2 && std::abs(sp.real_eigenvalues[0] + 0.5) < 1e-10 &&
                        std::abs(sp.real_eigenvalues[1] - 0.5) < 1e-10;
      t.check(pair, "N=2 eigenvalues {-1/2, 1/2}");
      if (pair) t.note("N=2 sector eigenvalues {-1/2, 1/2} on V_2 = u^2/2 - 1");
    }
    const ScalarExpr V = substitute(typea_potential(d, s.best.sign), Var::u, xvar());
    const Spectrum grid = solve_spectrum(ScalarExpr(0.5), V, Grid{-12.0, 12.0, 2000}, static_cast<std::size_t>(N) + 2);
    for (double e : sp.real_eigenvalues) {
      double best = 1e300;
      for (double g : grid.best()) best = std::min(best, std::abs(g - e));
      t.worst("|sector eigenvalue - grid eigenvalue|", best, 1e-3);
    }
  }
  Rng rng(108);
  int count = 0;
  for (FClass cls : {FClass::II, FClass::III, FClass::IV}) {
    for (int N = 1; N <= 4; ++N) {
      for (int degree = 0; degree <= 2; ++degree) {
        TypeAData d;
        d.f_class = cls;
        d.N = N;
        d.nu = uniform(rng, 0.3, 2.0);
        for (int k = 0; k <= degree; ++k) d.q[k] = uniform(rng, 0.2, 1.0) * (k % 2 ? -1.0 : 1.0);
        const SectorSearch s = find_sector(d);
        t.check(s.found, std::string("class ") + fclass_name(cls) + " N=" + std::to_string(N));
        t.worst("remainder (classes II-IV)", s.best.remainder, 1e-9);
        ++count;
      }
    }
  }
  t.note(std::to_string(count) + " class II-IV cases, deg Q 0..2");
}

inline void riccati_chain(Tally& t) {
  const SwansonParams p = kOneSided;
  int solved = 0;
  for (const std::array<double, 3>& q : {std::array<double, 3>{0.0, 1.0, 0.0}, {0.4, 2.0, 0.0}, {0.0, 0.0, 1.0}}) {
    for (int N = 1; N <= 3; ++N) {
      TypeAData d;
      d.N = N;
      d.q = q;
      const SectorSpectrum sp = sector_spectrum(find_sector(d).best.M);
      for (int j = 0; j < static_cast<int>(sp.real_eigenvalues.size()); ++j) {
        const NfoldSolution s = solve_nfold_b0(p, d, j);
        t.worst("sup N-fold residual", s.residual, 1e-8);
        ++solved;
        // B0 -> phi -> psi'/psi -> psihat'/psihat -> B0, away from poles
        const SchrodingerReduction r = schrodinger_reduction(p, s.data, s.sign);
        const ScalarExpr back =
            r.b0_from_psihat_logd(r.psihat_logd_from_psi_logd(r.psi_logd_from_phi(r.phi_from_b0(s.B0))));
        std::vector<double> pts;
        for (double t0 : chebyshev_points(s.domain, 101)) {
          bool near = false;
          for (double z : s.poles) near = near || std::abs(t0 - z) < 1e-3 * s.domain.width();
          if (!near) pts.push_back(t0);
        }
        t.report("sup round-trip error", compare_pointwise(back, s.B0, pts, {1e-9, 1e-9}), 1e-9);
      }
    }
  }
  t.note(std::to_string(solved) + " solutions, params (2,0,1/2,0,0), class I");
}

inline void scaling(Tally& t) {
  TypeAData d;
  d.N = 2;
  d.q = {0.0, 1.0, 0.0};
  const double r = 4.0;
  const ScalingResult sc = absorb_scaling(d, r, Sign::plus);
  t.check(sc.check.passed(), "pointwise rescaling");
  const ScalarExpr x = xvar();
  const double L = 10.0;
  const Spectrum scaled =
      solve_spectrum(ScalarExpr(0.5), r * substitute(typea_potential(d, Sign::plus), Var::u, x), Grid{-L, L, 2000}, 4);
  const Spectrum base = solve_spectrum(ScalarExpr(0.5), substitute(typea_potential(d, Sign::plus), Var::u, x),
                                       Grid{-L, L, 2000}, 4);
  for (std::size_t j = 1; j < 4; ++j) {
    const double factor = (scaled.best()[j] - scaled.best()[0]) / (base.best()[j] - base.best()[0]);
    t.worst("|level-spacing factor - 2|", std::abs(factor - 2.0), 1e-4);
  }
  const Spectrum mapped = solve_spectrum(ScalarExpr(0.5), substitute(typea_potential(sc.data, Sign::plus), Var::u, x),
                                         Grid{-sc.s * L, sc.s * L, 2000}, 4);
  for (std::size_t j = 0; j < 4; ++j) {
    t.worst("|E(r V) - e E(V')|", std::abs(scaled.best()[j] - sc.e * mapped.best()[j]), 1e-4);
  }
  TypeAData quad = d;
  quad.q = {0.0, 0.0, 1.0};
  bool refused = false;
  try {
    absorb_scaling(quad, 2.0, Sign::plus);
  } catch (const ParameterError& e) {
    refused = std::string(e.what()).find("breaks quasi-solvability") != std::string::npos;
  }
  t.check(refused, "deg Q = 2 refused");
  t.note("s = " + Tally::fmt(sc.s) + ", e = " + Tally::fmt(sc.e) + "; deg Q = 2 refused");
}

}  // namespace acceptance

struct Criterion {
  int id;
  const char* title;
  double budget;
  void (*run)(acceptance::Tally&);
};

inline const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> list{
      {1, "expansion identity", 5.0, acceptance::expansion_identity},
      {2, "hermitization", 0.0, acceptance::hermitization},
      {3, "constant-commutator branch", 0.0, acceptance::constant_commutator},
      {4, "PDM equivalence", 0.0, acceptance::pdm_equivalence},
      {5, "constant-mass spectrum", 20.0, acceptance::constant_mass_spectrum},
      {6, "F-condition suite", 0.0, acceptance::f_conditions},
      {7, "generalized commutator", 0.0, acceptance::generalized_commutator},
      {8, "quasi-solvability", 30.0, acceptance::quasi_solvability},
      {9, "Riccati chain", 0.0, acceptance::riccati_chain},
      {10, "scaling", 0.0, acceptance::scaling},
  };
  return list;
}

inline CriterionResult run_criterion(const Criterion& c) {
  CriterionResult r;
  r.id = c.id;
  r.title = c.title;
  r.budget = c.budget;
  const auto start = std::chrono::steady_clock::now();
  acceptance::Tally t;
  try {
    c.run(t);
    r.passed = t.passed();
    r.detail = t.detail();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (c.budget > 0.0 && r.seconds > c.budget) {
    r.passed = false;
    r.detail += "; over time budget " + acceptance::Tally::fmt(c.budget) + " s";
  }
  return r;
}

inline std::vector<CriterionResult> run_acceptance(const std::function<void(const CriterionResult&)>& on_result = {}) {
  std::vector<CriterionResult> out;
  for (const Criterion& c : acceptance_criteria()) {
    out.push_back(run_criterion(c));
    if (on_result) on_result(out.back());
  }
  return out;
}

inline std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.title << " (" << std::fixed << std::setprecision(2)
     << r.seconds << " s): " << r.detail;
  return os.str();
}

}  // namespace swankit
