#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "swankit/pdm.hpp"
#include "swankit/spectral.hpp"
#include "swankit/typea.hpp"
#include "test_support.hpp"

namespace swankit {
namespace {

const ScalarExpr x = ScalarExpr::variable(Var::x);
const ScalarExpr u = ScalarExpr::variable(Var::u);
const double kR = 1.0 / std::sqrt(2.0);
const FirstOrderOp kHarmonic{ScalarExpr(kR), kR * x};
const SwansonParams kReference{2.0, 0.5, 0.25, 1.0, 0.0};

SymTridiagonal random_tridiagonal(testing::Rng& rng, std::size_t n) {
  SymTridiagonal T;
  for (std::size_t i = 0; i < n; ++i) T.diag.push_back(testing::uniform(rng, -3.0, 3.0));
  for (std::size_t i = 0; i + 1 < n; ++i) T.off.push_back(testing::uniform(rng, -1.0, 1.0));
  return T;
}

Eigen::MatrixXd dense(const SymTridiagonal& T) {
  const auto n = static_cast<Eigen::Index>(T.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, i) = T.diag[i];
    if (i + 1 < n) A(i, i + 1) = A(i + 1, i) = T.off[i];
  }
  return A;
}

TEST(Discretize, FreeStencil) {
  const Grid g{0.0, 1.0, 21};
  const SymTridiagonal T = discretize_pdm(ScalarExpr(0.0), g);
  const double h = g.h();
  ASSERT_EQ(T.size(), 19u);
  for (double d : T.diag) EXPECT_NEAR(d, 1.0 / (h * h), 1e-10);
  for (double o : T.off) EXPECT_NEAR(o, -0.5 / (h * h), 1e-10);
}

TEST(Discretize, VariableMassIsSymmetric) {
  testing::Rng rng(41);
  const Grid g{-3.0, 3.0, 200};
  const SymTridiagonal T = discretize_pdm(1.0 / (1.0 + x * x), 0.5 * x * x, g);
  // <a, T b> = <T a, b> for the stored operator
  std::vector<double> a(T.size()), b(T.size());
  for (std::size_t i = 0; i < T.size(); ++i) {
    a[i] = testing::uniform(rng, -1, 1);
    b[i] = testing::uniform(rng, -1, 1);
  }
  const auto Ta = T.apply(a), Tb = T.apply(b);
  double l = 0, r = 0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    l += a[i] * Tb[i];
    r += Ta[i] * b[i];
  }
  EXPECT_NEAR(l, r, 1e-9 * std::abs(l));
  const Eigen::MatrixXd A = dense(T);
  EXPECT_EQ((A - A.transpose()).norm(), 0.0);
}

TEST(Discretize, Errors) {
  EXPECT_THROW(discretize_pdm(ScalarExpr(0.0), Grid{0.0, 1.0, 10}), ParameterError);
  EXPECT_THROW(discretize_pdm(ScalarExpr(0.0), Grid{1.0, 0.0, 100}), ParameterError);
  EXPECT_THROW(discretize(x, ScalarExpr(0.0), Grid{-1.0, 1.0, 100}), SingularityError);
}

TEST(EigLowest, Diagonal) {
  const SymTridiagonal T{{1.0, 2.0, 3.0}, {0.0, 0.0}};
  const Spectrum s = eig_lowest(T, 2);
  ASSERT_EQ(s.eigenvalues.size(), 2u);
  EXPECT_NEAR(s.eigenvalues[0], 1.0, 1e-15);
  EXPECT_NEAR(s.eigenvalues[1], 2.0, 1e-15);
  EXPECT_TRUE(s.certified());
  EXPECT_THROW(eig_lowest(T, 4), ParameterError);
}

TEST(EigLowest, AgreesWithDenseSolver) {
  testing::Rng rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const SymTridiagonal T = random_tridiagonal(rng, 60);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(T));
    const Spectrum s = eig_lowest(T, 10, true);
    for (std::size_t j = 0; j < 10; ++j) {
      EXPECT_NEAR(s.eigenvalues[j], es.eigenvalues()(static_cast<Eigen::Index>(j)), 1e-12);
      const auto Tv = T.apply(s.eigenvectors[j]);
      double r = 0;
      for (std::size_t i = 0; i < Tv.size(); ++i) r = std::max(r, std::abs(Tv[i] - s.eigenvalues[j] * s.eigenvectors[j][i]));
      EXPECT_LT(r, 1e-11);
      EXPECT_NEAR(norm2(s.eigenvectors[j]), 1.0, 1e-14);
    }
  }
}

TEST(EigLowest, TridiagonalSolveMatchesDense) {
  testing::Rng rng(43);
  const SymTridiagonal T = random_tridiagonal(rng, 40);
  std::vector<double> rhs(40);
  for (double& v : rhs) v = testing::uniform(rng, -1, 1);
  const std::vector<double> y = tridiagonal_solve(T, 0.37, rhs);
  const Eigen::MatrixXd A = dense(T) - 0.37 * Eigen::MatrixXd::Identity(40, 40);
  const Eigen::VectorXd ref = A.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(rhs.data(), 40));
  for (int i = 0; i < 40; ++i) EXPECT_NEAR(y[i], ref(i), 1e-11 * std::max(1.0, std::abs(ref(i))));
}

TEST(EigLowest, HarmonicOscillator) {
  const Spectrum s = solve_spectrum(ScalarExpr(0.5), 0.5 * x * x, Grid{-12.0, 12.0, 2400}, 5);
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_NEAR(s.eigenvalues[j], j + 0.5, 2e-4);
    EXPECT_NEAR(s.richardson[j], j + 0.5, 1e-8);
  }
  EXPECT_NEAR(s.eigenvalues[0], 0.5, 1e-5);
  EXPECT_NEAR(s.richardson[0], 0.5, 1e-6);
  for (std::size_t j = 1; j < 5; ++j) EXPECT_GT(s.eigenvalues[j], s.eigenvalues[j - 1]);
  EXPECT_TRUE(s.certified());
}

TEST(EigLowest, FreeParticleInBox) {
  const Spectrum s = solve_spectrum(ScalarExpr(0.5), ScalarExpr(0.0), Grid{0.0, std::numbers::pi, 2000}, 3);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(s.eigenvalues[j], 0.5 * (j + 1) * (j + 1), 1e-4);
}

TEST(EigLowest, SecondOrderConvergence) {
  const auto ratios = convergence_ratios(ScalarExpr(0.5), 0.5 * x * x, Grid{-10.0, 10.0, 400}, {0.5, 1.5, 2.5});
  for (double r : ratios) {
    EXPECT_GE(r, 3.5);
    EXPECT_LE(r, 4.5);
  }
}

TEST(EigLowest, ThreadCountDoesNotChangeResults) {
  const SymTridiagonal T = discretize_pdm(1.0 / (1.0 + x * x), 0.5 * x * x + 0.3 * x, Grid{-8.0, 8.0, 800});
  setenv("SWANKIT_THREADS", "1", 1);
  const Spectrum one = eig_lowest(T, 6, true);
  setenv("SWANKIT_THREADS", "4", 1);
  const Spectrum four = eig_lowest(T, 6, true);
  unsetenv("SWANKIT_THREADS");
  EXPECT_EQ(one.eigenvalues, four.eigenvalues);
  EXPECT_EQ(one.eigenvectors, four.eigenvectors);
}

TEST(DomainCheck, DetectsTruncation) {
  const Grid wide{-10.0, 10.0, 801};
  const Spectrum s = eig_lowest(discretize_pdm(0.5 * x * x, wide), 3);
  EXPECT_TRUE(domain_check(ScalarExpr(0.5), 0.5 * x * x, wide, s.eigenvalues).stable);
  const Grid narrow{-2.0, 2.0, 161};
  const Spectrum t = eig_lowest(discretize_pdm(0.5 * x * x, narrow), 3);
  const DomainCheck c = domain_check(ScalarExpr(0.5), 0.5 * x * x, narrow, t.eigenvalues);
  EXPECT_FALSE(c.stable);
  EXPECT_FALSE(c.warning.empty());
  EXPECT_NEAR(c.wide.h(), narrow.h(), 1e-12);
}

TEST(Isospectral, HermitianLimitHasPlainResiduals) {
  const SwansonParams p{2.0, 0.3, 0.3, 0.5, 0.5};
  const IsospectralReport r = isospectral_report(p, kHarmonic, Grid{-10.0, 10.0, 1000}, 3, false);
  for (const auto& e : r.entries) EXPECT_LT(e.residual, 1e-6);
}

TEST(Isospectral, ReferenceParameters) {
  const IsospectralReport r = isospectral_report(kReference, kHarmonic, Grid{-14.0, 14.0, 3000}, 5);
  EXPECT_NEAR(harmonic_level(kReference, 0), 1.006843, 1e-6);
  for (std::size_t j = 0; j < 5; ++j) {
    const auto& e = r.entries[j];
    EXPECT_NEAR(e.eigenvalue_extrapolated, harmonic_level(kReference, j), 1e-6);
    EXPECT_NEAR(e.eigenvalue, harmonic_level(kReference, j), 5e-4);
    EXPECT_LT(e.residual_extrapolated, 1e-8);
    EXPECT_LT(e.residual, 1e-4);
    EXPECT_GT(e.eigenvalue, 0.0);
  }
  EXPECT_TRUE(r.all_positive);
  EXPECT_TRUE(r.spectrum.certified());
}

TEST(Isospectral, PositionDependentMass) {
  const ScalarExpr m = 1.0 / (1.0 + x * x);
  const ScalarExpr a = 1.0 / sqrt(2.0 * kReference.omega_tilde() * m);
  const Interval domain{-14.0, 14.0};
  const FirstOrderOp eta{a, b_constant_commutator(a, 0.0, domain)};
  const IsospectralReport coarse = isospectral_report(kReference, eta, Grid{-14.0, 14.0, 1500}, 3, false);
  const IsospectralReport fine = isospectral_report(kReference, eta, Grid{-14.0, 14.0, 3000}, 3, false);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_LT(fine.entries[j].residual, 1e-4);
    const double ratio = coarse.entries[j].residual / fine.entries[j].residual;
    EXPECT_GT(ratio, 3.5);
    EXPECT_LT(ratio, 4.5);
    // [eta, eta^T] = 1 keeps the oscillator ladder
    EXPECT_NEAR(fine.entries[j].eigenvalue, harmonic_level(kReference, j), 1e-3);
  }
}

TEST(Isospectral, ResidualIsScaleInvariant) {
  const std::vector<double> v{0.1, 0.5, 1.0, 0.4};
  const std::vector<double> log_rho{0.3, -0.2, 0.1, 2.0};
  std::vector<double> scaled = v;
  for (double& t : scaled) t *= -7.5;
  const auto a = detail::unmap(v, log_rho);
  const auto b = detail::unmap(scaled, log_rho);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(std::abs(a[i]), std::abs(b[i]), 1e-15);
}

TEST(Isospectral, NeedsPositiveOmegaTilde) {
  EXPECT_THROW(isospectral_report({1.0, 0.75, 0.5, 0.0, 0.0}, kHarmonic, Grid{-5, 5, 100}, 2), ParameterError);
}

TEST(QuasiSolvable, SectorEigenvaluesOnTheGrid) {
  struct Case {
    TypeAData d;
    Interval domain;
  };
  std::vector<Case> cases;
  for (int N : {1, 2, 4}) {
    TypeAData d;
    d.N = N;
    d.q = {0.0, 1.0, 0.0};
    cases.push_back({d, {-12.0, 12.0}});
  }
  // Morse-like: e^{-W} decays on both sides and beats f^{N-1} = e^{2(N-1)u/2}
  TypeAData morse;
  morse.N = 3;
  morse.f_class = FClass::III;
  morse.nu = 0.25;
  morse.q = {-1.0, 3.0, 0.0};
  cases.push_back({morse, {-8.0, 25.0}});
  for (const Case& c : cases) {
    const SectorSearch s = find_sector(c.d);
    ASSERT_TRUE(s.found);
    const SectorSpectrum sector = sector_spectrum(s.best.M);
    const ScalarExpr V = substitute(typea_potential(c.d, s.best.sign), Var::u, x);
    const Spectrum grid = solve_spectrum(ScalarExpr(0.5), V, Grid{c.domain.lo, c.domain.hi, 2000}, 8);
    for (double e : sector.real_eigenvalues) {
      double best = 1e300;
      for (double g : grid.best()) best = std::min(best, std::abs(g - e));
      EXPECT_LT(best, 1e-3) << "sector eigenvalue " << e << " for N=" << c.d.N;
    }
  }
}

TEST(Scaling, SpectrumScalesByE) {
  TypeAData d;
  d.N = 2;
  d.q = {0.0, 1.0, 0.0};
  const double r = 4.0;
  const ScalingResult sc = absorb_scaling(d, r, Sign::plus);
  const double L = 10.0;
  const ScalarExpr Vt = r * substitute(typea_potential(d, Sign::plus), Var::u, x);
  const ScalarExpr Vu = substitute(typea_potential(sc.data, Sign::plus), Var::u, x);
  const Spectrum t = solve_spectrum(ScalarExpr(0.5), Vt, Grid{-L, L, 2000}, 4);
  const Spectrum w = solve_spectrum(ScalarExpr(0.5), Vu, Grid{-sc.s * L, sc.s * L, 2000}, 4);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(t.best()[j], sc.e * w.best()[j], 1e-4);
  // level spacing doubles
  EXPECT_NEAR((t.best()[1] - t.best()[0]) / (w.best()[1] - w.best()[0]), 2.0, 1e-4);
}

}  // namespace
}  // namespace swankit
