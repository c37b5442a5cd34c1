#include <gtest/gtest.h>

#include <cmath>

#include "swankit/hermitize.hpp"
#include "swankit/quadrature.hpp"
#include "test_support.hpp"

namespace swankit {
namespace {

const ScalarExpr x = ScalarExpr::variable(Var::x);
const Interval kDomain{-2.0, 2.0};
const std::vector<double> kSamples = chebyshev_points(kDomain);
const double kR = 1.0 / std::sqrt(2.0);
const FirstOrderOp kHarmonic{ScalarExpr(kR), kR * x};
const SwansonParams kReference{2.0, 0.5, 0.25, 1.0, 0.0};

SwansonParams random_params(testing::Rng& rng) {
  for (;;) {
    SwansonParams p{testing::uniform(rng, 0.5, 4.0), testing::uniform(rng, -0.6, 0.9),
                    testing::uniform(rng, -0.6, 0.9), testing::uniform(rng, -1.0, 1.0),
                    testing::uniform(rng, -1.0, 1.0)};
    if (p.omega_tilde() > 0.2) return p;
  }
}

/// Positive a(x) with random shape, random b(x).
FirstOrderOp random_eta(testing::Rng& rng) {
  const double s = testing::uniform(rng, 0.3, 1.5);
  const double c = testing::uniform(rng, -1.5, 1.5);
  const double d = testing::uniform(rng, -2.0, 2.0);
  const ScalarExpr a = s * (1.2 + 0.5 * tanh(c * x) + 0.3 * cos(d * x));
  return {a, testing::random_smooth(rng, 2)};
}

void expect_passed(const PointwiseReport& r) {
  EXPECT_TRUE(r.passed()) << "max diff " << r.max_abs_diff << " at x = " << r.worst_point;
}

TEST(Sigma, VanishesInHermitianLimit) {
  const SwansonParams p{2.0, 0.3, 0.3, 0.5, 0.5};
  const ScalarExpr sigma = gauge_log_derivative(p, kHarmonic, kDomain);
  EXPECT_TRUE(sigma.is_zero());
  const DiffOp H = build_hamiltonian(p, kHarmonic);
  const HermitizedModel m = hermitize(H, sigma, kDomain);
  expect_passed(compare_pointwise(m.h, H, kSamples));
}

TEST(Sigma, ReferenceValueAtOrigin) {
  const ScalarExpr sigma = gauge_log_derivative(kReference, kHarmonic, kDomain);
  // b1(0) = gamma a = 1/sqrt 2, so sigma(0) = -(1/sqrt 2)/(2 * 1.25 * 0.5)
  EXPECT_NEAR(evaluate(sigma, 0.0), -(kR) / 1.25, 1e-15);
  EXPECT_NEAR(evaluate(sigma, 0.0), -0.565685, 1e-6);
}

TEST(Sigma, ZeroOfAIsASingularity) {
  EXPECT_THROW(gauge_log_derivative(kReference, {x, ScalarExpr(1.0)}, kDomain), SingularityError);
  EXPECT_THROW(gauge_log_derivative({1.0, 0.5, 0.5, 0.0, 0.0}, kHarmonic, kDomain), ParameterError);
}

TEST(Sigma, ExplicitSimilarityTransform) {
  // rho = exp(integral of sigma) written out: rho H rho^{-1} f against h f
  testing::Rng rng(8);
  const SwansonParams p = random_params(rng);
  const FirstOrderOp eta = random_eta(rng);
  const ScalarExpr sigma = gauge_log_derivative(p, eta, kDomain);
  const ScalarExpr log_rho = integral_of(sigma, Var::x, 0.0, "log_rho");
  auto lr = [&](double t) { return evaluate(log_rho, t); };
  for (double t : {-1.5, -0.2, 0.9}) EXPECT_NEAR(testing::central_difference(lr, t, 1e-3), evaluate(sigma, t), 1e-6);

  const DiffOp H = build_hamiltonian(p, eta);
  const HermitizedModel m = hermitize(H, sigma, kDomain);
  const ScalarExpr f = exp(-(x * x)) * (1.0 + x);
  const ScalarExpr direct = exp(log_rho) * H.apply(exp(-log_rho) * f);
  expect_passed(compare_pointwise(m.h.apply(f), direct, chebyshev_points(kDomain, 21), {1e-9, 1e-9}));
}

TEST(Hermitize, HarmonicEtaReferenceParameters) {
  const DiffOp H = build_hamiltonian(kReference, kHarmonic);
  const HermitizedModel m = hermitize(H, gauge_log_derivative(kReference, kHarmonic, kDomain), kDomain);
  // w = wt a^2 = 1.25/2
  EXPECT_TRUE(m.kinetic_weight.is_constant());
  EXPECT_NEAR(evaluate(m.kinetic_weight, 0.3), 0.625, 1e-15);
  expect_passed(m.first_order_residual);
  expect_passed(m.self_adjoint_check);
  expect_passed(compare_pointwise(m.v_eff, effective_potential_closed_form(kReference, kHarmonic), kSamples));
  // quadratic plus linear: third derivative vanishes
  expect_passed(sup_norm(differentiate(m.v_eff, Var::x, 3), kSamples, 1e-10));
  expect_passed(compare_pointwise(m.divergence_form(), m.h, kSamples));
}

TEST(Hermitize, RandomModelsMatchClosedForm) {
  testing::Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const SwansonParams p = random_params(rng);
    const FirstOrderOp eta = random_eta(rng);
    const DiffOp H = build_hamiltonian(p, eta);
    const HermitizedModel m = hermitize(H, gauge_log_derivative(p, eta, kDomain), kDomain);
    expect_passed(m.self_adjoint_check);
    expect_passed(compare_pointwise(m.kinetic_weight, p.omega_tilde() * eta.a * eta.a, kSamples));
    expect_passed(compare_pointwise(m.v_eff, effective_potential_closed_form(p, eta), kSamples));
  }
}

TEST(Hermitize, ConstantCommutatorEta) {
  testing::Rng rng(13);
  for (int trial = 0; trial < 4; ++trial) {
    const SwansonParams p = random_params(rng);
    const ScalarExpr a = (1.0 + x * x) / std::sqrt(2.0 * p.omega_tilde());
    const FirstOrderOp eta{a, integral_of(1.0 / (2.0 * a), Var::x, 0.0) + 0.5 * differentiate(a)};
    const HermitizedModel m = hermitize(build_hamiltonian(p, eta), gauge_log_derivative(p, eta, kDomain), kDomain);
    expect_passed(compare_pointwise(m.v_eff, effective_potential_closed_form(p, eta), kSamples));
  }
}

TEST(Hermitize, WrongGaugeIsInconsistent) {
  const DiffOp H = build_hamiltonian(kReference, kHarmonic);
  EXPECT_THROW(hermitize(H, ScalarExpr(0.0), kDomain), InconsistentInputs);
  EXPECT_THROW(hermitize(DiffOp::derivative(1), ScalarExpr(0.0), kDomain), InconsistentInputs);
}

TEST(ClosedForm, ConstantAWithoutB) {
  const SwansonParams p{3.0, 0.4, 0.4, 0.0, 0.0};
  const ScalarExpr v = effective_potential_closed_form(p, {ScalarExpr(0.7), ScalarExpr(0.0)});
  ASSERT_TRUE(v.is_constant());
  EXPECT_NEAR(*v.constant_value(), 0.5 * (p.omega_tilde() + 0.8), 1e-15);
}

}  // namespace
}  // namespace swankit
