#include <gtest/gtest.h>

#include <cmath>

#include "swankit/expr.hpp"
#include "swankit/parse.hpp"
#include "swankit/quadrature.hpp"
#include "test_support.hpp"

namespace swankit {
namespace {

const ScalarExpr x = ScalarExpr::variable(Var::x);
const ScalarExpr u = ScalarExpr::variable(Var::u);

TEST(Evaluate, Polynomial) { EXPECT_DOUBLE_EQ(evaluate(x * x, 3.0), 9.0); }

TEST(Evaluate, ReciprocalAtZeroIsDomainError) { EXPECT_THROW(evaluate(1.0 / x, 0.0), DomainError); }

TEST(Evaluate, AsinhViaLog) {
  // ln(1 + sqrt 2) to 20 digits
  const double expected = 0.88137358701954302523;
  EXPECT_NEAR(evaluate(log(x + sqrt(1.0 + x * x)), 1.0), expected, 1e-15);
}

TEST(Evaluate, DomainViolations) {
  EXPECT_THROW(evaluate(log(x), -1.0), DomainError);
  EXPECT_THROW(evaluate(log(x), 0.0), DomainError);
  EXPECT_THROW(evaluate(sqrt(x), -1e-300), DomainError);
  EXPECT_THROW(evaluate(pow(x, ScalarExpr(-1.0)), 0.0), DomainError);
  EXPECT_THROW(evaluate(pow(x, ScalarExpr(0.5)), -2.0), DomainError);
  EXPECT_THROW(evaluate(exp(x), 1000.0), DomainError);
  EXPECT_DOUBLE_EQ(evaluate(pow(x, ScalarExpr(3.0)), -2.0), -8.0);
}

TEST(Evaluate, ParametersMustBeBound) {
  const ScalarExpr e = ScalarExpr::parameter("nu") * u;
  EXPECT_THROW(evaluate(e, 1.0), UnboundParameter);
  EXPECT_DOUBLE_EQ(evaluate(e, 2.0, {{"nu", 1.5}}), 3.0);
  EXPECT_DOUBLE_EQ(evaluate(bind_parameters(e, {{"nu", 1.5}}), 2.0), 3.0);
}

TEST(Evaluate, MixedVariablesRejected) {
  EXPECT_THROW(evaluate(x + u, 1.0), VariableMismatch);
  EXPECT_THROW(evaluate(x * x, Var::u, 1.0), VariableMismatch);
}

TEST(Folding, StructuralRules) {
  EXPECT_TRUE((x * 0.0).is_zero());
  EXPECT_TRUE((0.0 * x).is_zero());
  EXPECT_TRUE((x * 1.0).same_node(x));
  EXPECT_TRUE((x + 0.0).same_node(x));
  EXPECT_TRUE((x - 0.0).same_node(x));
  EXPECT_TRUE(pow(x, ScalarExpr(1.0)).same_node(x));
  EXPECT_TRUE((-(-x)).same_node(x));
  EXPECT_TRUE((sin(x * 2.0) - sin(x * 2.0)).is_zero());
  EXPECT_FALSE((sin(x * 2.0) - sin(x * 3.0)).is_zero());
  EXPECT_EQ((ScalarExpr(2.0) * 3.0 + 1.0).constant_value(), 7.0);
  EXPECT_EQ(sqrt(ScalarExpr(4.0)).constant_value(), 2.0);
  // An invalid constant operation is kept so that evaluation reports it.
  EXPECT_FALSE(log(ScalarExpr(-1.0)).is_constant());
  EXPECT_THROW(evaluate(log(ScalarExpr(-1.0)), 0.0), DomainError);
}

TEST(Differentiate, PowerRule) {
  const ScalarExpr d = differentiate(x * x);
  for (double t : {-2.0, 0.0, 0.5, 3.0}) EXPECT_DOUBLE_EQ(evaluate(d, t), 2.0 * t);
  const ScalarExpr d2 = differentiate(pow(x, ScalarExpr(2.0)));
  for (double t : {-2.0, 0.5, 3.0}) EXPECT_DOUBLE_EQ(evaluate(d2, t), 2.0 * t);
}

TEST(Differentiate, ChainRuleCosh) {
  const ScalarExpr nu = ScalarExpr::parameter("nu");
  const ScalarExpr f = cosh(2.0 * sqrt(nu) * u);
  const ScalarExpr expected = 2.0 * sqrt(nu) * sinh(2.0 * sqrt(nu) * u);
  const ParamMap params{{"nu", 1.3}};
  for (double t : {-1.0, 0.0, 0.4, 2.0}) {
    EXPECT_NEAR(evaluate(differentiate(f, Var::u), t, params), evaluate(expected, t, params), 1e-13);
  }
}

TEST(Differentiate, ThirdDerivativeOfExponentialAgainstFiniteDifferences) {
  const ParamMap params{{"nu", 2.0}};
  const ScalarExpr f = exp(2.0 * sqrt(ScalarExpr::parameter("nu")) * u);
  const ScalarExpr d1 = differentiate(f, Var::u);
  const ScalarExpr d2 = differentiate(d1, Var::u);
  const ScalarExpr d3 = differentiate(d2, Var::u);
  const double u0 = 0.3;
  const double h = 1e-4;
  // Each order is checked by a central difference of the previous one.
  auto at = [&](const ScalarExpr& e) { return [&e, &params](double t) { return evaluate(e, t, params); }; };
  EXPECT_NEAR(evaluate(d1, u0, params), testing::central_difference(at(f), u0, h), 1e-6);
  EXPECT_NEAR(evaluate(d2, u0, params), testing::central_difference(at(d1), u0, h), 1e-6);
  EXPECT_NEAR(evaluate(d3, u0, params), testing::central_difference(at(d2), u0, h), 1e-6);
  // closed form 8 nu^{3/2} e^{2 sqrt(nu) u}
  const double closed = 8.0 * std::pow(2.0, 1.5) * std::exp(2.0 * std::sqrt(2.0) * u0);
  EXPECT_NEAR(evaluate(d3, u0, params), closed, 1e-12 * closed);
}

TEST(Differentiate, DoesNotMutateInput) {
  const ScalarExpr f = sin(x) * exp(x);
  const std::string before = to_string(f);
  (void)differentiate(differentiate(f));
  EXPECT_EQ(to_string(f), before);
}

TEST(Differentiate, OtherVariablesAreConstants) {
  EXPECT_TRUE(differentiate(u * u, Var::x).is_zero());
  EXPECT_TRUE(differentiate(ScalarExpr::parameter("k"), Var::x).is_zero());
}

TEST(Substitute, ComposesFunctions) {
  const ScalarExpr g = u * u + 1.0;
  const ScalarExpr composed = substitute(g, Var::u, sin(x));
  EXPECT_FALSE(composed.depends_on(Var::u));
  EXPECT_NEAR(evaluate(composed, 0.7), std::sin(0.7) * std::sin(0.7) + 1.0, 1e-15);
  // chain rule through the substitution
  EXPECT_NEAR(evaluate(differentiate(composed), 0.7), 2.0 * std::sin(0.7) * std::cos(0.7), 1e-15);
}

TEST(Opaque, IntegralNodeEvaluatesAndDifferentiates) {
  const ScalarExpr s = integral_of(cos(x), Var::x, 0.0, "S");
  for (double t : {-2.0, 0.0, 0.5, 1.7}) EXPECT_NEAR(evaluate(s, t), std::sin(t), 1e-13);
  const ScalarExpr ds = differentiate(s);
  EXPECT_NEAR(evaluate(ds, 0.9), std::cos(0.9), 1e-15);
  // opaque function applied to an expression: S(x^2)' = 2x cos(x^2)
  const auto& node = std::get<detail::Opaque>(s.node().data);
  const ScalarExpr s_of_sq = ScalarExpr::opaque(node.fn, x * x);
  EXPECT_NEAR(evaluate(differentiate(s_of_sq), 1.1), 2.2 * std::cos(1.21), 1e-14);
}

TEST(Opaque, QuadratureOnShortAndCancellingIntervals) {
  const ScalarExpr s = integral_of(x * exp(-(x * x)), Var::x, -1.0, "S");
  // odd integrand: the integral back to -t vanishes
  EXPECT_NEAR(evaluate(s, 1.0), 0.0, 1e-15);
  const ScalarExpr t = integral_of(1.0 / (1.0 + x * x), Var::x, 0.0, "T");
  EXPECT_NEAR(evaluate(t, 1e-3), std::atan(1e-3), 1e-18);
  EXPECT_NEAR(evaluate(t, 1e-9), 1e-9, 1e-22);
}

// ---------------------------------------------------------------------------
// Properties over random expressions

class RandomExpressions : public ::testing::Test {
 protected:
  testing::Rng rng{20240611};
};

TEST_F(RandomExpressions, ProductRule) {
  for (int trial = 0; trial < 40; ++trial) {
    const ScalarExpr e1 = testing::random_smooth(rng, 3);
    const ScalarExpr e2 = testing::random_smooth(rng, 3);
    const ScalarExpr lhs = differentiate(e1 * e2);
    const ScalarExpr rhs = differentiate(e1) * e2 + e1 * differentiate(e2);
    for (int k = 0; k < 100; ++k) {
      const double t = testing::uniform(rng, -2.0, 2.0);
      const double a = evaluate(lhs, t);
      const double b = evaluate(rhs, t);
      EXPECT_LE(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(b))) << to_string(e1) << " * " << to_string(e2);
    }
  }
}

TEST_F(RandomExpressions, SimplifyPreservesValues) {
  for (int trial = 0; trial < 60; ++trial) {
    const ScalarExpr raw = testing::random_smooth(rng, 4, Var::x, /*raw=*/true);
    const ScalarExpr simple = simplify(raw);
    EXPECT_LE(tree_size(simple), tree_size(raw));
    for (int k = 0; k < 100; ++k) {
      const double t = testing::uniform(rng, -2.0, 2.0);
      const double a = evaluate(raw, t);
      const double b = evaluate(simple, t);
      EXPECT_LE(std::abs(a - b), 1e-14 * std::max(1.0, std::abs(a))) << to_string(raw);
    }
  }
}

TEST_F(RandomExpressions, SymbolicDerivativeMatchesCentralDifferenceAtSecondOrder) {
  for (int trial = 0; trial < 30; ++trial) {
    const ScalarExpr e = testing::random_smooth(rng, 3);
    const ScalarExpr d = differentiate(e);
    auto f = [&](double t) { return evaluate(e, t); };
    for (int k = 0; k < 10; ++k) {
      const double t = testing::uniform(rng, -1.5, 1.5);
      const double exact = evaluate(d, t);
      const double err1 = std::abs(testing::central_difference(f, t, 1e-2) - exact);
      const double err2 = std::abs(testing::central_difference(f, t, 5e-3) - exact);
      // O(h^2): halving h cuts the error about four times, unless already at roundoff
      if (err1 > 1e-9) {
        EXPECT_GT(err1 / err2, 3.0) << to_string(e) << " at " << t;
        EXPECT_LT(err1 / err2, 5.0) << to_string(e) << " at " << t;
      }
    }
  }
}

TEST_F(RandomExpressions, PrintParseRoundTrip) {
  for (int trial = 0; trial < 60; ++trial) {
    const ScalarExpr e = testing::random_smooth(rng, 4, Var::u, trial % 2 == 0);
    const ScalarExpr back = parse_expr(to_string(e), Var::u);
    for (int k = 0; k < 20; ++k) {
      const double t = testing::uniform(rng, -2.0, 2.0);
      EXPECT_NEAR(evaluate(back, t), evaluate(e, t), 1e-13 * std::max(1.0, std::abs(evaluate(e, t))))
          << to_string(e);
    }
  }
}

}  // namespace
}  // namespace swankit
