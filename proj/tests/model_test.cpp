#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "icmaxent/errors.hpp"
#include "icmaxent/identify.hpp"
#include "icmaxent/model.hpp"
#include "icmaxent/synth.hpp"
#include "support/oracle.hpp"

using namespace icmaxent;

namespace {

const double kLog2 = std::log(2.0);

ConditionalModel model_of(std::size_t d, const std::vector<ConstraintSpec>& cs, const std::vector<double>& lambda) {
  return normalize(d, cs, MultiplierVector{lambda});
}

// P(Y=1|x) given directly as a table, via the saturated conditional model.
ConditionalModel table_model(const std::vector<double>& p1) {
  auto [cs, lambda] = oracle::saturated(p1);
  std::size_t d = 0;
  while ((std::size_t{1} << d) < p1.size()) ++d;
  return model_of(d, cs, lambda);
}

IdentifiabilityVerdict approve(const VarSet& s, std::size_t d) { return intervenable_set(GraphSpec(d, {}), s); }

}  // namespace

TEST(EvalConditional, ZeroMultipliersGiveOneHalf) {
  const auto cs = std::vector{ConstraintSpec::conditional(make_varset({0, 1}), {0.2, 0.4, 0.6, 0.8})};
  const auto m = model_of(2, cs, {0, 0, 0, 0});
  for (std::uint32_t x = 0; x < 4; ++x) EXPECT_DOUBLE_EQ(eval_conditional(m, Config::full(2, x)), 0.5);
}

TEST(EvalConditional, SingleMarginalIsLogistic) {
  const double lambda = 0.7;
  const auto m = model_of(3, {ConstraintSpec::marginal(StatisticTable::identity_y(), 0.5)}, {lambda});
  for (std::uint32_t x = 0; x < 8; ++x) {
    EXPECT_NEAR(eval_conditional(m, Config::full(3, x)), std::exp(lambda) / (1 + std::exp(lambda)), 1e-15);
  }
}

TEST(EvalConditional, TwoConditionalsMatchEnumeration) {
  const std::vector cs{ConstraintSpec::conditional(make_varset({0}), {0.3, 0.6}),
                       ConstraintSpec::conditional(make_varset({1}), {0.5, 0.2})};
  const std::vector<double> lambda{0.4, -1.1, 2.0, 0.25};
  const auto m = model_of(2, cs, lambda);
  for (std::uint32_t x = 0; x < 4; ++x) {
    EXPECT_NEAR(eval_conditional(m, Config::full(2, x)), oracle::p1(cs, lambda, x), 1e-14);
  }
}

TEST(EvalConditional, UnpopulatedModelThrows) {
  const ConditionalModel m;
  EXPECT_THROW(eval_conditional(m, Config::full(1, 0)), InvalidModelError);
  EXPECT_THROW(m.prob(1, 0), InvalidModelError);
}

TEST(EvalConditional, PartialConfigurationRejected) {
  const auto m = model_of(2, {}, {});
  EXPECT_THROW(eval_conditional(m, Config{make_varset({0}), {1}}), DomainError);
}

TEST(Normalize, ZeroLambdaGivesMinusLogTwo) {
  const auto m = model_of(3, {ConstraintSpec::conditional(make_varset({2}), {0.1, 0.9})}, {0, 0});
  for (double b : m.log_norm()) EXPECT_DOUBLE_EQ(b, -kLog2);
}

TEST(Normalize, MarginalLambdaOne) {
  const auto m = model_of(2, {ConstraintSpec::marginal(StatisticTable::identity_y(), 0.5)}, {1.0});
  for (double b : m.log_norm()) EXPECT_NEAR(b, -std::log(1 + std::exp(1.0)), 1e-15);
}

TEST(Normalize, RandomLambdaNormalizes) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cs = oracle::random_constraints(rng, 3, 4);
    const auto lambda = oracle::uniform_values(rng, oracle::multiplier_count(cs), -3, 3);
    const auto m = model_of(3, cs, lambda);
    for (std::uint32_t x = 0; x < 8; ++x) EXPECT_NEAR(m.prob(0, x) + m.prob(1, x), 1.0, 1e-12);
  }
}

TEST(Normalize, CapacityCeiling) {
  EXPECT_THROW(normalize(4, {}, {}, 3), CapacityError);
  EXPECT_THROW(normalize(kMaxCauses + 1, {}, {}), CapacityError);
  EXPECT_NO_THROW(normalize(3, {}, {}, 3));
}

TEST(Normalize, LambdaLengthChecked) {
  EXPECT_THROW(normalize(2, {ConstraintSpec::conditional(make_varset({0}), {0.5, 0.5})}, MultiplierVector{{1.0}}),
               DomainError);
}

TEST(Normalize, LargeMultipliersStayFinite) {
  const auto m = model_of(1, {ConstraintSpec::conditional(make_varset({0}), {0.5, 0.5})}, {800.0, -800.0});
  EXPECT_EQ(m.prob_y1(0), 1.0);
  EXPECT_EQ(m.prob_y1(1), 0.0);
  EXPECT_TRUE(std::isfinite(m.log_norm()[0]));
}

TEST(ConditionJoint, UniformStaysUniform) {
  const auto q = condition_joint(JointTable::uniform(3), Config{make_varset({1}), {1}});
  ASSERT_EQ(q.n_causes(), 2u);
  for (double v : q.probs()) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(ConditionJoint, ProductTable) {
  const auto p = oracle::product_joint({0.3, 0.6});
  const auto q = condition_joint(p, Config{make_varset({0}), {1}});
  EXPECT_NEAR(q[1], 0.6, 1e-15);
  EXPECT_NEAR(q[0], 0.4, 1e-15);
}

TEST(ConditionJoint, CorrelatedByHand) {
  // P(x1, x2) indexed x1 + 2 x2.
  const JointTable p(2, {0.1, 0.2, 0.3, 0.4});
  const auto q = condition_joint(p, Config{make_varset({0}), {1}});
  EXPECT_NEAR(q[0], 0.2 / 0.6, 1e-15);
  EXPECT_NEAR(q[1], 0.4 / 0.6, 1e-15);
  const auto r = condition_joint(p, Config{make_varset({1}), {0}});
  EXPECT_NEAR(r[1], 0.2 / 0.3, 1e-15);
}

TEST(ConditionJoint, ZeroProbabilityEventIsPositivityError) {
  const JointTable p(2, {0.5, 0.0, 0.5, 0.0});
  try {
    condition_joint(p, Config{make_varset({0}), {1}});
    FAIL() << "expected PositivityError";
  } catch (const PositivityError& e) {
    EXPECT_NE(std::string(e.what()).find("P(x) > 0"), std::string::npos);
  }
}

TEST(ConditionalExpectation, FullConditioningIsEvaluation) {
  std::mt19937_64 rng(5);
  const auto cs = oracle::random_constraints(rng, 3, 3);
  const auto lambda = oracle::uniform_values(rng, oracle::multiplier_count(cs), -2, 2);
  const auto m = model_of(3, cs, lambda);
  const auto p = oracle::random_joint(rng, 3);
  for (std::uint32_t x = 0; x < 8; ++x) {
    EXPECT_NEAR(conditional_expectation(m, p, Config::full(3, x)), eval_conditional(m, Config::full(3, x)), 1e-15);
  }
}

TEST(ConditionalExpectation, IndependentTwoCauseFixture) {
  // Table keyed (x1, x2): index x1 + 2 x2.
  const auto m = table_model({0.1, 0.5, 0.3, 0.9});
  const auto p = oracle::product_joint({0.4, 0.5});
  EXPECT_NEAR(conditional_expectation(m, p, Config{make_varset({0}), {1}}), 0.7, 1e-12);
}

TEST(ConditionalExpectation, RandomAgainstJointEnumeration) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cs = oracle::random_constraints(rng, 3, 3);
    const auto lambda = oracle::uniform_values(rng, oracle::multiplier_count(cs), -2, 2);
    const auto m = model_of(3, cs, lambda);
    const auto p = oracle::random_joint(rng, 3);
    const auto t = oracle::p1_table(cs, lambda, 3);
    const VarSet s = oracle::random_subset(rng, 3, false);
    for (std::uint32_t c = 0; c < (1u << s.size()); ++c) {
      EXPECT_NEAR(conditional_expectation(m, p, Config::from_local(s, c)), oracle::conditional_mean(t, p, s, c), 1e-12);
    }
  }
}

TEST(InterventionalExpectation, SingleCauseEqualsConditional) {
  const auto m = table_model({0.25, 0.8});
  const JointTable p(1, {0.3, 0.7});
  const VarSet s = make_varset({0});
  for (std::uint8_t v = 0; v < 2; ++v) {
    EXPECT_NEAR(interventional_expectation(m, p, approve(s, 1), Config{s, {v}}, Config{}),
                conditional_expectation(m, p, Config{s, {v}}), 1e-15);
  }
}

TEST(InterventionalExpectation, IndependentTwoCauseFixture) {
  const auto m = table_model({0.1, 0.5, 0.3, 0.9});
  const auto p = oracle::product_joint({0.4, 0.5});
  const VarSet s = make_varset({0});
  EXPECT_NEAR(interventional_expectation(m, p, approve(s, 2), Config{s, {1}}, Config{}), 0.7, 1e-12);
}

TEST(InterventionalExpectation, ConfoundedFixtureMatchesTruncatedFactorization) {
  // U -> X1, U -> X2, both causes -> Y.
  const GraphSpec g(2, {}, {make_varset({0, 1})}, make_varset({0, 1}));
  const ScmInstance scm(g, {{0.3}}, {{0.2, 0.85}, {0.7, 0.15}}, {0.1, 0.6, 0.35, 0.9});
  const auto m = table_model(exact_effect_table(scm));
  const auto p = exact_joint_X(scm);
  const VarSet s = make_varset({0});
  for (std::uint8_t v = 0; v < 2; ++v) {
    const Config c{s, {v}};
    const double adjusted = interventional_expectation(m, p, approve(s, 2), c, Config{});
    EXPECT_NEAR(adjusted, exact_query(scm, c, Config{}), 1e-12);
    EXPECT_NEAR(adjusted, oracle::scm_query(scm, s, v, {}, 0), 1e-12);
  }
  // The confounding is strong enough that conditioning differs from intervening.
  EXPECT_GT(std::abs(conditional_expectation(m, p, Config{s, {1}}) - exact_query(scm, Config{s, {1}}, Config{})), 0.01);
}

TEST(InterventionalExpectation, GateIsEnforced) {
  const auto m = table_model({0.1, 0.5, 0.3, 0.9});
  const auto p = JointTable::uniform(2);
  const GraphSpec chain(2, {{VarId{0}, VarId{1}}});
  const VarSet s = make_varset({0});
  EXPECT_THROW(interventional_expectation(m, p, intervenable(chain, VarId{0}), Config{s, {1}}, Config{}),
               IdentifiabilityError);
  // A verdict for another set is refused too.
  EXPECT_THROW(interventional_expectation(m, p, approve(make_varset({1}), 2), Config{s, {1}}, Config{}),
               IdentifiabilityError);
  EXPECT_NO_THROW(interventional_expectation(m, p, IdentifiabilityVerdict::forced(s, 2), Config{s, {1}}, Config{}));
}

TEST(InterventionalExpectation, OverlappingSetsRejected) {
  const auto m = table_model({0.1, 0.5, 0.3, 0.9});
  const VarSet s = make_varset({0});
  EXPECT_THROW(adjusted_expectation(m, JointTable::uniform(2), Config{s, {1}}, Config{s, {1}}), DomainError);
}

TEST(MarginalExpectation, ConstantStatisticIsOne) {
  std::mt19937_64 rng(7);
  const auto cs = oracle::random_constraints(rng, 3, 3);
  const auto m = model_of(3, cs, oracle::uniform_values(rng, oracle::multiplier_count(cs), -2, 2));
  EXPECT_NEAR(marginal_expectation(m, oracle::random_joint(rng, 3), StatisticTable({}, {1.0, 1.0})), 1.0, 1e-14);
}

TEST(MarginalExpectation, IdentityOnUniformModel) {
  const auto m = model_of(2, {}, {});
  EXPECT_DOUBLE_EQ(marginal_expectation(m, JointTable(2, {0.1, 0.2, 0.3, 0.4}), StatisticTable::identity_y()), 0.5);
}

TEST(MarginalExpectation, RandomAgainstEnumeration) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cs = oracle::random_constraints(rng, 3, 3);
    const auto lambda = oracle::uniform_values(rng, oracle::multiplier_count(cs), -2, 2);
    const auto p = oracle::random_joint(rng, 3);
    const VarSet scope = oracle::random_subset(rng, 3, false);
    const StatisticTable f(scope, oracle::uniform_values(rng, std::size_t{2} << scope.size(), -1, 1));
    EXPECT_NEAR(marginal_expectation(model_of(3, cs, lambda), p, f),
                oracle::marginal_mean(oracle::p1_table(cs, lambda, 3), p, f), 1e-12);
  }
}

TEST(ConditionalEntropy, UniformModelIsLogTwo) {
  EXPECT_NEAR(conditional_entropy(model_of(3, {}, {}), JointTable::uniform(3)), kLog2, 1e-15);
}

TEST(ConditionalEntropy, DeterministicModelIsZero) {
  const auto m = model_of(1, {ConstraintSpec::conditional(make_varset({0}), {0.5, 0.5})}, {800.0, -800.0});
  EXPECT_EQ(conditional_entropy(m, JointTable(1, {0.4, 0.6})), 0.0);
}

TEST(ConditionalEntropy, RandomAgainstEnumeration) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cs = oracle::random_constraints(rng, 3, 3);
    const auto lambda = oracle::uniform_values(rng, oracle::multiplier_count(cs), -2, 2);
    const auto p = oracle::random_joint(rng, 3);
    EXPECT_NEAR(conditional_entropy(model_of(3, cs, lambda), p), oracle::entropy(oracle::p1_table(cs, lambda, 3), p),
                1e-12);
  }
}

TEST(ExpectationFunctional, AgreesWithExpectations) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cs = oracle::random_constraints(rng, 3, 3);
    const auto lambda = oracle::uniform_values(rng, oracle::multiplier_count(cs), -2, 2);
    const auto m = model_of(3, cs, lambda);
    const auto p = oracle::random_joint(rng, 3);
    for (const auto& c : cs) {
      for (std::uint32_t local = 0; local < c.n_targets(); ++local) {
        const auto f = expectation_functional(c, local, p);
        double e = f.offset;
        for (std::uint32_t x = 0; x < 8; ++x) e += f.weights[x] * m.prob_y1(x);
        double expected = 0.0;
        if (c.kind == ConstraintKind::marginal) {
          expected = marginal_expectation(m, p, c.statistic);
        } else if (c.kind == ConstraintKind::conditional) {
          expected = conditional_expectation(m, p, Config::from_local(c.cond_set, local));
        } else {
          const std::uint32_t full = embed(local, c.scope());
          expected = adjusted_expectation(m, p, Config::from_local(c.int_set, project(full, c.int_set)),
                                          Config::from_local(c.cond_set, project(full, c.cond_set)));
        }
        EXPECT_NEAR(e, expected, 1e-12);
      }
    }
  }
}

// --- properties --------------------------------------------------------------

TEST(ModelProperties, OracleEquivalenceOnRandomFixtures) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + trial % 3;
    const auto cs = oracle::random_constraints(rng, d, 3);
    const auto lambda = oracle::uniform_values(rng, oracle::multiplier_count(cs), -3, 3);
    const auto m = model_of(d, cs, lambda);
    const auto p = oracle::random_joint(rng, d);
    const auto t = oracle::p1_table(cs, lambda, d);
    const VarSet all = oracle::random_subset(rng, d, true);
    VarSet iv;
    VarSet cv;
    for (std::size_t k = 0; k < all.size(); ++k) (k == 0 || rng() % 2 ? iv : cv).push_back(all[k]);
    for (std::uint32_t a = 0; a < (1u << iv.size()); ++a) {
      for (std::uint32_t b = 0; b < (1u << cv.size()); ++b) {
        EXPECT_NEAR(adjusted_expectation(m, p, Config::from_local(iv, a), Config::from_local(cv, b)),
                    oracle::adjusted_mean(t, p, iv, a, cv, b), 1e-10);
      }
      EXPECT_NEAR(conditional_expectation(m, p, Config::from_local(iv, a)), oracle::conditional_mean(t, p, iv, a),
                  1e-10);
    }
  }
}

TEST(ModelProperties, DoEqualsConditionalUnderIndependence) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 2 + trial % 2;
    // P(X) = P(X_0) x P(rest): independence between {X_0} and its complement.
    const auto rest = oracle::random_joint(rng, d - 1);
    const double q = oracle::uniform_values(rng, 1, 0.1, 0.9)[0];
    std::vector<double> w(std::size_t{1} << d);
    for (std::uint32_t x = 0; x < w.size(); ++x) w[x] = ((x & 1u) ? q : 1 - q) * rest[x >> 1];
    const JointTable p(d, w);
    const auto cs = oracle::random_constraints(rng, d, 3);
    const auto m = model_of(d, cs, oracle::uniform_values(rng, oracle::multiplier_count(cs), -2, 2));
    const VarSet s = make_varset({0});
    for (std::uint8_t v = 0; v < 2; ++v) {
      EXPECT_NEAR(interventional_expectation(m, p, approve(s, d), Config{s, {v}}, Config{}),
                  conditional_expectation(m, p, Config{s, {v}}), 1e-10);
    }
  }
}

TEST(ModelProperties, EntropyBounds) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cs = oracle::random_constraints(rng, 3, 3);
    const auto m = model_of(3, cs, oracle::uniform_values(rng, oracle::multiplier_count(cs), -4, 4));
    const double h = conditional_entropy(m, oracle::random_joint(rng, 3));
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, kLog2 + 1e-15);
  }
  std::mt19937_64 rng2(23);
  const auto cs = oracle::random_constraints(rng2, 3, 4);
  EXPECT_DOUBLE_EQ(
      conditional_entropy(model_of(3, cs, std::vector<double>(oracle::multiplier_count(cs), 0.0)),
                          oracle::random_joint(rng2, 3)),
      kLog2);
}

TEST(ModelProperties, MarginalMultiplierIsMonotone) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    auto cs = oracle::random_constraints(rng, 3, 2);
    cs.insert(cs.begin(), ConstraintSpec::marginal(StatisticTable::identity_y(), 0.5));
    auto lambda = oracle::uniform_values(rng, oracle::multiplier_count(cs), -2, 2);
    const auto p = oracle::random_joint(rng, 3);
    double prev = -1.0;
    for (double l = -3.0; l <= 3.0; l += 0.5) {
      lambda[0] = l;
      const double e = marginal_expectation(model_of(3, cs, lambda), p, StatisticTable::identity_y());
      EXPECT_GT(e, prev);
      prev = e;
    }
  }
}
