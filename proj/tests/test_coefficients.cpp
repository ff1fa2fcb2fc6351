#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "compete/coefficients.hpp"
#include "compete/errors.hpp"

using namespace compete;

namespace {

CoefficientSet constants(std::array<double, 6> v) { return CoefficientSet::constants(v); }

HypothesisVerdict h1_of(std::array<double, 6> v) {
  return check_H1(compute_envelopes(constants(v)));
}

HypothesisVerdict h2_of(const CoefficientSet& s) {
  return check_H2(s, compute_envelopes(s));
}

CoefficientSet with_a1(const PeriodicScalar& a1) {
  return constants({1, 1, 0.5, 0.4, 0.5, 1}).with_field(Coef::a1, CoefficientField(a1));
}

}  // namespace

TEST(PeriodicScalar, EvaluatesAndIntegratesExactly) {
  const auto h = PeriodicScalar::harmonic(2.0, 1.0, 0.3);
  EXPECT_NEAR(h(0.5), 1.3, 1e-15);
  EXPECT_NEAR(h.mean(), 1.0, 1e-15);
  EXPECT_NEAR(h.integral(0.0, 2.0), 2.0, 1e-14);
  // Antiderivative of 1 + 0.3 sin(pi t) from 0 to 1.
  EXPECT_NEAR(h.integral(0.0, 1.0), 1.0 + 0.6 / M_PI, 1e-14);

  const auto tab = PeriodicScalar::table(1.0, {{0.0, 0.9}, {0.5, 1.1}, {1.0, 0.9}});
  EXPECT_NEAR(tab(0.25), 1.0, 1e-15);
  EXPECT_NEAR(tab.mean(), 1.0, 1e-15);
  // One full period plus [0.25, 0.75], where the table averages 1.05.
  EXPECT_NEAR(tab.integral(0.25, 1.75), 1.0 + 0.5 * 1.05, 1e-14);
}

TEST(PeriodicScalar, TableRejectsMismatchedEndpoints) {
  EXPECT_THROW(PeriodicScalar::table(1.0, {{0.0, 0.9}, {1.0, 1.0}}), ConfigError);
}

TEST(SpatialBump, ZeroAtAndBeyondSupport) {
  const SpatialBump sq(0.5, 2.0, 0.0);
  EXPECT_EQ(sq(2.0), 0.0);
  EXPECT_EQ(sq(-2.0), 0.0);
  EXPECT_EQ(sq(1.999), 0.5);
  const auto tr = SpatialBump::with_width(0.8, 4.0, 1.0);
  EXPECT_DOUBLE_EQ(tr.support(), 3.0);
  EXPECT_NEAR(tr(2.5), 0.4, 1e-15);
  EXPECT_EQ(tr(3.0), 0.0);
  for (double x = -5; x <= 5; x += 0.01) EXPECT_LE(std::abs(tr(x)), 0.8);
}

TEST(Envelopes, ConstantBaselines) {
  const auto env = compute_envelopes(constants({1, 1, 0.5, 0.4, 0.5, 1}));
  const std::array<double, 6> expect{1, 1, 0.5, 0.4, 0.5, 1};
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(env.low[i], expect[i]);
    EXPECT_EQ(env.high[i], expect[i]);
  }
}

TEST(Envelopes, HarmonicAndTableExtrema) {
  auto env = compute_envelopes(with_a1(PeriodicScalar::harmonic(1.0, 1.0, 0.3)));
  EXPECT_NEAR(env.L(Coef::a1), 0.7, 1e-12);
  EXPECT_NEAR(env.M(Coef::a1), 1.3, 1e-12);
  env = compute_envelopes(
      with_a1(PeriodicScalar::table(1.0, {{0.0, 0.9}, {0.5, 1.1}, {1.0, 0.9}})));
  EXPECT_NEAR(env.L(Coef::a1), 0.9, 1e-15);
  EXPECT_NEAR(env.M(Coef::a1), 1.1, 1e-15);
}

TEST(Envelopes, RefinementIsStable) {
  const auto a1 = PeriodicScalar::trig(1.0, 1.0, {{1, 0.2, 0.3}, {3, 0.1, 1.1}});
  const auto set = with_a1(a1);
  const auto e1 = compute_envelopes(set, 256);
  const auto e2 = compute_envelopes(set, 512);
  for (int i = 0; i < 6; ++i) {
    EXPECT_LT(std::abs(e1.low[i] - e2.low[i]), 1e-3);
    EXPECT_LT(std::abs(e1.high[i] - e2.high[i]), 1e-3);
    EXPECT_LE(e1.low[i], e1.high[i]);
  }
}

TEST(HypothesisH0, Cases) {
  const auto ok = check_H0(compute_envelopes(constants({1, 1, 0.5, 0.4, 0.5, 1})));
  EXPECT_TRUE(ok.holds);
  for (double m : ok.margins) EXPECT_GT(m, 0.0);

  const auto s = constants({1, 1, 0.5, 0.4, 0.5, 1})
                     .with_field(Coef::a2, CoefficientField(PeriodicScalar::harmonic(
                                               1.0, 0.4, -0.5)));
  const auto bad = check_H0(compute_envelopes(s));
  EXPECT_FALSE(bad.holds);
  EXPECT_NEAR(bad.margins[3], -0.1, 1e-12);

  const auto zero = check_H0(compute_envelopes(constants({0, 1, 0.5, 0.4, 0.5, 1})));
  EXPECT_FALSE(zero.holds);
}

TEST(HypothesisH1, Cases) {
  const auto ok = h1_of({1, 1, 0.5, 0.4, 0.5, 1});
  EXPECT_TRUE(ok.holds);
  EXPECT_NEAR(ok.margins[0], 0.8, 1e-15);
  EXPECT_NEAR(ok.margins[1], 0.1, 1e-15);
  EXPECT_FALSE(h1_of({1, 1, 0.5, 0.5, 0.5, 1}).holds);
  EXPECT_FALSE(h1_of({1, 1, 3, 0.4, 0.5, 1}).holds);
}

TEST(HypothesisH1, RequiresH0) {
  EXPECT_THROW(check_H1(compute_envelopes(constants({0, 1, 0.5, 0.4, 0.5, 1}))),
               PreconditionError);
}

TEST(HypothesisH2, ConstantReductionExamples) {
  auto v = h2_of(constants({1, 1, 0.5, 0.4, 0.5, 1}));
  EXPECT_TRUE(v.holds);
  EXPECT_NEAR(v.margins[0], 1.1, 1e-12);
  EXPECT_NEAR(v.margins[1], 0.8, 1e-12);

  v = h2_of(constants({1, 1, 0.9, 0.9, 0.5, 1}));
  EXPECT_TRUE(v.holds);
  EXPECT_NEAR(v.margins[0], 0.685, 1e-12);
  EXPECT_NEAR(v.margins[1], 0.19, 1e-12);

  v = h2_of(constants({1, 1, 1.2, 1, 0.5, 1}));
  EXPECT_FALSE(v.holds);
  EXPECT_LT(v.margins[1], 0.0);
}

// The sampled form evaluated on constants must reproduce the hand reduction.
TEST(HypothesisH2, RandomConstantSetsMatchReduction) {
  std::mt19937_64 rng(20261018);
  std::uniform_real_distribution<double> d(0.1, 2.0);
  for (int i = 0; i < 50; ++i) {
    const std::array<double, 6> c{d(rng), d(rng), d(rng), d(rng), d(rng), d(rng)};
    const auto sampled = h2_of(constants(c));
    const auto reduced = check_H2_constant(c);
    EXPECT_EQ(sampled.holds, reduced.holds) << "set " << i;
    EXPECT_NEAR(sampled.margins[0], reduced.margins[0], 1e-12);
    EXPECT_NEAR(sampled.margins[1], reduced.margins[1], 1e-12);
  }
}

TEST(LvDeterminacy, Examples) {
  auto r = check_lv_determinacy(1, 1, 0.5, 1);
  EXPECT_TRUE(r.verdict.holds);
  EXPECT_TRUE(r.h2.holds);
  r = check_lv_determinacy(1, 1, 0.5, 4);
  EXPECT_FALSE(r.verdict.holds);
  EXPECT_FALSE(r.h2.holds);
  r = check_lv_determinacy(3, 1, 0.5, 4);
  EXPECT_TRUE(r.verdict.holds);
  EXPECT_TRUE(r.h2.holds);
  EXPECT_EQ(r.coefficients[Coef::c1].baseline()(0.0), 1.5);
  EXPECT_EQ(r.coefficients[Coef::b2].baseline()(0.0), 4.0);
}

TEST(LvDeterminacy, Precondition) {
  EXPECT_THROW(check_lv_determinacy(1, 1, 1.0, 2), PreconditionError);
  EXPECT_THROW(check_lv_determinacy(1, 1, 0.5, 0.9), PreconditionError);
}

TEST(CoefficientSet, RejectsNonpositiveCompetition) {
  EXPECT_THROW(constants({1, 0, 0.5, 0.4, 0.5, 1}), ConfigError);
  const auto a = CoefficientField(PeriodicScalar::constant(1.0, 1.0));
  const auto b = CoefficientField(PeriodicScalar::constant(2.0, 1.0));
  EXPECT_THROW(CoefficientSet(a, a, a, a, a, b), ConfigError);
}

TEST(CoefficientProperties, PeriodicityAndLocality) {
  const CoefficientField f(PeriodicScalar::trig(1.5, 1.0, {{1, 0.3, 0.2}, {2, 0.1, 0.0}}),
                           SpatialBump(0.4, 2.0, 1.0));
  const CoefficientField g(
      PeriodicScalar::table(1.5, {{0.0, 1.0}, {0.4, 1.3}, {1.1, 0.8}, {1.5, 1.0}}),
      SpatialBump(-0.2, 1.0, 0.5));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ts(-10.0, 10.0);
  std::uniform_real_distribution<double> xs(-20.0, 20.0);
  for (int i = 0; i < 100; ++i) {
    const double t = ts(rng);
    const double x = xs(rng);
    EXPECT_NEAR(f(t + 1.5, x), f(t, x), 1e-12);
    EXPECT_NEAR(g(t + 1.5, x), g(t, x), 1e-12);
    const double far = (x >= 0 ? 1.0 : -1.0) * (f.bump()->support() + std::abs(x));
    EXPECT_EQ(f(t, far), f.baseline()(t));
    EXPECT_EQ(g(t, far), g.baseline()(t));
  }
}
