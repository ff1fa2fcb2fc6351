#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "compete/errors.hpp"
#include "compete/verify.hpp"

using namespace compete;

namespace {

const auto kCanonical = CoefficientSet::constants({1, 1, 0.5, 0.4, 0.5, 1});
const auto kSymmetric = CoefficientSet::constants({1, 1, 0.5, 1, 0.5, 1});
const SchemeConfig kScheme{0.01, StepMode::diffusion_implicit, 0};

}  // namespace

// With constant coefficients and eps = 0 the ansatz is explicit:
// phi = 1, lambda = mu^2 + 0.8 and (mu^2 - lambda + 0.4 - 0.8) psi + 0.2 = 0.
TEST(Ansatz, ConstantCaseIsExplicit) {
  const double mu = std::sqrt(0.8);
  const auto p = build_ansatz_pair(kCanonical, 0.0, mu, Dispersal::random());
  EXPECT_NEAR(p.lambda, 1.6, 1e-10);
  EXPECT_NEAR(p.phi.min(), 1.0, 1e-10);
  EXPECT_NEAR(p.phi.max(), 1.0, 1e-10);
  EXPECT_NEAR(p.psi.min(), 1.0 / 6.0, 1e-8);
  EXPECT_NEAR(p.psi.max(), 1.0 / 6.0, 1e-8);
}

TEST(Ansatz, PeriodicGrowthKeepsTheMeanRate) {
  const auto set = kCanonical.with_field(
      Coef::a1, CoefficientField(PeriodicScalar::harmonic(1.0, 1.0, 0.1)));
  const double mu = std::sqrt(0.8);
  const auto p = build_ansatz_pair(set, 0.0, mu, Dispersal::random());
  EXPECT_NEAR(p.lambda, 1.6, 1e-8);
  EXPECT_GT(p.phi.max() - p.phi.min(), 1e-3);
  const auto r = ansatz_residual(p);
  EXPECT_LT(r.phi, 1e-8);
  EXPECT_LT(r.psi, 1e-8);
}

TEST(Ansatz, ZeroTiltGivesTheMean) {
  const auto p = build_ansatz_pair(kCanonical, 0.0, 0.0, Dispersal::random());
  EXPECT_NEAR(p.lambda, 0.8, 1e-10);
  EXPECT_EQ(p.tilt, 0.0);
}

TEST(ShiftedInequalities, HoldForSmallEpsilon) {
  const auto v = check_shifted_H2(kCanonical, 0.01);
  EXPECT_TRUE(v.holds) << v.detail;
  EXPECT_NEAR(v.margins[0], 1.2 + 0.004 - 0.4 * 0.51 * 0.49 / 0.99, 1e-12);
  EXPECT_NEAR(v.margins[1], 0.8, 1e-12);
}

// Pushing c1 toward the H2 boundary shrinks the H2 margin, and every ansatz
// inequality margin shrinks with it.
TEST(AnsatzInequalities, MarginsFollowTheH2Margin) {
  std::vector<double> prev;
  double prev_h2 = INFINITY;
  for (double c1 : {0.5, 1.0, 1.5, 2.0, 2.3}) {
    const auto set = CoefficientSet::constants({1, 1, c1, 0.4, 0.5, 1});
    const auto h2 = check_shifted_H2(set, 0.01);
    const double h2m = std::min(h2.margins[0], h2.margins[1]);
    const auto v = check_ansatz_inequalities(make_supersolution(set, 0.01, Dispersal::random()));
    EXPECT_TRUE(v.holds) << "c1 " << c1;
    EXPECT_LT(h2m, prev_h2);
    for (std::size_t i = 0; i < prev.size(); ++i) EXPECT_LT(v.margins[i], prev[i]) << "c1 " << c1;
    prev = v.margins;
    prev_h2 = h2m;
  }
  EXPECT_EQ(prev.size(), 4u);
}

TEST(Supersolution, InequalitiesAndResidual) {
  const auto spec = make_supersolution(kCanonical, 0.05, Dispersal::random());
  const auto ineq = check_ansatz_inequalities(spec);
  EXPECT_TRUE(ineq.holds) << ineq.detail;
  EXPECT_GE(spec.k * spec.m, 1.0);
  EXPECT_LT((spec.k - 1) * spec.m, 1.0);
  const Grid grid(-40.0, 160.0, 2001);
  std::vector<double> times;
  for (int k = 0; k <= 8; ++k) times.push_back(0.5 * k);
  const auto rep = supersolution_residual(spec, grid, Dispersal::random(), times, kScheme.dt);
  EXPECT_TRUE(rep.pass) << "min margin " << rep.min_margin;
  EXPECT_GT(rep.points, 0u);
}

TEST(Supersolution, FrontPositionRelations) {
  const auto spec = make_supersolution(kCanonical, 0.05, Dispersal::random());
  const auto doubled = spec.with_K(2.0 * spec.K);
  for (double t : {0.0, 0.3, 1.7}) {
    EXPECT_NEAR(doubled.xi(t) - spec.xi(t), std::log(2.0) / spec.mu(), 1e-12);
    EXPECT_NEAR(spec.u_plus(t, spec.xi(t)), spec.k * spec.M, 1e-8);
  }
  EXPECT_EQ(spec.g1(spec.M + 1.0), spec.M);
  EXPECT_EQ(spec.g1(0.5 * spec.M), 0.5 * spec.M);
}

TEST(MonotoneCoexistence, ConstantCaseConvergesToTwoThirds) {
  const Grid grid(-10.0, 10.0, 101);
  const auto r = monotone_coexistence(kSymmetric, grid, Dispersal::random(), kScheme);
  for (const PeriodicField* f : {&r.upper_u, &r.upper_v, &r.lower_u, &r.lower_v}) {
    EXPECT_NEAR(f->sup(), 2.0 / 3.0, 1e-4);
    EXPECT_NEAR(f->inf(), 2.0 / 3.0, 1e-4);
    EXPECT_LT(f->wrap_residual(), 1e-6);
  }
  for (std::size_t j = 0; j < grid.size(); ++j) {
    EXPECT_GE(r.upper_u.at_step(0)[j], r.lower_u.at_step(0)[j] - 1e-10);
    EXPECT_GE(r.lower_v.at_step(0)[j], r.upper_v.at_step(0)[j] - 1e-10);
  }
  EXPECT_LE(r.max_violation, 1e-10);
  EXPECT_NEAR(r.lambda_u, 0.5, 1e-5);
  EXPECT_NEAR(r.lambda_v, 0.5, 1e-5);
}

TEST(MonotoneCoexistence, RequiresBothSemitrivialsUnstable) {
  const Grid grid(-10.0, 10.0, 101);
  EXPECT_THROW(monotone_coexistence(kCanonical, grid, Dispersal::random(), kScheme),
               PreconditionError);
}

TEST(Persistence, CoexistenceExclusionAndZeroV) {
  const Grid grid(-10.0, 10.0, 101);
  PersistenceOptions opts;
  opts.trials = 3;
  const auto co = persistence_probe(kSymmetric, grid, Dispersal::random(), kScheme, opts);
  EXPECT_TRUE(co.all_settled);
  EXPECT_FALSE(co.any_failed);
  EXPECT_NEAR(co.eta, 2.0 / 3.0, 1e-3);

  opts.mode = PersistenceMode::exclusion;
  const auto ex = persistence_probe(kCanonical, grid, Dispersal::random(), kScheme, opts);
  EXPECT_TRUE(ex.all_settled);
  EXPECT_FALSE(ex.any_failed);
  EXPECT_NEAR(ex.eta, 0.4, 1e-3);

  opts.zero_v = true;
  const auto zv = persistence_probe(kCanonical, grid, Dispersal::random(), kScheme, opts);
  EXPECT_FALSE(zv.any_failed);
  EXPECT_GT(zv.eta, 0.3);

  opts.mode = PersistenceMode::coexistence;
  opts.zero_v = false;
  EXPECT_THROW(persistence_probe(kCanonical, grid, Dispersal::random(), kScheme, opts),
               PreconditionError);
}

TEST(UnitDraw, RangeAndEndpoints) {
  EXPECT_EQ(unit_draw(0), 0.0);
  EXPECT_LT(unit_draw(std::numeric_limits<std::uint64_t>::max()), 1.0);
  std::mt19937_64 rng(11);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = unit_draw(rng());
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_LT(lo, 0.01);
  EXPECT_GT(hi, 0.99);
}
