#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "compete/errors.hpp"
#include "compete/spectrum.hpp"

using namespace compete;

namespace {

const SchemeConfig kScheme{0.01, StepMode::diffusion_implicit, 0};

LinearProblem problem(const CoefficientField& a, const Grid& g, double mu = 0.0,
                      Dispersal d = Dispersal::random()) {
  return LinearProblem::make(mu, GrowthRate::separable(a, g), g, std::move(d), kScheme);
}

}  // namespace

TEST(EvolveLinear, HomogeneousExactGrowth) {
  const Grid g(-5.0, 5.0, 51);
  const CoefficientField a(PeriodicScalar::harmonic(1.0, 0.3, 0.5));
  const auto p = problem(a, g);
  const Field u = evolve_linear(Field(g.size(), 1.0), p, 0.2, 1.7);
  const double exact = std::exp(a.baseline().integral(0.2, 1.7));
  for (double v : u) EXPECT_NEAR(v, exact, 1e-6 * exact);
  for (double v : evolve_linear(Field(g.size(), 0.0), p, 0.0, 1.0)) EXPECT_EQ(v, 0.0);
}

TEST(EvolveLinear, Superposition) {
  const Grid g(-10.0, 10.0, 201);
  const CoefficientField a(PeriodicScalar::harmonic(1.0, 0.1, 0.3), SpatialBump(0.5, 1.0, 1.0));
  const auto p = problem(a, g);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Field u(g.size()), w(g.size()), s(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    u[j] = d(rng);
    w[j] = d(rng);
    s[j] = u[j] + w[j];
  }
  const Field eu = evolve_linear(u, p, 0.0, 1.0);
  const Field ew = evolve_linear(w, p, 0.0, 1.0);
  const Field es = evolve_linear(s, p, 0.0, 1.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_NEAR(es[j], eu[j] + ew[j], 1e-8);
    EXPECT_GE(eu[j], 0.0);
  }
}

TEST(PrincipalSpectrum, HomogeneousMean) {
  const Grid g(-5.0, 5.0, 51);
  const auto r = principal_spectrum_point(
      problem(CoefficientField(PeriodicScalar::harmonic(1.0, 1.0, 0.5)), g));
  EXPECT_NEAR(r.lambda, 1.0, 1e-5);
  EXPECT_LT(r.residual, 1e-6);
}

TEST(PrincipalSpectrum, TiltedConstantRates) {
  const Grid g(-5.0, 5.0, 101);
  const CoefficientField a(PeriodicScalar::constant(1.0, 0.8));
  EXPECT_NEAR(principal_spectrum_point(problem(a, g, 1.0)).lambda, 1.8, 1e-5);

  const Grid gn(-2.5, 2.5, 501);
  const auto d = Dispersal::nonlocal(Kernel(KernelShape::uniform, 1.0, gn.h()));
  const double lam = principal_spectrum_point(problem(a, gn, 1.0, d)).lambda;
  EXPECT_NEAR(lam, std::sinh(1.0) - 1.0 + 0.8, 1e-4);
  EXPECT_NEAR(lam, lambda_homogeneous(1.0, 0.8, d), 1e-8);
}

TEST(PrincipalSpectrum, TiltRejectedOnBumpedRates) {
  const Grid g(-5.0, 5.0, 51);
  const CoefficientField a(PeriodicScalar::constant(1.0, 0.8), SpatialBump(0.2, 1.0, 0.5));
  EXPECT_THROW(problem(a, g, 0.5), PreconditionError);
}

TEST(PrincipalSpectrum, RandomHomogeneousMeanLaw) {
  const Grid g(-3.0, 3.0, 31);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double mean = -1.0 + 2.0 * d(rng);
    const CoefficientField a(PeriodicScalar::trig(
        1.0, mean, {{1, d(rng), 6.0 * d(rng)}, {2, 0.5 * d(rng), 6.0 * d(rng)}}));
    EXPECT_NEAR(principal_spectrum_point(problem(a, g)).lambda, mean, 1e-5) << i;
  }
}

TEST(PrincipalSpectrum, BumpRaisesLambdaAndProfileIsPositive) {
  const Grid g(-40.0, 40.0, 401);
  const CoefficientField base(PeriodicScalar::harmonic(1.0, -0.2, 0.3));
  const CoefficientField bumped = base.with_bump(SpatialBump(0.6, 2.0, 0.0));
  const auto r = principal_spectrum_point(problem(bumped, g));
  EXPECT_GE(r.lambda, -0.2 - 1e-5);
  for (std::size_t j = 1; j + 1 < g.size(); ++j) EXPECT_GT(r.profile[j], 0.0);
  EXPECT_NEAR(*std::max_element(r.profile.begin(), r.profile.end()), 1.0, 1e-12);
  EXPECT_LT(domain_sensitivity(bumped, problem(bumped, g)), 1e-4);
}

// Independent oracle: for a time-constant rate the period map is close to
// exp(T (L + a)), so lambda is the top eigenvalue of the discrete operator.
TEST(PrincipalSpectrum, MatchesTopEigenvalueOfDiscreteOperator) {
  const Grid g(-20.0, 20.0, 201);
  const CoefficientField a(PeriodicScalar::constant(1.0, -0.3), SpatialBump(0.8, 1.5, 0.0));
  const auto r = principal_spectrum_point(problem(a, g));
  const auto n = static_cast<Eigen::Index>(g.size());
  const double h2 = g.h() * g.h();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    m(j, j) = -2.0 / h2 + a.baseline()(0.0) + a.bump_cell(g.x(jj), g.h());
    if (j == 0) {
      m(j, 1) = 2.0 / h2;
    } else if (j == n - 1) {
      m(j, n - 2) = 2.0 / h2;
    } else {
      m(j, j - 1) = 1.0 / h2;
      m(j, j + 1) = 1.0 / h2;
    }
  }
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues();
  const double top = ev.real().maxCoeff();
  EXPECT_NEAR(r.lambda, top, 1e-4);
}

TEST(Monotonicity, Examples) {
  const Grid g(-20.0, 20.0, 201);
  const CoefficientField a1(PeriodicScalar::harmonic(1.0, 0.1, 0.4));
  const auto p1 = problem(a1, g);
  auto v = spectrum_monotonicity_check(p1, p1, 1e-8);
  EXPECT_TRUE(v.holds);
  EXPECT_DOUBLE_EQ(v.lambda_low, v.lambda_high);

  const auto p2 = problem(a1.with_bump(SpatialBump(0.5, 1.0, 1.0)), g);
  v = spectrum_monotonicity_check(p1, p2, 1e-8);
  EXPECT_TRUE(v.holds);
  EXPECT_GE(v.lambda_high, v.lambda_low);

  const auto p3 = problem(CoefficientField(a1.baseline().shifted(0.3)), g);
  v = spectrum_monotonicity_check(p1, p3, 1e-8);
  EXPECT_NEAR(v.lambda_high - v.lambda_low, 0.3, 1e-5);

  EXPECT_THROW(spectrum_monotonicity_check(p2, p1, 1e-8), PreconditionError);
}

TEST(PrincipalSpectrum, SchemeIndependence) {
  const CoefficientField a(PeriodicScalar::harmonic(1.0, -0.1, 0.3), SpatialBump(0.5, 1.0, 1.0));
  const Grid g1(-30.0, 30.0, 301);
  const Grid g2(-30.0, 30.0, 601);
  const double l1 = principal_spectrum_point(problem(a, g1)).lambda;
  const auto p2 = LinearProblem::make(0.0, GrowthRate::separable(a, g2), g2, Dispersal::random(),
                                      SchemeConfig{0.005, StepMode::diffusion_implicit, 0});
  const double l2 = principal_spectrum_point(p2).lambda;
  EXPECT_LT(std::abs(l1 - l2), 1e-4);
}

// Rate a2 + bump - b2 u0* of the destabilizing search on the canonical set.
TEST(PrincipalSpectrum, SchemeIndependenceOnSquareBump) {
  const CoefficientField a(PeriodicScalar::constant(1.0, -0.1),
                           SpatialBump::with_width(0.2, 8.0, 0.0));
  const Grid g1(-40.0, 40.0, 401);
  const Grid g2(-40.0, 40.0, 801);
  const double l1 = principal_spectrum_point(problem(a, g1)).lambda;
  const auto p2 = LinearProblem::make(0.0, GrowthRate::separable(a, g2), g2, Dispersal::random(),
                                      SchemeConfig{0.005, StepMode::diffusion_implicit, 0});
  EXPECT_LT(std::abs(l1 - principal_spectrum_point(p2).lambda), 1e-4);
}
