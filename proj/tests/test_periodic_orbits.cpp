#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "compete/errors.hpp"
#include "compete/periodic_orbits.hpp"

using namespace compete;

namespace {

// A(t) for a0 = 1 + 0.5 sin(2 pi t).
double A(double t) { return t + 0.25 * (1.0 - std::cos(2.0 * M_PI * t)) / M_PI; }

// Composite Simpson of exp(A) on [0, t].
double int_expA(double t) {
  const int n = 4000;
  const double h = t / n;
  double s = std::exp(A(0.0)) + std::exp(A(t));
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * std::exp(A(i * h));
  return s * h / 3.0;
}

}  // namespace

TEST(LogisticPeriodic, ConstantEquilibria) {
  auto w = logistic_periodic(PeriodicScalar::constant(1.0, 1.0), PeriodicScalar::constant(1.0, 1.0));
  EXPECT_NEAR(w.min(), 1.0, 1e-12);
  EXPECT_NEAR(w.max(), 1.0, 1e-12);
  w = logistic_periodic(PeriodicScalar::constant(1.0, 0.4), PeriodicScalar::constant(1.0, 1.0));
  EXPECT_NEAR(w(0.37), 0.4, 1e-12);
}

TEST(LogisticPeriodic, MatchesClosedForm) {
  const auto a0 = PeriodicScalar::harmonic(1.0, 1.0, 0.5);
  const auto b0 = PeriodicScalar::constant(1.0, 1.0);
  const auto w = logistic_periodic(a0, b0);
  const double w0 = (std::exp(A(1.0)) - 1.0) / int_expA(1.0);
  for (double t : {0.0, 0.13, 0.5, 0.71, 0.99}) {
    const double exact = std::exp(A(t)) * w0 / (1.0 + w0 * int_expA(t));
    EXPECT_NEAR(w(t), exact, 1e-7) << "t = " << t;
  }
  // Mean identity: the integral of a0 - b0 w over a period vanishes.
  double s = 0.0;
  const std::size_t n = w.intervals();
  for (std::size_t k = 0; k < n; ++k) s += a0(w.time(k)) - w.values()[k];
  EXPECT_NEAR(s / static_cast<double>(n), 0.0, 1e-8);
  EXPECT_LT(w.endpoint_mismatch(), 1e-9);
}

TEST(LogisticPeriodic, MeanIdentityOnRandomCoefficients) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double T = 0.5 + 2.0 * u(rng);
    const auto a0 = PeriodicScalar::trig(T, 0.2 + u(rng), {{1, 0.5 * u(rng), 6.0 * u(rng)}});
    const auto b0 = PeriodicScalar::harmonic(T, 1.0 + u(rng), 0.5 * u(rng), 6.0 * u(rng));
    const auto w = logistic_periodic(a0, b0);
    double s = 0.0;
    const std::size_t n = w.intervals();
    for (std::size_t k = 0; k < n; ++k) {
      const double t = w.time(k);
      s += a0(t) - b0(t) * w.values()[k];
    }
    EXPECT_NEAR(s / static_cast<double>(n), 0.0, 1e-8) << "set " << i;
    EXPECT_GT(w.min(), 0.0);
  }
}

TEST(LogisticPeriodic, RejectsNonpositiveMean) {
  EXPECT_THROW(logistic_periodic(PeriodicScalar::harmonic(1.0, -0.1, 0.5),
                                 PeriodicScalar::constant(1.0, 1.0)),
               PreconditionError);
}

TEST(NonhomogeneousPeriodic, Examples) {
  const auto m1 = PeriodicScalar::constant(1.0, -1.0);
  auto u = nonhomogeneous_periodic(m1, PeriodicScalar::constant(1.0, 1.0));
  EXPECT_NEAR(u(0.3), 1.0, 1e-9);
  u = nonhomogeneous_periodic(m1, PeriodicScalar::constant(1.0, 0.0));
  EXPECT_NEAR(u.max(), 0.0, 1e-14);
  u = nonhomogeneous_periodic(m1, PeriodicScalar::trig(1.0, 1.0, {{1, 1.0, M_PI / 2}}));
  const double w = 2.0 * M_PI;
  for (double t : {0.0, 0.2, 0.45, 0.8}) {
    const double exact = 1.0 + (std::cos(w * t) + w * std::sin(w * t)) / (1.0 + w * w);
    EXPECT_NEAR(u(t), exact, 1e-9) << "t = " << t;
  }
  EXPECT_GT(u.min(), 0.0);
}

TEST(NonhomogeneousPeriodic, RejectsNonnegativeMean) {
  EXPECT_THROW(nonhomogeneous_periodic(PeriodicScalar::constant(1.0, 0.0),
                                       PeriodicScalar::constant(1.0, 1.0)),
               PreconditionError);
}

TEST(CoexistenceHomogeneous, ConstantInteriorEquilibria) {
  auto [u, v] = coexistence_homogeneous(CoefficientSet::constants({1, 1, 0.5, 1, 0.5, 1}));
  EXPECT_NEAR(u(0.2), 2.0 / 3.0, 1e-9);
  EXPECT_NEAR(v(0.7), 2.0 / 3.0, 1e-9);
  std::tie(u, v) = coexistence_homogeneous(CoefficientSet::constants({1, 1, 0.25, 1, 0.25, 1}));
  EXPECT_NEAR(u(0.0), 0.8, 1e-9);
  EXPECT_NEAR(v(0.5), 0.8, 1e-9);
  EXPECT_THROW(coexistence_homogeneous(CoefficientSet::constants({2, 1, 0.5, 1, 0.5, 1})),
               PreconditionError);
}

TEST(CoexistenceHomogeneous, PeriodicResidual) {
  const auto a1 = PeriodicScalar::harmonic(1.0, 1.0, 0.2);
  const auto set = CoefficientSet::constants({1, 1, 0.5, 1, 0.5, 1})
                       .with_field(Coef::a1, CoefficientField(a1));
  const auto [u, v] = coexistence_homogeneous(set);
  for (std::size_t k = 0; k <= u.intervals(); k += 64) {
    const double t = u.time(k);
    const double ru = u.derivatives()[k] - u.values()[k] * (a1(t) - u.values()[k] - 0.5 * v.values()[k]);
    const double rv = v.derivatives()[k] - v.values()[k] * (1.0 - 0.5 * u.values()[k] - v.values()[k]);
    EXPECT_LT(std::abs(ru), 1e-8);
    EXPECT_LT(std::abs(rv), 1e-8);
  }
  EXPECT_GT(u.min(), 0.0);
  EXPECT_GT(v.min(), 0.0);
}

TEST(HomogeneousSemitrivial, CanonicalLevels) {
  const auto set = CoefficientSet::constants({1, 1, 0.5, 0.4, 0.5, 1});
  EXPECT_NEAR(homogeneous_u_star(set)(0.3), 1.0, 1e-12);
  EXPECT_NEAR(homogeneous_v_star(set)(0.3), 0.4, 1e-12);
}
