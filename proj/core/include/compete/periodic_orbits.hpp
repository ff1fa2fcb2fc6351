#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "compete/coefficients.hpp"

namespace compete {

/// A T-periodic scalar trajectory sampled at t_k = k T / n, k = 0..n, with
/// the derivative at each sample. Evaluation between samples is periodic
/// cubic Hermite interpolation.
class PeriodicOrbit {
 public:
  PeriodicOrbit(double period, std::vector<double> values,
                std::vector<double> derivatives, double endpoint_mismatch);

  static PeriodicOrbit constant(double period, double value,
                                std::size_t samples = 16);

  double period() const { return period_; }
  /// Number of sample intervals n (values has n + 1 entries).
  std::size_t intervals() const { return values_.size() - 1; }
  double time(std::size_t k) const;
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& derivatives() const { return derivatives_; }

  double operator()(double t) const;
  double derivative(double t) const;

  /// Periodic trapezoid mean over the samples.
  double mean() const;
  double min() const;
  double max() const;
  /// Relative |w(T) - w(0)| reported by the integrator.
  double endpoint_mismatch() const { return endpoint_mismatch_; }

  /// Callable view for building derived coefficients.
  std::function<double(double)> as_function() const;

 private:
  double period_;
  std::vector<double> values_;
  std::vector<double> derivatives_;
  double endpoint_mismatch_;
};

struct OrbitOptions {
  std::size_t samples = 2048;
  double damping = 0.5;
  std::size_t max_iterations = 10000;
  double fixed_point_tol = 1e-12;
};

/// Unique positive periodic solution of w' = w (a0(t) - b0(t) w).
PeriodicOrbit logistic_periodic(const PeriodicScalar& a0,
                                const PeriodicScalar& b0,
                                const OrbitOptions& opts = {});

/// Unique periodic solution of u' = alpha(t) u + h(t); requires mean(alpha) < 0.
PeriodicOrbit nonhomogeneous_periodic(const PeriodicScalar& alpha,
                                      const PeriodicScalar& h,
                                      const OrbitOptions& opts = {});
/// Callable form. `alpha_mean` is used for the precondition check.
PeriodicOrbit nonhomogeneous_periodic(
    double period, double alpha_mean,
    const std::function<double(double)>& alpha,
    const std::function<double(double)>& h, const OrbitOptions& opts = {});

/// Homogeneous periodic coexistence state (u0**, v0**) of the baselines.
std::pair<PeriodicOrbit, PeriodicOrbit> coexistence_homogeneous(
    const CoefficientSet& set, const OrbitOptions& opts = {});

/// Semitrivial homogeneous orbits u0* (from a1, b1) and v0* (from a2, c2).
PeriodicOrbit homogeneous_u_star(const CoefficientSet& set,
                                 const OrbitOptions& opts = {});
PeriodicOrbit homogeneous_v_star(const CoefficientSet& set,
                                 const OrbitOptions& opts = {});

/// Writes "t,value" rows at `samples` uniform times over one period.
void write_orbit_csv(std::ostream& os, const PeriodicOrbit& orbit,
                     std::size_t samples);

}  // namespace compete
