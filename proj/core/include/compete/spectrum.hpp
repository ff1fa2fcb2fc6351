#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "compete/coefficients.hpp"
#include "compete/dispersal.hpp"
#include "compete/periodic_field.hpp"
#include "compete/scheme.hpp"

namespace compete {

/// Growth coefficient a(t, x) of a linear problem, bound to a grid.
///
/// Either separable (a periodic baseline plus a spatial bump, integrated
/// exactly in time) or tabulated at the scheme steps of one period
/// (integrated with the piecewise-linear interpolant in time).
class GrowthRate {
 public:
  static GrowthRate separable(const CoefficientField& field, const Grid& grid);
  static GrowthRate tabulated(const PeriodicField& samples);

  double period() const { return period_; }
  std::size_t size() const { return size_; }
  bool spatially_uniform() const;

  /// out[j] = integral of a(s, x_j) over [t0, t1].
  void exponent(double t0, double t1, std::span<double> out) const;
  double value(double t, std::size_t j) const;
  /// a(t, x) + offset.
  GrowthRate shifted(double offset) const;

 private:
  GrowthRate() = default;

  double period_ = 1.0;
  std::size_t size_ = 0;
  double offset_ = 0.0;
  std::optional<PeriodicScalar> baseline_;
  std::vector<double> bump_;  // empty when there is no bump
  std::optional<PeriodicField> table_;
};

/// u_t = A(mu) u + a(t, x) u on a truncated grid.
struct LinearProblem {
  double mu;
  GrowthRate rate;
  Grid grid;
  Dispersal dispersal;
  SchemeConfig scheme;

  /// Validates the scheme and rejects mu > 0 on x-dependent coefficients.
  static LinearProblem make(double mu, GrowthRate rate, Grid grid,
                            Dispersal dispersal, SchemeConfig scheme);
};

/// Solution of the linear problem at t1 from u0 at t0 (Strang splitting of
/// exact growth and dispersal substeps). t1 - t0 must be a whole number of
/// scheme steps up to rounding; the last step is shortened otherwise.
Field evolve_linear(std::span<const double> u0, const LinearProblem& p,
                    double t0, double t1);

struct SpectrumOptions {
  double tol = 1e-6;
  std::size_t max_periods = 2000;
  /// Consecutive periods the ratio must be stable for.
  std::size_t stable_periods = 3;
};

struct SpectrumResult {
  double lambda = 0.0;
  Field profile;
  std::vector<double> ratios;
  std::size_t iterations = 0;
  double residual = 0.0;

  double radius(double period) const;
};

/// Power iteration on the period map from the constant field 1.
SpectrumResult principal_spectrum_point(const LinearProblem& p,
                                        const SpectrumOptions& opts = {});

/// Re-runs the computation on a domain 1.5x wider (same spacing) and returns
/// |lambda(wide) - lambda(base)|. Only meaningful for separable rates.
double domain_sensitivity(const CoefficientField& coefficient,
                          const LinearProblem& base,
                          const SpectrumOptions& opts = {});

/// tilt_rate(mu) + mean(a0): the principal spectrum point for
/// x-independent coefficients.
double lambda_homogeneous(double mu, double mean_growth,
                          const Dispersal& dispersal);

struct MonotonicityVerdict {
  bool holds = false;
  double lambda_low = 0.0;
  double lambda_high = 0.0;
};

/// Checks lambda(p_low) <= lambda(p_high) + tol after confirming
/// a_low <= a_high on the grid at every scheme step.
MonotonicityVerdict spectrum_monotonicity_check(const LinearProblem& low,
                                                const LinearProblem& high,
                                                double tol,
                                                const SpectrumOptions& opts = {});

}  // namespace compete
