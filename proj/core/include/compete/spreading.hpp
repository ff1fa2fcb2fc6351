#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "compete/coefficients.hpp"
#include "compete/dispersal.hpp"
#include "compete/scheme.hpp"
#include "compete/semitrivial.hpp"
#include "compete/simulator.hpp"

namespace compete {

enum class SpeedKind { theoretical, empirical_lower, empirical_upper };

const char* speed_kind_name(SpeedKind k);

struct DispersionPoint {
  double mu;
  double lambda;
  double ratio;  // lambda / mu
};

struct SpeedEstimate {
  SpeedKind kind = SpeedKind::theoretical;
  double c = 0.0;
  // Theoretical estimates.
  double mu_star = std::numeric_limits<double>::quiet_NaN();
  double alpha_mean = std::numeric_limits<double>::quiet_NaN();
  bool unimodal = true;
  std::vector<DispersionPoint> table;
  // Empirical estimates.
  double std_error = 0.0;
  double r2 = 1.0;
  double window_t0 = 0.0;
  double window_t1 = 0.0;
  std::size_t window_points = 0;
};

struct DispersionOptions {
  double mu_lo = 0.01;
  double mu_hi = 10.0;
  /// Coarse grid used for the unimodality check and the bracket.
  std::size_t coarse_points = 1000;
  /// Golden-section termination width in mu.
  double tol = 1e-10;
  /// Skip refinement and report the minimum of a grid with spacing grid_step.
  bool grid_only = false;
  double grid_step = 1e-3;
};

/// c0* = inf over mu > 0 of lambda(mu, alpha) / mu for an x-independent
/// effective growth rate with the given mean.
SpeedEstimate minimize_dispersion(double alpha_mean, const Dispersal& dispersal,
                                  const DispersionOptions& opts = {});

/// Theoretical spreading speed of the baselines: alpha = a1 - c1 v0*.
/// Throws PreconditionError when H1 fails or mean(alpha) <= 0.
SpeedEstimate dispersion_speed(const CoefficientSet& set,
                               const Dispersal& dispersal,
                               const DispersionOptions& opts = {});

/// mean(a1 - c1 v0*) of the baselines.
double effective_growth_mean(const CoefficientSet& set);

struct FitWindow {
  /// Fraction of the records (from the end) used for the fit.
  double fraction = 0.4;
  /// Records always discarded at the start.
  std::size_t min_discard = 20;
  std::size_t min_points = 10;
  /// Only records with x >= min_x enter the fit.
  double min_x = -std::numeric_limits<double>::infinity();
  /// Allowed backward motion between consecutive records.
  double monotone_tol = 0.5;
};

/// Least-squares slope of front positions recorded once per period.
SpeedEstimate empirical_front_speed(const std::vector<FrontSample>& trace,
                                    SpeedKind kind, const FitWindow& window = {});

struct FrontRunOptions {
  std::size_t periods = 100;
  double x0 = -20.0;
  double ramp = 1.0;
  double theta = 0.5;
  /// Plateau of the initial data as a fraction of (u0*(0), v0*(0)).
  double u_fraction = 0.5;
  double v_fraction = 0.5;
  /// Distance the front must have passed beyond the bump support before its
  /// positions enter the fit.
  double clearance = 50.0;
  FitWindow window;
  SemitrivialOptions semitrivial;
};

struct SpeedInterval {
  SpeedEstimate lower;
  SpeedEstimate upper;
  SpeedEstimate theoretical;
  std::vector<FrontSample> lower_trace;
  std::vector<FrontSample> upper_trace;
};

/// Runs the transformed system from front data and fits the persistence
/// (lower) and leading-edge (upper) fronts.
SpeedInterval speed_interval(const CoefficientSet& set, const Dispersal& dispersal,
                             const Grid& grid, const SchemeConfig& scheme,
                             const FrontRunOptions& opts = {});

struct ScalarFrontResult {
  SpeedEstimate estimate;
  std::vector<FrontSample> trace;
};

/// Scalar control: w_t = A w + w (a - b w) from a step, leading front at
/// theta * a / b.
ScalarFrontResult scalar_front_speed(double a, double b, const Dispersal& dispersal,
                                     const Grid& grid, const SchemeConfig& scheme,
                                     const FrontRunOptions& opts = {});

struct SweepRow {
  double eps;
  double c0;
  double diff;  // c0(eps) - c0(0)
};

struct SweepTable {
  Coef target;
  double c0_base = 0.0;
  std::vector<SweepRow> rows;
  /// |diff| shrinks monotonically as eps decreases.
  bool monotone = true;
};

/// c0* of the baselines with eps added to the baseline of `target`.
SweepTable continuity_sweep(const CoefficientSet& set, Coef target,
                            const std::vector<double>& eps,
                            const Dispersal& dispersal,
                            const DispersionOptions& opts = {});

}  // namespace compete
