#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "compete/coefficients.hpp"
#include "compete/periodic_field.hpp"
#include "compete/periodic_orbits.hpp"
#include "compete/scheme.hpp"
#include "compete/spectrum.hpp"

namespace compete {

enum class Species { u, v };

struct SemitrivialOptions {
  double tol = 1e-8;
  std::size_t max_periods = 5000;
  /// Multiplies the homogeneous orbit level used as the initial datum.
  double seed_scale = 1.0;
  double tail_tol = 1e-4;
  /// Distance beyond the bump support where the tail is checked. Defaults to
  /// ten decay lengths of the linearization around the homogeneous orbit.
  std::optional<double> tail_margin;
  bool check_tail = true;
};

/// Attracting periodic solution of w_t = A w + w (a - b w) for the chosen
/// species, with the other species absent. Uses the same discrete step as
/// the full simulator so the result is a fixed point of its period map.
PeriodicField compute_semitrivial(Species species, const CoefficientSet& set,
                                  const Grid& grid, const Dispersal& dispersal,
                                  const SchemeConfig& scheme,
                                  const SemitrivialOptions& opts = {});

/// Exponential decay rate of perturbations of the homogeneous orbit.
double tail_decay_rate(Species species, const CoefficientSet& set,
                       const Dispersal& dispersal);

struct StabilityReport {
  SpectrumResult spectrum;
  double lambda = 0.0;
  double radius = 1.0;
  bool unstable = false;
  /// |radius - 1| < 1e-3: too close to call on a truncated domain.
  bool inconclusive = false;
};

/// Decoupled scalar radius of the linearization at a semitrivial state:
/// r(Phi(T,0; a2 - b2 u*)) for species u (target (u*, 0)) and
/// r(Phi(T,0; a1 - c1 v*)) for species v (target (0, v*)).
StabilityReport linearized_radius(Species target, const CoefficientSet& set,
                                  const PeriodicField& semitrivial,
                                  const Dispersal& dispersal,
                                  const SchemeConfig& scheme,
                                  const SpectrumOptions& opts = {});

/// Tabulated a_other - competition * w* at every scheme step.
PeriodicField invasion_rate_field(Species target, const CoefficientSet& set,
                                  const PeriodicField& semitrivial);

struct BumpFamily {
  std::vector<double> amplitudes;
  std::vector<double> widths;
  /// Square profiles when 0.
  double ramp = 0.0;

  static BumpFamily standard();
};

struct BumpCandidate {
  double amplitude = 0.0;
  double width = 0.0;
  double lambda = 0.0;
  /// lambda - mean(a2 - b2 u0*).
  double lambda_star = 0.0;
};

struct DestabilizingResult {
  SpatialBump bump;
  double lambda = 0.0;
  double lambda_star = 0.0;
  /// lambda(a2^0 - b2^0 u0*) of the unperturbed set.
  double lambda_base = 0.0;
  std::vector<BumpCandidate> evaluated;
};

/// Smallest-amplitude bump on a2 (widths tried in increasing order) that makes
/// lambda(a2 - b2 u*) positive. Only a2 is perturbed, so u* is the
/// homogeneous orbit. Throws PreconditionError if the unperturbed state is
/// already unstable and ConvergenceError if the family cannot destabilize it.
DestabilizingResult destabilizing_bump(const CoefficientSet& set,
                                       const Grid& grid,
                                       const Dispersal& dispersal,
                                       const SchemeConfig& scheme,
                                       const BumpFamily& family = BumpFamily::standard(),
                                       const SpectrumOptions& opts = {});

/// lambda(a* + a2 - b2 u0*) for a bump a* on a2 of the given set's baselines.
BumpCandidate evaluate_a2_bump(const CoefficientSet& set, const SpatialBump& bump,
                               const Grid& grid, const Dispersal& dispersal,
                               const SchemeConfig& scheme,
                               const SpectrumOptions& opts = {});

}  // namespace compete
