#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "compete/coefficients.hpp"
#include "compete/periodic_field.hpp"
#include "compete/periodic_orbits.hpp"
#include "compete/scheme.hpp"
#include "compete/semitrivial.hpp"
#include "compete/spectrum.hpp"

namespace compete {

/// Shifted baselines used by the upper-bound construction:
/// a1+e, b1-e, c1-e, a2+e+2e sup v0*, b2+e, c2+e.
CoefficientSet epsilon_shifted(const CoefficientSet& set, double eps);

/// The H2 inequalities with the shifted coefficients (the unshifted
/// envelopes of a2 and c2 stay in the ratios). Margins are the minima over
/// one period of the two expressions.
HypothesisVerdict check_shifted_H2(const CoefficientSet& set, double eps,
                                   std::size_t samples_per_period = 256);

struct AnsatzPair {
  double eps = 0.0;
  double mu = 0.0;
  double tilt = 0.0;
  /// lambda_eps(mu) = tilt + mean(a1e - c1e v0*).
  double lambda = 0.0;
  PeriodicOrbit phi;
  PeriodicOrbit psi;
  PeriodicOrbit v0;
  CoefficientSet shifted;
};

/// phi(t) = exp(int_0^t (alpha - mean alpha)) and psi the periodic solution
/// of psi' = (tilt - lambda + a2e - 2 c2e v0*) psi + b2e v0* phi.
AnsatzPair build_ansatz_pair(const CoefficientSet& set, double eps, double mu,
                             const Dispersal& dispersal,
                             const OrbitOptions& opts = {});

struct AnsatzResidual {
  double phi = 0.0;
  double psi = 0.0;
};

/// Max residual of both ansatz equations using fourth-order periodic
/// differences of the stored samples.
AnsatzResidual ansatz_residual(const AnsatzPair& pair);

/// The exponential super-solution of the upper-bound proof.
struct SupersolutionSpec {
  AnsatzPair ansatz;
  double c = 0.0;
  double K = 10.0;
  double M = 0.0;       // M*
  double m = 0.0;       // inf psi / phi
  int k = 1;            // smallest integer with k m >= 1
  double K_star = 0.0;  // k M* sup b2e
  EnvelopeTable shifted_env;

  double mu() const { return ansatz.mu; }
  /// xi*(t; K) = c t - ln(k M* / (K phi(t))) / mu.
  double xi(double t) const;
  double u_plus(double t, double x) const;
  double v_plus(double t, double x) const;
  /// Clamped identity: v below M*, M* above.
  double g1(double v) const;
  SupersolutionSpec with_K(double K) const;
};

/// mu* minimizes lambda_eps(mu)/mu. `extra_sup` adds sup u*, sup v* of the
/// perturbed semitrivials to M*. Throws PreconditionError when the shifted
/// H1/H2 inequalities fail.
SupersolutionSpec make_supersolution(const CoefficientSet& set, double eps,
                                     const Dispersal& dispersal, double K = 10.0,
                                     std::optional<double> extra_sup = std::nullopt);

/// c1e psi <= b1e phi, c2e psi <= b2e phi and the two envelope bounds
/// psi <= (b1Le/c1Me) phi, psi <= (b2Le/c2Me) phi at every orbit sample.
HypothesisVerdict check_ansatz_inequalities(const SupersolutionSpec& spec);

struct ResidualReport {
  double min_u = 0.0;
  double min_v = 0.0;
  /// Smallest residual + slack over the region (>= 0 means PASS).
  double min_margin = 0.0;
  std::size_t points = 0;
  bool pass = false;
};

/// u+_t - A u+ - F_eps and v+_t - A v+ - G_eps on interior grid points with
/// x >= xi*(t; K) (or x < xi* when `outside` is set), at the given times.
/// Slack is 10 (h^2 + dt) times the local magnitude.
ResidualReport supersolution_residual(const SupersolutionSpec& spec,
                                      const Grid& grid, const Dispersal& dispersal,
                                      const std::vector<double>& times, double dt,
                                      bool outside = false);

struct FrontComparison {
  double K = 0.0;
  /// max over the region of u - u+ and v~ - v+ (<= 0 means below).
  double max_excess_u = 0.0;
  double max_excess_v = 0.0;
  std::size_t checks = 0;
};

/// Runs the transformed system from front data and compares it with the
/// super-solution on x >= xi*(t; K) at every step. K starts at spec.K and
/// doubles until the initial data lie below (u+, v+) and xi*(0; K) is past
/// the bump support.
FrontComparison supersolution_front_check(const SupersolutionSpec& spec,
                                          const CoefficientSet& set,
                                          const Grid& grid,
                                          const Dispersal& dispersal,
                                          const SchemeConfig& scheme,
                                          std::size_t periods, double x0,
                                          double ramp = 1.0);

struct CoexistenceOptions {
  double seed_eps = 1e-3;
  double tol = 1e-6;
  std::size_t max_periods = 3000;
  double slack = 1e-10;
  SemitrivialOptions semitrivial;
  SpectrumOptions spectrum;
};

struct CoexistenceResult {
  PeriodicField upper_u, upper_v;
  PeriodicField lower_u, lower_v;
  std::size_t periods = 0;
  /// Largest violation of the four monotonicity relations (<= slack).
  double max_violation = 0.0;
  double lambda_u = 0.0;  // lambda(a2 - b2 u*)
  double lambda_v = 0.0;  // lambda(a1 - c1 v*)
};

/// Monotone iteration from (u*, eps phi_v) and (eps phi_u, v*).
CoexistenceResult monotone_coexistence(const CoefficientSet& set, const Grid& grid,
                                       const Dispersal& dispersal,
                                       const SchemeConfig& scheme,
                                       const CoexistenceOptions& opts = {});

enum class PersistenceMode {
  /// Both species bounded away from zero.
  coexistence,
  /// u bounded away from zero and v away from v*.
  exclusion,
};

struct PersistenceOptions {
  PersistenceMode mode = PersistenceMode::coexistence;
  std::size_t trials = 5;
  std::uint64_t seed = 1;
  std::size_t periods = 200;
  double settle_tol = 1e-4;
  double failure_floor = 1e-8;
  /// Start every trial with v = 0.
  bool zero_v = false;
  SemitrivialOptions semitrivial;
};

struct PersistenceTrial {
  double eta = 0.0;
  double t_detect = 0.0;
  bool settled = false;
  bool failed = false;
};

struct PersistenceReport {
  double eta = 0.0;
  std::vector<PersistenceTrial> trials;
  bool all_settled = true;
  bool any_failed = false;
};

PersistenceReport persistence_probe(const CoefficientSet& set, const Grid& grid,
                                    const Dispersal& dispersal,
                                    const SchemeConfig& scheme,
                                    const PersistenceOptions& opts = {});

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
double unit_draw(std::uint64_t bits);

}  // namespace compete
