#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "compete/dispersal.hpp"

namespace compete {

enum class StepMode {
  /// Forward Euler for the Laplacian (dt <= h^2/2).
  explicit_euler,
  /// Crank-Nicolson for the Laplacian, sub-cycled so every substep keeps
  /// dt_sub / h^2 <= 1 (the monotonicity bound of the scheme).
  diffusion_implicit,
};

const char* step_mode_name(StepMode m);

/// Time step and stepping mode. The nonlocal operator is always advanced by
/// classical RK4, which is positivity preserving for dt <= 1/2.
struct SchemeConfig {
  double dt = 0.01;
  StepMode mode = StepMode::diffusion_implicit;
  /// Observation cadence in steps; 0 means once per period.
  std::size_t observer_cadence = 0;

  static SchemeConfig per_period(double period, std::size_t steps_per_period,
                                 StepMode mode = StepMode::diffusion_implicit);

  /// T / dt, throwing ConfigError when dt does not divide T.
  std::size_t steps_per_period(double period) const;
  std::size_t cadence(double period) const;
  /// Throws NumericalGuard on a stability-bound violation and ConfigError on
  /// a non-dividing dt.
  void validate(const Grid& grid, const Dispersal& dispersal,
                double period) const;
};

/// Advances u_t = A(mu) u over one time step dt in place. The mu^2 part of
/// the tilted Laplacian is not included (it is a pure growth term and belongs
/// to the reaction substep); the nonlocal tilt is built into the weights.
class DispersalStepper {
 public:
  DispersalStepper(const Grid& grid, const Dispersal& dispersal, double dt,
                   StepMode mode, double mu = 0.0);

  void advance(std::span<double> u);
  double dt() const { return dt_; }

 private:
  void advance_random_explicit(std::span<double> u);
  void advance_random_cn(std::span<double> u);
  void advance_nonlocal_rk4(std::span<double> u);
  void apply_nonlocal_op(std::span<const double> u, std::span<double> out) const;

  Grid grid_;
  Dispersal dispersal_;
  double dt_;
  StepMode mode_;
  std::size_t substeps_ = 1;
  double r_ = 0.0;
  // Crank-Nicolson: Thomas factors of (I - r/2 L).
  std::vector<double> cprime_;
  std::vector<double> denom_;
  // Nonlocal: (possibly tilted) quadrature weights.
  std::vector<double> weights_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace compete
