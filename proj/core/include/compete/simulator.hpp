#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "compete/coefficients.hpp"
#include "compete/dispersal.hpp"
#include "compete/periodic_field.hpp"
#include "compete/scheme.hpp"

namespace compete {

struct SystemState {
  double t = 0.0;
  Field u;
  Field v;
};

/// Coefficients, grid and dispersal of the competition system, with the bump
/// profiles of all six fields cached on the grid.
class CompetitionSystem {
 public:
  CompetitionSystem(CoefficientSet set, Grid grid, Dispersal dispersal);

  const CoefficientSet& coefficients() const { return set_; }
  const Grid& grid() const { return grid_; }
  const Dispersal& dispersal() const { return dispersal_; }
  double period() const { return set_.period(); }

  /// Baselines of (a1, b1, c1, a2, b2, c2) at time t.
  std::array<double, 6> baselines(double t) const;
  /// Bump of coefficient c at grid point j.
  double bump(Coef c, std::size_t j) const {
    return bumps_[static_cast<int>(c)].empty() ? 0.0 : bumps_[static_cast<int>(c)][j];
  }
  double value(Coef c, double t, std::size_t j) const;

  /// Invariant-region bounds (sup a1 / inf b1, sup a2 / inf c2).
  std::pair<double, double> invariant_bounds() const;

 private:
  CoefficientSet set_;
  Grid grid_;
  Dispersal dispersal_;
  std::array<std::vector<double>, 6> bumps_;
};

/// Receives the state at the observation cadence.
class Observer {
 public:
  virtual ~Observer() = default;
  virtual void record(const SystemState& s) = 0;
};

/// Pointwise profile used to locate a front: profile(state, j).
using FrontProfile = std::function<double(const SystemState&, std::size_t)>;

enum class FrontMode {
  /// Largest x with profile >= level.
  leading,
  /// First x from the left where the profile drops below level.
  trailing,
};

struct FrontSample {
  double t;
  double x;
};

/// Records the interpolated position where the profile crosses `level`.
/// Throws NumericalGuard once the front comes within `guard` of the right
/// boundary. Records NaN when no crossing exists.
class FrontObserver : public Observer {
 public:
  FrontObserver(const Grid& grid, FrontProfile profile, double level,
                FrontMode mode, double guard);
  void record(const SystemState& s) override;
  const std::vector<FrontSample>& trace() const { return trace_; }

 private:
  Grid grid_;
  FrontProfile profile_;
  double level_;
  FrontMode mode_;
  double guard_;
  std::vector<FrontSample> trace_;
};

struct NormSample {
  double t;
  double u_min, u_max, v_min, v_max;
};

class NormObserver : public Observer {
 public:
  void record(const SystemState& s) override;
  const std::vector<NormSample>& trace() const { return trace_; }

 private:
  std::vector<NormSample> trace_;
};

struct DeltaSample {
  double t;
  double du;
  double dv;
};

/// sup |u - u_prev| and sup |v - v_prev| between consecutive records.
class PeriodDeltaObserver : public Observer {
 public:
  void record(const SystemState& s) override;
  const std::vector<DeltaSample>& trace() const { return trace_; }

 private:
  bool primed_ = false;
  Field u_prev_;
  Field v_prev_;
  std::vector<DeltaSample> trace_;
};

/// Lie splitting of dispersal and an exact frozen-competitor reaction.
class Simulator {
 public:
  Simulator(CompetitionSystem system, SchemeConfig scheme);

  const CompetitionSystem& system() const { return system_; }
  const SchemeConfig& scheme() const { return scheme_; }
  std::size_t steps_per_period() const { return steps_; }

  /// One step in place: dispersal over dt, then the reaction at t + dt/2.
  void step(SystemState& s);
  /// Reaction substep only (pointwise, exact, positivity preserving).
  void react(SystemState& s, double t_mid, double span) const;

  /// n periods; observers are called every `scheme.cadence(T)` steps.
  SystemState run_periods(SystemState s, std::size_t n,
                          std::span<Observer* const> observers = {});

  /// Steps the cooperative transformed system (u, v~ = v* - v). The state
  /// holds (u, v~); `v_star` must share the grid and steps per period and
  /// the state time must sit on a step mark.
  void step_transformed(SystemState& s, const PeriodicField& v_star);
  SystemState run_transformed(SystemState s, const PeriodicField& v_star,
                              std::size_t n,
                              std::span<Observer* const> observers = {});

 private:
  CompetitionSystem system_;
  SchemeConfig scheme_;
  std::size_t steps_;
  DispersalStepper u_stepper_;
  DispersalStepper v_stepper_;
};

/// Exact solution of w' = w (r - b w) after time tau with r, b frozen.
double frozen_logistic(double w, double r, double b, double tau);

/// Front initial data: `level` on x <= x0, linear ramp to 0 on [x0, x0 + w],
/// 0 beyond. Throws ConfigError unless x0 and x0 + w keep `margin` from the
/// boundaries.
Field make_front_profile(const Grid& grid, double level, double x0, double w,
                         double margin = 0.0);

/// Transformed front data (u, v~) with plateaus u_level and v_level.
std::pair<Field, Field> make_front_data(const Grid& grid, double u_level,
                                        double v_level, double x0, double w,
                                        double margin = 0.0);

/// Original-variable v = v*(t_k) - v~.
Field to_original_v(std::span<const double> v_tilde, const Field& v_star_k);

/// "x,u,v" rows.
void write_state_csv(std::ostream& os, const Grid& grid, const SystemState& s);

}  // namespace compete
