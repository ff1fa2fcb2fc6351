#include "compete/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "compete/errors.hpp"

namespace compete {

CompetitionSystem::CompetitionSystem(CoefficientSet set, Grid grid,
                                     Dispersal dispersal)
    : set_(std::move(set)), grid_(std::move(grid)), dispersal_(std::move(dispersal)) {
  for (Coef c : kAllCoefs) {
    const auto& f = set_[c];
    if (!f.has_bump()) continue;
    auto& b = bumps_[static_cast<int>(c)];
    b.resize(grid_.size());
    for (std::size_t j = 0; j < grid_.size(); ++j) b[j] = f.bump_cell(grid_.x(j), grid_.h());
  }
}

std::array<double, 6> CompetitionSystem::baselines(double t) const {
  std::array<double, 6> out{};
  for (Coef c : kAllCoefs) out[static_cast<int>(c)] = set_[c].baseline()(t);
  return out;
}

double CompetitionSystem::value(Coef c, double t, std::size_t j) const {
  return set_[c].baseline()(t) + bump(c, j);
}

std::pair<double, double> CompetitionSystem::invariant_bounds() const {
  const auto a1 = set_[Coef::a1].bounds();
  const auto b1 = set_[Coef::b1].bounds();
  const auto a2 = set_[Coef::a2].bounds();
  const auto c2 = set_[Coef::c2].bounds();
  return {a1.second / b1.first, a2.second / c2.first};
}

// ---------------------------------------------------------------------------

FrontObserver::FrontObserver(const Grid& grid, FrontProfile profile,
                             double level, FrontMode mode, double guard)
    : grid_(grid), profile_(std::move(profile)), level_(level), mode_(mode),
      guard_(guard) {}

void FrontObserver::record(const SystemState& s) {
  const std::size_t n = grid_.size();
  const double h = grid_.h();
  double x = std::numeric_limits<double>::quiet_NaN();
  if (mode_ == FrontMode::leading) {
    for (std::size_t j = n; j-- > 0;) {
      const double p = profile_(s, j);
      if (p >= level_) {
        if (j + 1 == n) {
          x = grid_.x_max();
        } else {
          const double q = profile_(s, j + 1);
          x = grid_.x(j) + h * (p - level_) / (p - q);
        }
        break;
      }
    }
  } else {
    double prev = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double p = profile_(s, j);
      if (p < level_) {
        x = (j == 0) ? grid_.x_min()
                     : grid_.x(j - 1) + h * (prev - level_) / (prev - p);
        break;
      }
      prev = p;
    }
    if (std::isnan(x)) x = grid_.x_max();
  }
  trace_.push_back({s.t, x});
  if (!std::isnan(x) && x > grid_.x_max() - guard_) {
    throw NumericalGuard(fmt::format(
        "front left the domain: x = {} at t = {} is within {} of the boundary", x,
        s.t, guard_));
  }
}

void NormObserver::record(const SystemState& s) {
  const auto [umin, umax] = std::minmax_element(s.u.begin(), s.u.end());
  const auto [vmin, vmax] = std::minmax_element(s.v.begin(), s.v.end());
  trace_.push_back({s.t, *umin, *umax, *vmin, *vmax});
}

void PeriodDeltaObserver::record(const SystemState& s) {
  if (primed_) {
    double du = 0.0, dv = 0.0;
    for (std::size_t j = 0; j < s.u.size(); ++j) {
      du = std::max(du, std::abs(s.u[j] - u_prev_[j]));
      dv = std::max(dv, std::abs(s.v[j] - v_prev_[j]));
    }
    trace_.push_back({s.t, du, dv});
  }
  u_prev_ = s.u;
  v_prev_ = s.v;
  primed_ = true;
}

// ---------------------------------------------------------------------------

double frozen_logistic(double w, double r, double b, double tau) {
  if (w == 0.0) return 0.0;
  const double x = r * tau;
  const double grow = std::exp(x);
  // (e^{r tau} - 1) / r, continuous through r = 0.
  const double phi = std::abs(x) < 1e-8 ? tau * (1.0 + 0.5 * x) : std::expm1(x) / r;
  return w * grow / (1.0 + b * w * phi);
}

Simulator::Simulator(CompetitionSystem system, SchemeConfig scheme)
    : system_(std::move(system)),
      scheme_(scheme),
      steps_(scheme.steps_per_period(system_.period())),
      u_stepper_(system_.grid(), system_.dispersal(), scheme.dt, scheme.mode),
      v_stepper_(system_.grid(), system_.dispersal(), scheme.dt, scheme.mode) {
  scheme_.validate(system_.grid(), system_.dispersal(), system_.period());
}

void Simulator::react(SystemState& s, double t_mid, double span) const {
  const auto base = system_.baselines(t_mid);
  const auto idx = [](Coef c) { return static_cast<int>(c); };
  const double half = 0.5 * span;
  const std::size_t n = s.u.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double a1 = base[idx(Coef::a1)] + system_.bump(Coef::a1, j);
    const double b1 = base[idx(Coef::b1)] + system_.bump(Coef::b1, j);
    const double c1 = base[idx(Coef::c1)] + system_.bump(Coef::c1, j);
    const double a2 = base[idx(Coef::a2)] + system_.bump(Coef::a2, j);
    const double b2 = base[idx(Coef::b2)] + system_.bump(Coef::b2, j);
    const double c2 = base[idx(Coef::c2)] + system_.bump(Coef::c2, j);
    double u = s.u[j];
    double v = s.v[j];
    // Symmetric composition of the two frozen-competitor logistic flows.
    u = frozen_logistic(u, a1 - c1 * v, b1, half);
    v = frozen_logistic(v, a2 - b2 * u, c2, span);
    u = frozen_logistic(u, a1 - c1 * v, b1, half);
    s.u[j] = u;
    s.v[j] = v;
  }
}

namespace {

void guard_finite(const SystemState& s) {
  for (std::size_t j = 0; j < s.u.size(); ++j) {
    if (!std::isfinite(s.u[j]) || !std::isfinite(s.v[j])) {
      throw NumericalGuard(
          fmt::format("nonfinite state at t = {}, grid index {}", s.t, j));
    }
  }
}

void notify(std::span<Observer* const> observers, const SystemState& s) {
  for (Observer* o : observers) o->record(s);
}

}  // namespace

void Simulator::step(SystemState& s) {
  const double dt = scheme_.dt;
  u_stepper_.advance(s.u);
  v_stepper_.advance(s.v);
  react(s, s.t + 0.5 * dt, dt);
  s.t += dt;
  guard_finite(s);
}

SystemState Simulator::run_periods(SystemState s, std::size_t n,
                                   std::span<Observer* const> observers) {
  const std::size_t cadence = scheme_.cadence(system_.period());
  const double t0 = s.t;
  const std::size_t total = n * steps_;
  for (std::size_t k = 1; k <= total; ++k) {
    step(s);
    s.t = t0 + static_cast<double>(k) * scheme_.dt;
    if (k % cadence == 0) notify(observers, s);
  }
  return s;
}

void Simulator::step_transformed(SystemState& s, const PeriodicField& v_star) {
  const double dt = scheme_.dt;
  const auto k = static_cast<std::size_t>(std::llround(s.t / dt));
  const Field& lo = v_star.at_step(k);
  const Field& hi = v_star.at_step(k + 1);
  for (std::size_t j = 0; j < s.v.size(); ++j) s.v[j] = lo[j] - s.v[j];
  step(s);
  for (std::size_t j = 0; j < s.v.size(); ++j) s.v[j] = hi[j] - s.v[j];
}

SystemState Simulator::run_transformed(SystemState s, const PeriodicField& v_star,
                                       std::size_t n,
                                       std::span<Observer* const> observers) {
  if (v_star.grid().size() != system_.grid().size() ||
      v_star.steps_per_period() != steps_) {
    throw ConfigError("semitrivial field does not match the grid or time step");
  }
  const double q = s.t / scheme_.dt;
  if (std::abs(q - std::round(q)) > 1e-6) {
    throw ConfigError("transformed runs must start on a time-step mark");
  }
  const std::size_t cadence = scheme_.cadence(system_.period());
  const double t0 = s.t;
  const std::size_t total = n * steps_;
  for (std::size_t k = 1; k <= total; ++k) {
    step_transformed(s, v_star);
    s.t = t0 + static_cast<double>(k) * scheme_.dt;
    if (k % cadence == 0) notify(observers, s);
  }
  return s;
}

// ---------------------------------------------------------------------------

Field make_front_profile(const Grid& grid, double level, double x0, double w,
                         double margin) {
  if (w < 0.0) throw ConfigError("front ramp width must be nonnegative");
  if (x0 < grid.x_min() + margin || x0 + w > grid.x_max() - margin) {
    throw ConfigError(fmt::format(
        "front interface [{}, {}] does not keep a margin of {} inside [{}, {}]", x0,
        x0 + w, margin, grid.x_min(), grid.x_max()));
  }
  Field f(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x(j);
    if (x <= x0) {
      f[j] = level;
    } else if (x >= x0 + w) {
      f[j] = 0.0;
    } else {
      f[j] = level * (x0 + w - x) / w;
    }
  }
  return f;
}

std::pair<Field, Field> make_front_data(const Grid& grid, double u_level,
                                        double v_level, double x0, double w,
                                        double margin) {
  return {make_front_profile(grid, u_level, x0, w, margin),
          make_front_profile(grid, v_level, x0, w, margin)};
}

Field to_original_v(std::span<const double> v_tilde, const Field& v_star_k) {
  Field v(v_tilde.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = v_star_k[j] - v_tilde[j];
  return v;
}

void write_state_csv(std::ostream& os, const Grid& grid, const SystemState& s) {
  os << "x,u,v\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    os << fmt::format("{:.10g},{:.12g},{:.12g}\n", grid.x(j), s.u[j], s.v[j]);
  }
}

}  // namespace compete
