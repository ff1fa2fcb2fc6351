#include "compete/scheme.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "compete/errors.hpp"

namespace compete {

const char* step_mode_name(StepMode m) {
  return m == StepMode::explicit_euler ? "explicit" : "implicit";
}

SchemeConfig SchemeConfig::per_period(double period,
                                      std::size_t steps_per_period,
                                      StepMode mode) {
  if (steps_per_period == 0) {
    throw ConfigError("steps per period must be positive");
  }
  SchemeConfig s;
  s.dt = period / static_cast<double>(steps_per_period);
  s.mode = mode;
  return s;
}

std::size_t SchemeConfig::steps_per_period(double period) const {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError(fmt::format("time step must be positive, got {}", dt));
  }
  const double q = period / dt;
  const double n = std::round(q);
  if (n < 1.0 || std::abs(q - n) > 1e-9 * std::max(1.0, q)) {
    throw ConfigError(
        fmt::format("dt = {} does not divide the period T = {}", dt, period));
  }
  return static_cast<std::size_t>(n);
}

std::size_t SchemeConfig::cadence(double period) const {
  return observer_cadence == 0 ? steps_per_period(period) : observer_cadence;
}

void SchemeConfig::validate(const Grid& grid, const Dispersal& dispersal,
                            double period) const {
  steps_per_period(period);
  if (dispersal.is_random()) {
    if (mode == StepMode::explicit_euler &&
        dt > 0.5 * grid.h() * grid.h() * (1.0 + 1e-12)) {
      throw NumericalGuard(fmt::format(
          "explicit step dt = {} exceeds the stability bound h^2/2 = {}", dt,
          0.5 * grid.h() * grid.h()));
    }
  } else {
    check_kernel_fits(grid, *dispersal.kernel);
    if (dt > 0.5 * (1.0 + 1e-12)) {
      throw NumericalGuard(fmt::format(
          "nonlocal step dt = {} exceeds the stability bound 1/2", dt));
    }
  }
}

// ---------------------------------------------------------------------------

DispersalStepper::DispersalStepper(const Grid& grid, const Dispersal& dispersal,
                                   double dt, StepMode mode, double mu)
    : grid_(grid), dispersal_(dispersal), dt_(dt), mode_(mode) {
  const std::size_t n = grid.size();
  if (dispersal.is_random()) {
    const double h2 = grid.h() * grid.h();
    if (mode == StepMode::explicit_euler) {
      if (dt > 0.5 * h2 * (1.0 + 1e-12)) {
        throw NumericalGuard(fmt::format(
            "explicit step dt = {} exceeds the stability bound h^2/2 = {}", dt,
            0.5 * h2));
      }
      r_ = dt / h2;
      tmp_.resize(n);
      return;
    }
    substeps_ = static_cast<std::size_t>(std::ceil(dt / h2 - 1e-12));
    substeps_ = std::max<std::size_t>(substeps_, 1);
    r_ = dt / static_cast<double>(substeps_) / h2;
    // (I - r/2 L) with L = tridiag(1, -2, 1), reflecting rows 0 and n-1.
    const double off = -0.5 * r_;
    const double diag = 1.0 + r_;
    cprime_.resize(n);
    denom_.resize(n);
    std::vector<double> lower(n, off), upper(n, off);
    upper[0] = 2.0 * off;
    lower[n - 1] = 2.0 * off;
    denom_[0] = diag;
    cprime_[0] = upper[0] / denom_[0];
    for (std::size_t j = 1; j < n; ++j) {
      denom_[j] = diag - lower[j] * cprime_[j - 1];
      cprime_[j] = (j + 1 < n) ? upper[j] / denom_[j] : 0.0;
    }
    tmp_.resize(n);
    return;
  }
  if (dt > 0.5 * (1.0 + 1e-12)) {
    throw NumericalGuard(
        fmt::format("nonlocal step dt = {} exceeds the stability bound 1/2", dt));
  }
  const Kernel& k = *dispersal.kernel;
  check_kernel_fits(grid, k);
  weights_.assign(k.weights().begin(), k.weights().end());
  if (mu != 0.0) {
    const std::size_t m = k.half_width();
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      const double z = (static_cast<double>(i) - static_cast<double>(m)) * k.h();
      weights_[i] *= std::exp(-mu * z);
    }
  }
  k1_.resize(n);
  k2_.resize(n);
  k3_.resize(n);
  k4_.resize(n);
  tmp_.resize(n);
}

void DispersalStepper::advance(std::span<double> u) {
  if (dispersal_.is_random()) {
    if (mode_ == StepMode::explicit_euler) {
      advance_random_explicit(u);
    } else {
      for (std::size_t s = 0; s < substeps_; ++s) advance_random_cn(u);
    }
  } else {
    advance_nonlocal_rk4(u);
  }
}

void DispersalStepper::advance_random_explicit(std::span<double> u) {
  const std::size_t n = u.size();
  const double r = r_;
  tmp_[0] = u[0] + r * (2.0 * u[1] - 2.0 * u[0]);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    tmp_[j] = u[j] + r * (u[j - 1] - 2.0 * u[j] + u[j + 1]);
  }
  tmp_[n - 1] = u[n - 1] + r * (2.0 * u[n - 2] - 2.0 * u[n - 1]);
  std::copy(tmp_.begin(), tmp_.end(), u.begin());
}

void DispersalStepper::advance_random_cn(std::span<double> u) {
  const std::size_t n = u.size();
  const double half = 0.5 * r_;
  // Right-hand side (I + r/2 L) u.
  tmp_[0] = u[0] + half * (2.0 * u[1] - 2.0 * u[0]);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    tmp_[j] = u[j] + half * (u[j - 1] - 2.0 * u[j] + u[j + 1]);
  }
  tmp_[n - 1] = u[n - 1] + half * (2.0 * u[n - 2] - 2.0 * u[n - 1]);
  // Thomas forward sweep (lower diagonal is -r/2, or -r at the last row).
  const double off = -half;
  tmp_[0] /= denom_[0];
  for (std::size_t j = 1; j < n; ++j) {
    const double lower = (j + 1 < n) ? off : 2.0 * off;
    tmp_[j] = (tmp_[j] - lower * tmp_[j - 1]) / denom_[j];
  }
  u[n - 1] = tmp_[n - 1];
  for (std::size_t j = n - 1; j-- > 0;) {
    u[j] = tmp_[j] - cprime_[j] * u[j + 1];
  }
}

void DispersalStepper::apply_nonlocal_op(std::span<const double> u,
                                         std::span<double> out) const {
  const std::size_t n = u.size();
  const std::size_t m = dispersal_.kernel->half_width();
  const auto nn = static_cast<std::ptrdiff_t>(n);
  const auto mm = static_cast<std::ptrdiff_t>(m);
  for (std::ptrdiff_t j = 0; j < nn; ++j) {
    double acc = 0.0;
    if (j >= mm && j + mm < nn) {
      const double* up = u.data() + (j - mm);
      for (std::size_t i = 0; i < weights_.size(); ++i) acc += weights_[i] * up[i];
    } else {
      for (std::ptrdiff_t k = -mm; k <= mm; ++k) {
        const std::ptrdiff_t idx = std::clamp<std::ptrdiff_t>(j + k, 0, nn - 1);
        acc += weights_[static_cast<std::size_t>(k + mm)] *
               u[static_cast<std::size_t>(idx)];
      }
    }
    out[static_cast<std::size_t>(j)] = acc - u[static_cast<std::size_t>(j)];
  }
}

void DispersalStepper::advance_nonlocal_rk4(std::span<double> u) {
  const std::size_t n = u.size();
  const double dt = dt_;
  apply_nonlocal_op(u, k1_);
  for (std::size_t j = 0; j < n; ++j) tmp_[j] = u[j] + 0.5 * dt * k1_[j];
  apply_nonlocal_op(tmp_, k2_);
  for (std::size_t j = 0; j < n; ++j) tmp_[j] = u[j] + 0.5 * dt * k2_[j];
  apply_nonlocal_op(tmp_, k3_);
  for (std::size_t j = 0; j < n; ++j) tmp_[j] = u[j] + dt * k3_[j];
  apply_nonlocal_op(tmp_, k4_);
  for (std::size_t j = 0; j < n; ++j) {
    u[j] += dt / 6.0 * (k1_[j] + 2.0 * k2_[j] + 2.0 * k3_[j] + k4_[j]);
  }
}

}  // namespace compete
