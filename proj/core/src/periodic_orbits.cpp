#include "compete/periodic_orbits.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "compete/errors.hpp"
#include "compete/ode.hpp"

namespace compete {

PeriodicOrbit::PeriodicOrbit(double period, std::vector<double> values,
                             std::vector<double> derivatives,
                             double endpoint_mismatch)
    : period_(period),
      values_(std::move(values)),
      derivatives_(std::move(derivatives)),
      endpoint_mismatch_(endpoint_mismatch) {
  if (values_.size() < 2 || values_.size() != derivatives_.size()) {
    throw ConfigError("periodic orbit needs matching value/derivative samples");
  }
}

PeriodicOrbit PeriodicOrbit::constant(double period, double value,
                                      std::size_t samples) {
  return PeriodicOrbit(period, std::vector<double>(samples + 1, value),
                       std::vector<double>(samples + 1, 0.0), 0.0);
}

double PeriodicOrbit::time(std::size_t k) const {
  return period_ * static_cast<double>(k) / static_cast<double>(intervals());
}

namespace {

struct HermitePos {
  std::size_t k;
  double s;
  double dt;
};

HermitePos locate(double t, double period, std::size_t n) {
  double tau = t - std::floor(t / period) * period;
  const double dt = period / static_cast<double>(n);
  double q = tau / dt;
  auto k = static_cast<std::size_t>(std::floor(q));
  if (k >= n) k = n - 1;
  return {k, q - static_cast<double>(k), dt};
}

}  // namespace

double PeriodicOrbit::operator()(double t) const {
  const auto [k, s, dt] = locate(t, period_, intervals());
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * values_[k] + h10 * dt * derivatives_[k] +
         h01 * values_[k + 1] + h11 * dt * derivatives_[k + 1];
}

double PeriodicOrbit::derivative(double t) const {
  const auto [k, s, dt] = locate(t, period_, intervals());
  const double s2 = s * s;
  const double d00 = 6 * s2 - 6 * s;
  const double d10 = 3 * s2 - 4 * s + 1;
  const double d01 = -6 * s2 + 6 * s;
  const double d11 = 3 * s2 - 2 * s;
  return (d00 * values_[k] + d01 * values_[k + 1]) / dt + d10 * derivatives_[k] +
         d11 * derivatives_[k + 1];
}

double PeriodicOrbit::mean() const {
  const std::size_t n = intervals();
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += values_[k];
  return acc / static_cast<double>(n);
}

double PeriodicOrbit::min() const {
  return *std::min_element(values_.begin(), values_.end());
}

double PeriodicOrbit::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

std::function<double(double)> PeriodicOrbit::as_function() const {
  return [orbit = *this](double t) { return orbit(t); };
}

// ---------------------------------------------------------------------------

namespace {

/// Damped fixed-point iteration y <- (1 - d) y + d P(y).
ode::State damped_fixed_point(const std::function<ode::State(const ode::State&)>& map,
                              ode::State y, const OrbitOptions& opts,
                              const char* who, bool require_positive) {
  double best = INFINITY;
  std::size_t stalled = 0;
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    const ode::State py = map(y);
    double res = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      res = std::max(res, std::abs(py[i] - y[i]) / std::max(1.0, std::abs(y[i])));
    }
    if (res <= opts.fixed_point_tol) return py;
    // The adaptive integrator makes the period map piecewise smooth at the
    // 1e-10 level; accept a stalled residual below that.
    if (res < best * 0.999) {
      best = res;
      stalled = 0;
    } else if (++stalled > 50 && best < 1e-10) {
      return py;
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = (1.0 - opts.damping) * y[i] + opts.damping * py[i];
      if (require_positive && !(y[i] > 0.0)) {
        throw ConvergenceError(
            fmt::format("{}: iteration left the positive cone at step {}", who, it));
      }
    }
  }
  throw ConvergenceError(fmt::format(
      "{}: period-map iteration did not converge in {} iterations (residual {})",
      who, opts.max_iterations, best));
}

PeriodicOrbit orbit_from_samples(double period,
                                 const std::vector<ode::State>& samples,
                                 std::size_t component, const ode::Rhs& rhs) {
  std::vector<double> vals(samples.size());
  std::vector<double> ders(samples.size());
  ode::State d(samples.front().size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double t =
        period * static_cast<double>(k) / static_cast<double>(samples.size() - 1);
    rhs(samples[k], d, t);
    vals[k] = samples[k][component];
    ders[k] = d[component];
  }
  const double mismatch = std::abs(vals.back() - vals.front()) /
                          std::max(1e-300, std::abs(vals.front()));
  return PeriodicOrbit(period, std::move(vals), std::move(ders), mismatch);
}

}  // namespace

PeriodicOrbit logistic_periodic(const PeriodicScalar& a0,
                                const PeriodicScalar& b0,
                                const OrbitOptions& opts) {
  const double T = a0.period();
  if (std::abs(b0.period() - T) > 1e-12 * T) {
    throw ConfigError("logistic_periodic: a0 and b0 must share the period");
  }
  if (!(a0.mean() > 0.0)) {
    throw PreconditionError(fmt::format(
        "logistic_periodic: mean growth {} is not positive, no positive "
        "periodic orbit exists",
        a0.mean()));
  }
  if (!(b0.extrema(256).first > 0.0)) {
    throw PreconditionError("logistic_periodic: b0 must be strictly positive");
  }
  const ode::Rhs rhs = [&](const ode::State& y, ode::State& dy, double t) {
    dy[0] = y[0] * (a0(t) - b0(t) * y[0]);
  };
  auto map = [&](const ode::State& y) { return ode::flow(rhs, y, 0.0, T); };
  const ode::State w0 = damped_fixed_point(map, {a0.mean() / b0.mean()}, opts,
                                           "logistic_periodic", true);
  const auto samples = ode::sample(rhs, w0, 0.0, T, opts.samples);
  return orbit_from_samples(T, samples, 0, rhs);
}

PeriodicOrbit nonhomogeneous_periodic(
    double period, double alpha_mean, const std::function<double(double)>& alpha,
    const std::function<double(double)>& h, const OrbitOptions& opts) {
  if (!(alpha_mean < 0.0)) {
    throw PreconditionError(fmt::format(
        "nonhomogeneous_periodic: mean of alpha is {}, must be negative",
        alpha_mean));
  }
  // y = (A, I): A' = alpha, I' = h exp(-A); u = exp(A) (u0 + I).
  const ode::Rhs aux = [&](const ode::State& y, ode::State& dy, double t) {
    dy[0] = alpha(t);
    dy[1] = h(t) * std::exp(-y[0]);
  };
  const auto samples = ode::sample(aux, {0.0, 0.0}, 0.0, period, opts.samples);
  const double A_T = samples.back()[0];
  const double I_T = samples.back()[1];
  const double u0 = I_T * std::exp(A_T) / (1.0 - std::exp(A_T));
  std::vector<double> vals(samples.size());
  std::vector<double> ders(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double t = period * static_cast<double>(k) /
                     static_cast<double>(samples.size() - 1);
    vals[k] = std::exp(samples[k][0]) * (u0 + samples[k][1]);
    ders[k] = alpha(t) * vals[k] + h(t);
  }
  const double mismatch =
      std::abs(vals.back() - vals.front()) / std::max(1e-300, std::abs(vals.front()));
  vals.back() = vals.front();
  return PeriodicOrbit(period, std::move(vals), std::move(ders), mismatch);
}

PeriodicOrbit nonhomogeneous_periodic(const PeriodicScalar& alpha,
                                      const PeriodicScalar& h,
                                      const OrbitOptions& opts) {
  if (std::abs(alpha.period() - h.period()) > 1e-12 * alpha.period()) {
    throw ConfigError("nonhomogeneous_periodic: alpha and h must share the period");
  }
  return nonhomogeneous_periodic(
      alpha.period(), alpha.mean(), [&](double t) { return alpha(t); },
      [&](double t) { return h(t); }, opts);
}

PeriodicOrbit homogeneous_u_star(const CoefficientSet& set,
                                 const OrbitOptions& opts) {
  return logistic_periodic(set[Coef::a1].baseline(), set[Coef::b1].baseline(),
                           opts);
}

PeriodicOrbit homogeneous_v_star(const CoefficientSet& set,
                                 const OrbitOptions& opts) {
  return logistic_periodic(set[Coef::a2].baseline(), set[Coef::c2].baseline(),
                           opts);
}

std::pair<PeriodicOrbit, PeriodicOrbit> coexistence_homogeneous(
    const CoefficientSet& set, const OrbitOptions& opts) {
  const auto verdict = check_coexistence(compute_envelopes(set));
  if (!verdict.holds) {
    throw PreconditionError("coexistence_homogeneous: " + verdict.detail);
  }
  const auto u_star = homogeneous_u_star(set, opts);
  const auto v_star = homogeneous_v_star(set, opts);
  const auto& a1 = set[Coef::a1].baseline();
  const auto& b1 = set[Coef::b1].baseline();
  const auto& c1 = set[Coef::c1].baseline();
  const auto& a2 = set[Coef::a2].baseline();
  const auto& b2 = set[Coef::b2].baseline();
  const auto& c2 = set[Coef::c2].baseline();
  const ode::Rhs rhs = [&](const ode::State& y, ode::State& dy, double t) {
    dy[0] = y[0] * (a1(t) - b1(t) * y[0] - c1(t) * y[1]);
    dy[1] = y[1] * (a2(t) - b2(t) * y[0] - c2(t) * y[1]);
  };
  const double T = set.period();
  auto map = [&](const ode::State& y) { return ode::flow(rhs, y, 0.0, T); };
  const ode::State y0 = damped_fixed_point(
      map, {0.5 * u_star.values()[0], 0.5 * v_star.values()[0]}, opts,
      "coexistence_homogeneous", true);
  const auto samples = ode::sample(rhs, y0, 0.0, T, opts.samples);
  auto u = orbit_from_samples(T, samples, 0, rhs);
  auto v = orbit_from_samples(T, samples, 1, rhs);
  if (!(u.min() > 0.0) || !(v.min() > 0.0)) {
    throw ConvergenceError("coexistence_homogeneous: limit is not strictly positive");
  }
  return {std::move(u), std::move(v)};
}

void write_orbit_csv(std::ostream& os, const PeriodicOrbit& orbit,
                     std::size_t samples) {
  os << "t,value\n";
  for (std::size_t k = 0; k <= samples; ++k) {
    const double t =
        orbit.period() * static_cast<double>(k) / static_cast<double>(samples);
    os << fmt::format("{:.10g},{:.12g}\n", t, orbit(t));
  }
}

}  // namespace compete
