#include "compete/ode.hpp"

#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "compete/errors.hpp"

namespace compete::ode {

namespace odeint = boost::numeric::odeint;
using Stepper = odeint::runge_kutta_dopri5<State>;

namespace {

void require_finite(const State& y, const char* who) {
  for (double v : y) {
    if (!std::isfinite(v)) {
      throw NumericalGuard(std::string(who) + ": ODE solution became nonfinite");
    }
  }
}

}  // namespace

State flow(const Rhs& rhs, State y, double t0, double t1) {
  if (t1 == t0) return y;
  const double dt0 = (t1 - t0) / 64.0;
  odeint::integrate_adaptive(odeint::make_controlled(kAbsTol, kRelTol, Stepper()),
                             rhs, y, t0, t1, dt0);
  require_finite(y, "flow");
  return y;
}

std::vector<State> sample(const Rhs& rhs, State y, double t0, double t1,
                          std::size_t n) {
  std::vector<double> times(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    times[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n);
  }
  times[n] = t1;
  std::vector<State> out;
  out.reserve(n + 1);
  const double dt0 = (t1 - t0) / static_cast<double>(4 * n);
  // Controlled stepping lands on every sample time, avoiding dense-output
  // interpolation error in the stored values.
  odeint::integrate_times(
      odeint::make_controlled(kAbsTol, kRelTol, Stepper()), rhs, y,
      times.begin(), times.end(), dt0,
      [&](const State& s, double) { out.push_back(s); });
  for (const auto& s : out) require_finite(s, "sample");
  return out;
}

}  // namespace compete::ode
