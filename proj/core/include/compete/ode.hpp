#pragma once

#include <functional>
#include <vector>

namespace compete::ode {

using State = std::vector<double>;
/// dydt = f(y, t), written into the second argument.
using Rhs = std::function<void(const State&, State&, double)>;

/// Adaptive Dormand-Prince 5(4) tolerances used by every orbit computation.
inline constexpr double kRelTol = 1e-10;
inline constexpr double kAbsTol = 1e-12;

/// Integrates from t0 to t1 and returns y(t1).
State flow(const Rhs& rhs, State y, double t0, double t1);

/// Returns y at t_k = t0 + k (t1 - t0)/n for k = 0..n (dense output).
std::vector<State> sample(const Rhs& rhs, State y, double t0, double t1,
                          std::size_t n);

}  // namespace compete::ode
