#include "compete/spreading.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "compete/errors.hpp"
#include "compete/periodic_orbits.hpp"
#include "compete/spectrum.hpp"

namespace compete {

const char* speed_kind_name(SpeedKind k) {
  switch (k) {
    case SpeedKind::theoretical:
      return "theoretical";
    case SpeedKind::empirical_lower:
      return "empirical-lower";
    case SpeedKind::empirical_upper:
      return "empirical-upper";
  }
  return "?";
}

SpeedEstimate minimize_dispersion(double alpha_mean, const Dispersal& dispersal,
                                  const DispersionOptions& opts) {
  if (!(alpha_mean > 0.0)) {
    throw PreconditionError(fmt::format(
        "mean effective growth rate is {} (needs > 0 for a positive speed)",
        alpha_mean));
  }
  if (!(opts.mu_lo > 0.0) || !(opts.mu_hi > opts.mu_lo)) {
    throw ConfigError("mu bracket must satisfy 0 < mu_lo < mu_hi");
  }
  const auto lambda = [&](double mu) {
    return lambda_homogeneous(mu, alpha_mean, dispersal);
  };
  const auto ratio = [&](double mu) { return lambda(mu) / mu; };

  SpeedEstimate est;
  est.kind = SpeedKind::theoretical;
  est.alpha_mean = alpha_mean;

  if (opts.grid_only) {
    const auto n = static_cast<std::size_t>(
        std::floor((opts.mu_hi - opts.mu_lo) / opts.grid_step + 1e-9));
    double best = INFINITY;
    double best_mu = opts.mu_lo;
    for (std::size_t i = 0; i <= n; ++i) {
      const double mu = opts.mu_lo + static_cast<double>(i) * opts.grid_step;
      const double r = ratio(mu);
      est.table.push_back({mu, lambda(mu), r});
      if (r < best) {
        best = r;
        best_mu = mu;
      }
    }
    est.c = best;
    est.mu_star = best_mu;
    return est;
  }

  const std::size_t n = std::max<std::size_t>(opts.coarse_points, 3);
  std::vector<double> mus(n), fs(n);
  for (std::size_t i = 0; i < n; ++i) {
    mus[i] = opts.mu_lo + (opts.mu_hi - opts.mu_lo) * static_cast<double>(i) /
                              static_cast<double>(n - 1);
    fs[i] = ratio(mus[i]);
    est.table.push_back({mus[i], lambda(mus[i]), fs[i]});
  }
  const auto imin = static_cast<std::size_t>(
      std::min_element(fs.begin(), fs.end()) - fs.begin());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double slack = 1e-12 * std::max(std::abs(fs[i]), 1.0);
    const bool ok = i < imin ? fs[i + 1] <= fs[i] + slack : fs[i + 1] >= fs[i] - slack;
    if (!ok) est.unimodal = false;
  }
  if (imin == 0 || imin + 1 == n) est.unimodal = false;
  if (!est.unimodal) {
    est.c = fs[imin];
    est.mu_star = mus[imin];
    return est;
  }

  // Golden-section search on the bracketing cells.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = mus[imin - 1];
  double b = mus[imin + 1];
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = ratio(x1);
  double f2 = ratio(x2);
  while (b - a > opts.tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = ratio(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = ratio(x2);
    }
  }
  est.mu_star = 0.5 * (a + b);
  est.c = ratio(est.mu_star);
  return est;
}

double effective_growth_mean(const CoefficientSet& set) {
  const PeriodicOrbit v0 = homogeneous_v_star(set);
  const PeriodicScalar& a1 = set[Coef::a1].baseline();
  const PeriodicScalar& c1 = set[Coef::c1].baseline();
  if (c1.is_constant()) return a1.mean() - c1(0.0) * v0.mean();
  const std::size_t n = v0.intervals();
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += c1(v0.time(k)) * v0.values()[k];
  }
  return a1.mean() - acc / static_cast<double>(n);
}

SpeedEstimate dispersion_speed(const CoefficientSet& set,
                               const Dispersal& dispersal,
                               const DispersionOptions& opts) {
  const CoefficientSet base = set.baselines();
  const auto h1 = check_H1(compute_envelopes(base));
  if (!h1.holds) {
    throw PreconditionError("H1 fails: " + h1.detail);
  }
  return minimize_dispersion(effective_growth_mean(base), dispersal, opts);
}

SpeedEstimate empirical_front_speed(const std::vector<FrontSample>& trace,
                                    SpeedKind kind, const FitWindow& window) {
  const std::size_t n = trace.size();
  std::size_t start = std::max<std::size_t>(
      static_cast<std::size_t>(std::ceil((1.0 - window.fraction) * static_cast<double>(n))),
      window.min_discard);
  while (start < n && !(trace[start].x >= window.min_x)) ++start;
  if (start >= n || n - start < window.min_points) {
    throw ConvergenceError(fmt::format(
        "front fit window has {} records (needs {}); run more periods or widen the "
        "domain",
        start >= n ? 0 : n - start, window.min_points));
  }
  const std::size_t m = n - start;
  double st = 0.0, sx = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    if (!std::isfinite(trace[i].x)) {
      throw NumericalGuard(
          fmt::format("front position undefined at t = {}", trace[i].t));
    }
    if (i > start && trace[i].x < trace[i - 1].x - window.monotone_tol) {
      throw NumericalGuard(fmt::format(
          "front moved backward by {} at t = {}", trace[i - 1].x - trace[i].x,
          trace[i].t));
    }
    st += trace[i].t;
    sx += trace[i].x;
  }
  const double tm = st / static_cast<double>(m);
  const double xm = sx / static_cast<double>(m);
  double stt = 0.0, stx = 0.0, sxx = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    const double dt = trace[i].t - tm;
    const double dx = trace[i].x - xm;
    stt += dt * dt;
    stx += dt * dx;
    sxx += dx * dx;
  }
  SpeedEstimate est;
  est.kind = kind;
  est.c = stx / stt;
  const double ssr = std::max(sxx - est.c * stx, 0.0);
  est.std_error = m > 2 ? std::sqrt(ssr / static_cast<double>(m - 2) / stt) : 0.0;
  est.r2 = sxx > 0.0 ? 1.0 - ssr / sxx : 1.0;
  est.window_t0 = trace[start].t;
  est.window_t1 = trace[n - 1].t;
  est.window_points = m;
  return est;
}

SpeedInterval speed_interval(const CoefficientSet& set, const Dispersal& dispersal,
                             const Grid& grid, const SchemeConfig& scheme,
                             const FrontRunOptions& opts) {
  SpeedInterval out;
  out.theoretical = dispersion_speed(set, dispersal);
  const CoefficientSet base = set.baselines();
  const PeriodicOrbit u0 = homogeneous_u_star(base);
  const PeriodicOrbit v0 = homogeneous_v_star(base);
  const PeriodicField v_star =
      compute_semitrivial(Species::v, set, grid, dispersal, scheme, opts.semitrivial);

  const double margin = dispersal.reach_length(grid.h());
  auto [u_init, v_init] =
      make_front_data(grid, opts.u_fraction * u0(0.0), opts.v_fraction * v0(0.0),
                      opts.x0, opts.ramp, margin);
  SystemState s{0.0, std::move(u_init), std::move(v_init)};

  const double guard = margin + 10.0 * grid.h();
  FrontObserver lower(
      grid,
      [&](const SystemState& st, std::size_t j) {
        return std::min(st.u[j] / u0(st.t), st.v[j] / v0(st.t));
      },
      opts.theta, FrontMode::trailing, guard);
  FrontObserver upper(
      grid,
      [&](const SystemState& st, std::size_t j) {
        return std::hypot(st.u[j] / u0(st.t), st.v[j] / v0(st.t));
      },
      opts.theta, FrontMode::leading, guard);
  Observer* observers[] = {&lower, &upper};

  SchemeConfig sc = scheme;
  sc.observer_cadence = 0;
  Simulator sim(CompetitionSystem(set, grid, dispersal), sc);
  sim.run_transformed(std::move(s), v_star, opts.periods, observers);

  FitWindow window = opts.window;
  if (set.has_bumps()) {
    window.min_x = std::max(window.min_x, set.bump_support() + opts.clearance);
  }
  out.lower_trace = lower.trace();
  out.upper_trace = upper.trace();
  out.lower = empirical_front_speed(out.lower_trace, SpeedKind::empirical_lower, window);
  out.upper = empirical_front_speed(out.upper_trace, SpeedKind::empirical_upper, window);
  return out;
}

ScalarFrontResult scalar_front_speed(double a, double b, const Dispersal& dispersal,
                                     const Grid& grid, const SchemeConfig& scheme,
                                     const FrontRunOptions& opts) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw PreconditionError("scalar front needs a > 0 and b > 0");
  }
  const auto set = CoefficientSet::constants({a, b, 1.0, 1.0, 1.0, 1.0});
  const double level = a / b;
  const double margin = dispersal.reach_length(grid.h());
  SystemState s{0.0, make_front_profile(grid, opts.u_fraction * level, opts.x0,
                                        opts.ramp, margin),
                Field(grid.size(), 0.0)};
  FrontObserver front(
      grid, [level](const SystemState& st, std::size_t j) { return st.u[j] / level; },
      opts.theta, FrontMode::leading, margin + 10.0 * grid.h());
  Observer* observers[] = {&front};
  SchemeConfig sc = scheme;
  sc.observer_cadence = 0;
  Simulator sim(CompetitionSystem(set, grid, dispersal), sc);
  sim.run_periods(std::move(s), opts.periods, observers);
  ScalarFrontResult r;
  r.trace = front.trace();
  r.estimate = empirical_front_speed(r.trace, SpeedKind::empirical_upper, opts.window);
  return r;
}

SweepTable continuity_sweep(const CoefficientSet& set, Coef target,
                            const std::vector<double>& eps,
                            const Dispersal& dispersal,
                            const DispersionOptions& opts) {
  const CoefficientSet base = set.baselines();
  SweepTable table;
  table.target = target;
  table.c0_base = dispersion_speed(base, dispersal, opts).c;
  for (double e : eps) {
    const auto& f = base[target];
    const CoefficientSet shifted =
        base.with_field(target, f.with_baseline(f.baseline().shifted(e)));
    const double c = dispersion_speed(shifted, dispersal, opts).c;
    table.rows.push_back({e, c, c - table.c0_base});
  }
  // Monotone approach: ordered by decreasing |eps|, |diff| must not grow.
  std::vector<SweepRow> sorted = table.rows;
  std::sort(sorted.begin(), sorted.end(), [](const SweepRow& x, const SweepRow& y) {
    return std::abs(x.eps) > std::abs(y.eps);
  });
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (std::abs(sorted[i + 1].diff) > std::abs(sorted[i].diff)) table.monotone = false;
  }
  return table;
}

}  // namespace compete
