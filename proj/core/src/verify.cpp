#include "compete/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "compete/errors.hpp"
#include "compete/ode.hpp"
#include "compete/simulator.hpp"
#include "compete/spreading.hpp"

namespace compete {

namespace {

CoefficientSet shift_baselines(const CoefficientSet& base, double eps, double v0_sup) {
  const auto shifted = [&](Coef c, double by) {
    const auto& f = base[c];
    return f.with_baseline(f.baseline().shifted(by));
  };
  return CoefficientSet(shifted(Coef::a1, eps), shifted(Coef::b1, -eps),
                        shifted(Coef::c1, -eps),
                        shifted(Coef::a2, eps + 2.0 * eps * v0_sup),
                        shifted(Coef::b2, eps), shifted(Coef::c2, eps));
}

/// Mean over one period of fn, by the adaptive integrator.
double period_mean(double T, const std::function<double(double)>& fn) {
  const ode::State y = ode::flow(
      [&](const ode::State&, ode::State& dy, double t) { dy[0] = fn(t); }, {0.0},
      0.0, T);
  return y[0] / T;
}

}  // namespace

CoefficientSet epsilon_shifted(const CoefficientSet& set, double eps) {
  const CoefficientSet base = set.baselines();
  return shift_baselines(base, eps, homogeneous_v_star(base).max());
}

HypothesisVerdict check_shifted_H2(const CoefficientSet& set, double eps,
                                   std::size_t samples_per_period) {
  const CoefficientSet base = set.baselines();
  const EnvelopeTable env0 = compute_envelopes(base, samples_per_period);
  const CoefficientSet se = epsilon_shifted(base, eps);
  const EnvelopeTable enve = compute_envelopes(se, samples_per_period);
  using enum Coef;
  const double ratio = env0.M(a2) / env0.L(c2);
  const double lower_ratio = env0.L(a2) / env0.M(c2);
  const double p1 = ratio * enve.M(c1) / enve.L(b1);
  const double p2 = ratio * enve.M(c2) / enve.L(b2);
  const double T = set.period();
  double m1 = INFINITY, m2 = INFINITY;
  for (std::size_t k = 0; k < samples_per_period; ++k) {
    const double t = T * static_cast<double>(k) / static_cast<double>(samples_per_period);
    const auto bl = [&](Coef c) { return se[c].baseline()(t); };
    const double common = bl(a1) - bl(c1) * ratio - bl(a2) + 2.0 * bl(c2) * lower_ratio;
    m1 = std::min(m1, common - bl(b2) * p1);
    m2 = std::min(m2, common - bl(b2) * p2);
  }
  HypothesisVerdict v;
  v.margins = {m1, m2};
  v.holds = m1 > 0.0 && m2 > 0.0;
  if (!v.holds) {
    v.detail = fmt::format(
        "shifted H2 expressions have minima {} and {} for eps = {}", m1, m2, eps);
  }
  return v;
}

AnsatzPair build_ansatz_pair(const CoefficientSet& set, double eps, double mu,
                             const Dispersal& dispersal, const OrbitOptions& opts) {
  const CoefficientSet base = set.baselines();
  PeriodicOrbit v0 = homogeneous_v_star(base, opts);
  CoefficientSet se = shift_baselines(base, eps, v0.max());
  const double T = set.period();
  const double tilt = tilt_rate(dispersal, mu);

  const auto& a1 = se[Coef::a1].baseline();
  const auto& c1 = se[Coef::c1].baseline();
  const auto& a2 = se[Coef::a2].baseline();
  const auto& b2 = se[Coef::b2].baseline();
  const auto& c2 = se[Coef::c2].baseline();
  const auto alpha = [&](double t) { return a1(t) - c1(t) * v0(t); };

  // phi = exp(I), I = J - mean(alpha) t with J' = alpha. Taking the mean from
  // J(T) itself makes I(T) = 0 exactly, so phi closes without a jump.
  const std::size_t n = opts.samples;
  const auto J = ode::sample(
      [&](const ode::State&, ode::State& dy, double t) { dy[0] = alpha(t); },
      {0.0}, 0.0, T, n);
  const double alpha_mean = J[n][0] / T;
  const double lambda = tilt + alpha_mean;
  std::vector<double> pv(n + 1), pd(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = T * static_cast<double>(k) / static_cast<double>(n);
    pv[k] = k == n ? 1.0 : std::exp(J[k][0] - alpha_mean * t);
    pd[k] = (alpha(t) - alpha_mean) * pv[k];
  }
  const double mismatch = std::abs(pv[n] - pv[0]);
  PeriodicOrbit phi(T, std::move(pv), std::move(pd), mismatch);

  const auto psi_rate = [&](double t) {
    return tilt - lambda + a2(t) - 2.0 * c2(t) * v0(t);
  };
  const double rate_mean = period_mean(T, psi_rate);
  PeriodicOrbit psi = nonhomogeneous_periodic(
      T, rate_mean, psi_rate, [&](double t) { return b2(t) * v0(t) * phi(t); }, opts);

  return AnsatzPair{eps,  mu,   tilt,           lambda,       std::move(phi),
                    std::move(psi), std::move(v0), std::move(se)};
}

AnsatzResidual ansatz_residual(const AnsatzPair& p) {
  const auto& phi = p.phi.values();
  const auto& psi = p.psi.values();
  const std::size_t n = p.phi.intervals();
  const double T = p.phi.period();
  const double h = T / static_cast<double>(n);
  const auto& a1 = p.shifted[Coef::a1].baseline();
  const auto& c1 = p.shifted[Coef::c1].baseline();
  const auto& a2 = p.shifted[Coef::a2].baseline();
  const auto& b2 = p.shifted[Coef::b2].baseline();
  const auto& c2 = p.shifted[Coef::c2].baseline();
  const auto fd = [&](const std::vector<double>& f, std::size_t k) {
    const auto at = [&](long off) {
      const long i = (static_cast<long>(k) + off + static_cast<long>(n)) % static_cast<long>(n);
      return f[static_cast<std::size_t>(i)];
    };
    return (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
  };
  const std::size_t m = p.psi.intervals();
  if (m != n) throw ConfigError("ansatz orbits must share their sampling");
  AnsatzResidual r;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = T * static_cast<double>(k) / static_cast<double>(n);
    const double v0 = p.v0(t);
    const double rphi = fd(phi, k) - (p.tilt - p.lambda + a1(t) - c1(t) * v0) * phi[k];
    const double rpsi = fd(psi, k) - (p.tilt - p.lambda + a2(t) - 2.0 * c2(t) * v0) * psi[k] -
                        b2(t) * v0 * phi[k];
    r.phi = std::max(r.phi, std::abs(rphi));
    r.psi = std::max(r.psi, std::abs(rpsi));
  }
  return r;
}

// ---------------------------------------------------------------------------

double SupersolutionSpec::xi(double t) const {
  return c * t - std::log(k * M / (K * ansatz.phi(t))) / ansatz.mu;
}

double SupersolutionSpec::u_plus(double t, double x) const {
  return K * std::exp(-ansatz.mu * (x - c * t)) * ansatz.phi(t);
}

double SupersolutionSpec::v_plus(double t, double x) const {
  return K * std::exp(-ansatz.mu * (x - c * t)) * ansatz.psi(t);
}

double SupersolutionSpec::g1(double v) const { return std::min(v, M); }

SupersolutionSpec SupersolutionSpec::with_K(double k_new) const {
  SupersolutionSpec s = *this;
  s.K = k_new;
  return s;
}

SupersolutionSpec make_supersolution(const CoefficientSet& set, double eps,
                                     const Dispersal& dispersal, double K,
                                     std::optional<double> extra_sup) {
  if (!(eps >= 0.0)) throw ConfigError("eps must be nonnegative");
  const CoefficientSet base = set.baselines();
  const CoefficientSet se = epsilon_shifted(base, eps);
  const EnvelopeTable enve = compute_envelopes(se);
  const auto h1 = check_H1(enve);
  if (!h1.holds) throw PreconditionError("H1 fails for the shifted coefficients: " + h1.detail);
  const auto h2 = check_shifted_H2(base, eps);
  if (!h2.holds) throw PreconditionError(h2.detail);

  // lambda_eps(mu) = tilt(mu) + mean(a1e - c1e v0*); minimize over mu.
  const PeriodicOrbit v0 = homogeneous_v_star(base);
  const auto& a1 = se[Coef::a1].baseline();
  const auto& c1 = se[Coef::c1].baseline();
  const double alpha_mean =
      period_mean(set.period(), [&](double t) { return a1(t) - c1(t) * v0(t); });
  const SpeedEstimate speed = minimize_dispersion(alpha_mean, dispersal);

  SupersolutionSpec s{build_ansatz_pair(base, eps, speed.mu_star, dispersal), 0.0,
                      K, 0.0, 0.0, 1, 0.0, enve};
  s.c = s.ansatz.lambda / s.ansatz.mu;
  s.K = K;
  s.M = std::max(homogeneous_u_star(base).max(), v0.max());
  if (extra_sup) s.M = std::max(s.M, *extra_sup);
  s.m = INFINITY;
  const auto& pv = s.ansatz.phi.values();
  const auto& qv = s.ansatz.psi.values();
  for (std::size_t i = 0; i < pv.size(); ++i) s.m = std::min(s.m, qv[i] / pv[i]);
  if (!(s.m > 0.0)) throw NumericalGuard("ansatz ratio psi/phi is not positive");
  s.k = static_cast<int>(std::ceil(1.0 / s.m));
  while (s.k > 1 && (s.k - 1) * s.m >= 1.0) --s.k;
  while (s.k * s.m < 1.0) ++s.k;
  s.shifted_env = enve;
  s.K_star = s.k * s.M * enve.M(Coef::b2);
  return s;
}

HypothesisVerdict check_ansatz_inequalities(const SupersolutionSpec& spec) {
  const auto& p = spec.ansatz;
  const auto& se = p.shifted;
  const auto& env = spec.shifted_env;
  using enum Coef;
  const double r1 = env.L(b1) / env.M(c1);
  const double r2 = env.L(b2) / env.M(c2);
  double m[4] = {INFINITY, INFINITY, INFINITY, INFINITY};
  double worst_t[4] = {0, 0, 0, 0};
  const std::size_t n = p.phi.intervals();
  for (std::size_t k = 0; k < n; ++k) {
    const double t = p.phi.time(k);
    const double phi = p.phi.values()[k];
    const double psi = p.psi.values()[k];
    const double vals[4] = {se[b1].baseline()(t) * phi - se[c1].baseline()(t) * psi,
                            se[b2].baseline()(t) * phi - se[c2].baseline()(t) * psi,
                            r1 * phi - psi, r2 * phi - psi};
    for (int i = 0; i < 4; ++i) {
      if (vals[i] < m[i]) {
        m[i] = vals[i];
        worst_t[i] = t;
      }
    }
  }
  HypothesisVerdict v;
  v.margins.assign(m, m + 4);
  v.holds = std::all_of(m, m + 4, [](double x) { return x >= 0.0; });
  static const char* names[4] = {"c1e psi <= b1e phi", "c2e psi <= b2e phi",
                                 "psi <= (b1Le/c1Me) phi", "psi <= (b2Le/c2Me) phi"};
  for (int i = 0; i < 4; ++i) {
    if (m[i] < 0.0) {
      if (!v.detail.empty()) v.detail += "; ";
      v.detail += fmt::format("{} violated by {} at t = {}", names[i], -m[i], worst_t[i]);
    }
  }
  return v;
}

ResidualReport supersolution_residual(const SupersolutionSpec& spec,
                                      const Grid& grid, const Dispersal& dispersal,
                                      const std::vector<double>& times, double dt,
                                      bool outside) {
  const auto& p = spec.ansatz;
  const auto& se = p.shifted;
  const std::size_t n = grid.size();
  const std::size_t reach = dispersal.reach();
  const double h = grid.h();
  const double slack_factor = 10.0 * (h * h + dt);
  Field up(n), vp(n), Au(n), Av(n);
  ResidualReport rep;
  rep.min_u = INFINITY;
  rep.min_v = INFINITY;
  rep.min_margin = INFINITY;
  using enum Coef;
  for (double t : times) {
    const double xi = spec.xi(t);
    for (std::size_t j = 0; j < n; ++j) {
      up[j] = spec.u_plus(t, grid.x(j));
      vp[j] = spec.v_plus(t, grid.x(j));
    }
    apply_dispersal(dispersal, up, grid, Au);
    apply_dispersal(dispersal, vp, grid, Av);
    const double gu = p.mu * spec.c + p.phi.derivative(t) / p.phi(t);
    const double gv = p.mu * spec.c + p.psi.derivative(t) / p.psi(t);
    const double v0 = p.v0(t);
    const double A1 = se[a1].baseline()(t), B1 = se[b1].baseline()(t),
                 C1 = se[c1].baseline()(t), A2 = se[a2].baseline()(t),
                 B2 = se[b2].baseline()(t), C2 = se[c2].baseline()(t);
    for (std::size_t j = reach; j + reach < n; ++j) {
      const bool in_region = grid.x(j) >= xi;
      if (in_region == outside) continue;
      const double u = up[j];
      const double v = vp[j];
      if (!std::isfinite(u) || !std::isfinite(v) || !std::isfinite(Au[j]) ||
          !std::isfinite(Av[j])) {
        continue;
      }
      const double g = spec.g1(v);
      const double d = v0 - g;
      const double F = u * (A1 - B1 * u - C1 * d);
      const double G = B2 * d * u + v * (A2 - 2.0 * C2 * v0 + C2 * g) +
                       B2 * 0.5 * (std::abs(d) - d) * u - spec.K_star * std::abs(d);
      const double ru = gu * u - Au[j] - F;
      const double rv = gv * v - Av[j] - G;
      rep.min_u = std::min(rep.min_u, ru);
      rep.min_v = std::min(rep.min_v, rv);
      rep.min_margin = std::min({rep.min_margin, ru + slack_factor * std::abs(u),
                                 rv + slack_factor * std::abs(v)});
      ++rep.points;
    }
  }
  if (rep.points == 0) {
    throw ConfigError(outside ? "no grid points left of xi*(t; K)"
                              : "no interior grid points on the region x >= xi*(t; K)");
  }
  rep.pass = rep.min_margin >= 0.0;
  return rep;
}

namespace {

class SuperComparisonObserver : public Observer {
 public:
  SuperComparisonObserver(const SupersolutionSpec& spec, const Grid& grid,
                          FrontComparison& out)
      : spec_(spec), grid_(grid), out_(out) {}

  void record(const SystemState& s) override {
    const double xi = spec_.xi(s.t);
    for (std::size_t j = 0; j < grid_.size(); ++j) {
      const double x = grid_.x(j);
      if (x < xi) continue;
      out_.max_excess_u = std::max(out_.max_excess_u, s.u[j] - spec_.u_plus(s.t, x));
      out_.max_excess_v = std::max(out_.max_excess_v, s.v[j] - spec_.v_plus(s.t, x));
    }
    ++out_.checks;
  }

 private:
  const SupersolutionSpec& spec_;
  const Grid& grid_;
  FrontComparison& out_;
};

}  // namespace

FrontComparison supersolution_front_check(const SupersolutionSpec& spec_in,
                                          const CoefficientSet& set,
                                          const Grid& grid,
                                          const Dispersal& dispersal,
                                          const SchemeConfig& scheme,
                                          std::size_t periods, double x0,
                                          double ramp) {
  const CoefficientSet base = set.baselines();
  const PeriodicOrbit u0 = homogeneous_u_star(base);
  const PeriodicOrbit v0 = homogeneous_v_star(base);
  auto [ui, vi] = make_front_data(grid, 0.5 * u0(0.0), 0.5 * v0(0.0), x0, ramp,
                                  dispersal.reach_length(grid.h()));
  SupersolutionSpec spec = spec_in;
  const auto dominated = [&](const SupersolutionSpec& s) {
    if (s.xi(0.0) < set.bump_support()) return false;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (ui[j] > s.u_plus(0.0, grid.x(j)) || vi[j] > s.v_plus(0.0, grid.x(j))) {
        return false;
      }
    }
    return true;
  };
  int doublings = 0;
  while (!dominated(spec)) {
    if (++doublings > 200) {
      throw ConvergenceError("could not find K dominating the initial data");
    }
    spec.K *= 2.0;
  }
  const PeriodicField v_star =
      compute_semitrivial(Species::v, set, grid, dispersal, scheme);
  FrontComparison out;
  out.K = spec.K;
  out.max_excess_u = -INFINITY;
  out.max_excess_v = -INFINITY;
  SuperComparisonObserver obs(spec, grid, out);
  Observer* observers[] = {&obs};
  SchemeConfig sc = scheme;
  sc.observer_cadence = 1;
  Simulator sim(CompetitionSystem(set, grid, dispersal), sc);
  SystemState s{0.0, std::move(ui), std::move(vi)};
  obs.record(s);
  sim.run_transformed(std::move(s), v_star, periods, observers);
  return out;
}

// ---------------------------------------------------------------------------

CoexistenceResult monotone_coexistence(const CoefficientSet& set, const Grid& grid,
                                       const Dispersal& dispersal,
                                       const SchemeConfig& scheme,
                                       const CoexistenceOptions& opts) {
  const PeriodicField u_star =
      compute_semitrivial(Species::u, set, grid, dispersal, scheme, opts.semitrivial);
  const PeriodicField v_star =
      compute_semitrivial(Species::v, set, grid, dispersal, scheme, opts.semitrivial);
  const StabilityReport at_u =
      linearized_radius(Species::u, set, u_star, dispersal, scheme, opts.spectrum);
  const StabilityReport at_v =
      linearized_radius(Species::v, set, v_star, dispersal, scheme, opts.spectrum);
  if (!at_u.unstable || !at_v.unstable) {
    throw PreconditionError(fmt::format(
        "coexistence needs both semitrivial states unstable: lambda(a2 - b2 u*) = {}, "
        "lambda(a1 - c1 v*) = {}",
        at_u.lambda, at_v.lambda));
  }

  Simulator up_sim(CompetitionSystem(set, grid, dispersal), scheme);
  Simulator lo_sim(CompetitionSystem(set, grid, dispersal), scheme);
  const std::size_t N = up_sim.steps_per_period();
  const std::size_t n = grid.size();
  SystemState up{0.0, u_star.at_step(0), Field(n)};
  SystemState lo{0.0, Field(n), v_star.at_step(0)};
  for (std::size_t j = 0; j < n; ++j) {
    up.v[j] = opts.seed_eps * at_u.spectrum.profile[j];
    lo.u[j] = opts.seed_eps * at_v.spectrum.profile[j];
  }

  using Samples = std::vector<Field>;
  Samples cur[4], prev[4];
  for (auto& s : cur) s.assign(N, Field(n));
  CoexistenceResult res{u_star, u_star, u_star, u_star};
  res.lambda_u = at_u.lambda;
  res.lambda_v = at_v.lambda;
  const double T = set.period();
  // Signs: +1 means the sequence must not increase, -1 not decrease.
  const double sign[4] = {1.0, -1.0, -1.0, 1.0};
  for (std::size_t p = 0; p < opts.max_periods; ++p) {
    for (std::size_t k = 0; k < N; ++k) {
      const Field* now[4] = {&up.u, &up.v, &lo.u, &lo.v};
      for (int c = 0; c < 4; ++c) {
        cur[c][k] = *now[c];
        if (p == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
          const double viol = sign[c] * (cur[c][k][j] - prev[c][k][j]);
          res.max_violation = std::max(res.max_violation, viol);
        }
      }
      if (res.max_violation > opts.slack) {
        throw NumericalGuard(fmt::format(
            "monotone iteration violated by {} in period {} (step {})",
            res.max_violation, p, k));
      }
      up_sim.step(up);
      lo_sim.step(lo);
      const double t = T * static_cast<double>(p) + static_cast<double>(k + 1) * scheme.dt;
      up.t = t;
      lo.t = t;
    }
    double delta = 0.0;
    const Field* now[4] = {&up.u, &up.v, &lo.u, &lo.v};
    for (int c = 0; c < 4; ++c) {
      for (std::size_t j = 0; j < n; ++j) {
        delta = std::max(delta, std::abs((*now[c])[j] - cur[c][0][j]));
      }
    }
    for (int c = 0; c < 4; ++c) std::swap(cur[c], prev[c]);
    for (auto& s : cur) s.assign(N, Field(n));
    if (delta < opts.tol) {
      res.periods = p + 1;
      res.upper_u = PeriodicField(T, grid, prev[0], delta);
      res.upper_v = PeriodicField(T, grid, prev[1], delta);
      res.lower_u = PeriodicField(T, grid, prev[2], delta);
      res.lower_v = PeriodicField(T, grid, prev[3], delta);
      return res;
    }
  }
  throw ConvergenceError(fmt::format(
      "monotone iteration did not settle below {} within {} periods", opts.tol,
      opts.max_periods));
}

double unit_draw(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

PersistenceReport persistence_probe(const CoefficientSet& set, const Grid& grid,
                                    const Dispersal& dispersal,
                                    const SchemeConfig& scheme,
                                    const PersistenceOptions& opts) {
  const PeriodicField v_star =
      compute_semitrivial(Species::v, set, grid, dispersal, scheme, opts.semitrivial);
  const StabilityReport at_v =
      linearized_radius(Species::v, set, v_star, dispersal, scheme);
  if (!at_v.unstable) {
    throw PreconditionError(fmt::format(
        "persistence of u needs (0, v*) unstable; lambda(a1 - c1 v*) = {}", at_v.lambda));
  }
  if (opts.mode == PersistenceMode::coexistence) {
    const PeriodicField u_star =
        compute_semitrivial(Species::u, set, grid, dispersal, scheme, opts.semitrivial);
    const StabilityReport at_u =
        linearized_radius(Species::u, set, u_star, dispersal, scheme);
    if (!at_u.unstable) {
      throw PreconditionError(fmt::format(
          "coexistence persistence needs (u*, 0) unstable; lambda(a2 - b2 u*) = {}",
          at_u.lambda));
    }
  }

  CompetitionSystem system(set, grid, dispersal);
  const auto [ub, vb] = system.invariant_bounds();
  const std::size_t n = grid.size();
  const Field& vs = v_star.at_step(0);
  const auto metric = [&](const SystemState& s) {
    double mu = INFINITY, mv = INFINITY;
    for (std::size_t j = 0; j < n; ++j) {
      mu = std::min(mu, s.u[j]);
      mv = std::min(mv, opts.mode == PersistenceMode::coexistence ? s.v[j] : vs[j] - s.v[j]);
    }
    return std::min(mu, mv);
  };

  PersistenceReport rep;
  rep.eta = INFINITY;
  Simulator sim(system, scheme);
  for (std::size_t trial = 0; trial < opts.trials; ++trial) {
    std::mt19937_64 rng(opts.seed + 0x9E3779B97F4A7C15ull * (trial + 1));
    SystemState s{0.0, Field(n), Field(n)};
    for (std::size_t j = 0; j < n; ++j) {
      s.u[j] = ub * (0.05 + 0.95 * unit_draw(rng()));
      const double r = unit_draw(rng());
      s.v[j] = opts.zero_v ? 0.0 : vb * (0.05 + 0.95 * r);
    }
    PersistenceTrial tr;
    tr.eta = INFINITY;
    Field start_u = s.u, start_v = s.v;
    for (std::size_t p = 0; p < opts.periods; ++p) {
      s = sim.run_periods(std::move(s), 1);
      double delta = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        delta = std::max({delta, std::abs(s.u[j] - start_u[j]), std::abs(s.v[j] - start_v[j])});
      }
      start_u = s.u;
      start_v = s.v;
      const double m = metric(s);
      if (m < opts.failure_floor) tr.failed = true;
      if (!tr.settled && delta < opts.settle_tol) {
        tr.settled = true;
        tr.t_detect = s.t;
      }
      if (tr.settled) tr.eta = std::min(tr.eta, m);
    }
    if (!tr.settled) tr.eta = metric(s);
    rep.all_settled = rep.all_settled && tr.settled;
    rep.any_failed = rep.any_failed || tr.failed;
    rep.eta = std::min(rep.eta, tr.eta);
    rep.trials.push_back(tr);
  }
  return rep;
}

}  // namespace compete
