#include "compete/semitrivial.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "compete/errors.hpp"
#include "compete/simulator.hpp"

namespace compete {

namespace {

struct SpeciesCoefs {
  Coef growth;
  Coef self;
};

SpeciesCoefs coefs_of(Species s) {
  return s == Species::u ? SpeciesCoefs{Coef::a1, Coef::b1}
                         : SpeciesCoefs{Coef::a2, Coef::c2};
}

const char* species_name(Species s) { return s == Species::u ? "u" : "v"; }

}  // namespace

double tail_decay_rate(Species species, const CoefficientSet& set,
                       const Dispersal& dispersal) {
  const double a_hat = set[coefs_of(species).growth].baseline().mean();
  if (!(a_hat > 0.0)) {
    throw PreconditionError("tail decay rate needs a positive mean growth rate");
  }
  if (dispersal.is_random()) return std::sqrt(a_hat);
  // Solve m(nu) - 1 = a_hat; m is increasing on nu > 0.
  const Kernel& k = *dispersal.kernel;
  double hi = 1.0;
  while (kernel_moment(k, hi) - 1.0 < a_hat) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kernel_moment(k, mid) - 1.0 < a_hat ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PeriodicField compute_semitrivial(Species species, const CoefficientSet& set,
                                  const Grid& grid, const Dispersal& dispersal,
                                  const SchemeConfig& scheme,
                                  const SemitrivialOptions& opts) {
  const auto [growth, self] = coefs_of(species);
  const PeriodicScalar& a0 = set[growth].baseline();
  if (!(a0.mean() > 0.0)) {
    throw PreconditionError(fmt::format(
        "semitrivial {}*: mean of the homogeneous growth rate is {} (needs > 0)",
        species_name(species), a0.mean()));
  }
  const PeriodicOrbit w0 = logistic_periodic(a0, set[self].baseline());

  Simulator sim(CompetitionSystem(set, grid, dispersal), scheme);
  const std::size_t N = sim.steps_per_period();
  const double T = set.period();
  SystemState s;
  s.t = 0.0;
  Field level(grid.size(), opts.seed_scale * w0(0.0));
  Field zero(grid.size(), 0.0);
  s.u = species == Species::u ? level : zero;
  s.v = species == Species::u ? zero : level;
  Field& w = species == Species::u ? s.u : s.v;

  std::vector<Field> samples(N);
  double delta = INFINITY;
  std::size_t period = 0;
  for (; period < opts.max_periods; ++period) {
    for (std::size_t k = 0; k < N; ++k) {
      samples[k] = w;
      sim.step(s);
      s.t = T * static_cast<double>(period) + static_cast<double>(k + 1) * scheme.dt;
    }
    s.t = T * static_cast<double>(period + 1);
    delta = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      delta = std::max(delta, std::abs(w[j] - samples[0][j]));
    }
    if (delta < opts.tol) break;
  }
  if (!(delta < opts.tol)) {
    throw ConvergenceError(fmt::format(
        "semitrivial {}*: period-to-period change {} still above {} after {} periods",
        species_name(species), delta, opts.tol, opts.max_periods));
  }
  PeriodicField field(T, grid, std::move(samples), delta);

  if (opts.check_tail && set.has_bumps()) {
    const double margin =
        opts.tail_margin.value_or(10.0 / tail_decay_rate(species, set, dispersal));
    const double edge = set.bump_support() + margin;
    bool any = false;
    double worst = 0.0;
    double worst_x = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      if (std::abs(grid.x(j)) < edge) continue;
      any = true;
      for (std::size_t k = 0; k < N; ++k) {
        const double t = T * static_cast<double>(k) / static_cast<double>(N);
        const double d = std::abs(field.at_step(k)[j] - w0(t));
        if (d > worst) {
          worst = d;
          worst_x = grid.x(j);
        }
      }
    }
    if (!any) {
      throw ConfigError(fmt::format(
          "domain [{}, {}] has no points beyond |x| = {} for the semitrivial tail "
          "check",
          grid.x_min(), grid.x_max(), edge));
    }
    if (worst >= opts.tail_tol) {
      throw NumericalGuard(fmt::format(
          "semitrivial {}*: tail deviation {} at x = {} exceeds {} (domain too "
          "small)",
          species_name(species), worst, worst_x, opts.tail_tol));
    }
  }
  return field;
}

PeriodicField invasion_rate_field(Species target, const CoefficientSet& set,
                                  const PeriodicField& semitrivial) {
  const Grid& grid = semitrivial.grid();
  const Coef growth = target == Species::u ? Coef::a2 : Coef::a1;
  const Coef comp = target == Species::u ? Coef::b2 : Coef::c1;
  const std::size_t N = semitrivial.steps_per_period();
  const double T = semitrivial.period();
  std::vector<Field> rate(N, Field(grid.size()));
  for (std::size_t k = 0; k < N; ++k) {
    const double t = T * static_cast<double>(k) / static_cast<double>(N);
    const auto& w = semitrivial.at_step(k);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double x = grid.x(j);
      const double a = set[growth].baseline()(t) + set[growth].bump_cell(x, grid.h());
      const double b = set[comp].baseline()(t) + set[comp].bump_cell(x, grid.h());
      rate[k][j] = a - b * w[j];
    }
  }
  return PeriodicField(T, grid, std::move(rate), 0.0);
}

StabilityReport linearized_radius(Species target, const CoefficientSet& set,
                                  const PeriodicField& semitrivial,
                                  const Dispersal& dispersal,
                                  const SchemeConfig& scheme,
                                  const SpectrumOptions& opts) {
  auto problem = LinearProblem::make(
      0.0, GrowthRate::tabulated(invasion_rate_field(target, set, semitrivial)),
      semitrivial.grid(), dispersal, scheme);
  StabilityReport r;
  r.spectrum = principal_spectrum_point(problem, opts);
  r.lambda = r.spectrum.lambda;
  r.radius = r.spectrum.radius(set.period());
  r.unstable = r.radius > 1.0;
  r.inconclusive = std::abs(r.radius - 1.0) < 1e-3;
  return r;
}

BumpFamily BumpFamily::standard() {
  BumpFamily f;
  for (int i = 1; i <= 20; ++i) f.amplitudes.push_back(0.05 * i);
  f.widths = {1.0, 2.0, 4.0, 8.0};
  return f;
}

namespace {

PeriodicScalar invasion_baseline(const CoefficientSet& set) {
  const PeriodicOrbit u0 = homogeneous_u_star(set);
  const PeriodicScalar& a2 = set[Coef::a2].baseline();
  const PeriodicScalar& b2 = set[Coef::b2].baseline();
  return PeriodicScalar::tabulate(set.period(), u0.intervals(), [&](double t) {
    return a2(t) - b2(t) * u0(t);
  });
}

double lambda_of(const PeriodicScalar& baseline, std::optional<SpatialBump> bump,
                 const Grid& grid, const Dispersal& dispersal,
                 const SchemeConfig& scheme, const SpectrumOptions& opts) {
  const CoefficientField field(baseline, std::move(bump));
  auto problem = LinearProblem::make(0.0, GrowthRate::separable(field, grid), grid,
                                     dispersal, scheme);
  return principal_spectrum_point(problem, opts).lambda;
}

}  // namespace

BumpCandidate evaluate_a2_bump(const CoefficientSet& set, const SpatialBump& bump,
                               const Grid& grid, const Dispersal& dispersal,
                               const SchemeConfig& scheme,
                               const SpectrumOptions& opts) {
  const PeriodicScalar base = invasion_baseline(set.baselines());
  BumpCandidate c;
  c.amplitude = bump.amplitude();
  c.width = 2.0 * bump.plateau();
  c.lambda = lambda_of(base, bump, grid, dispersal, scheme, opts);
  c.lambda_star = c.lambda - base.mean();
  return c;
}

DestabilizingResult destabilizing_bump(const CoefficientSet& set,
                                       const Grid& grid,
                                       const Dispersal& dispersal,
                                       const SchemeConfig& scheme,
                                       const BumpFamily& family,
                                       const SpectrumOptions& opts) {
  if (set.has_bumps()) {
    throw PreconditionError(
        "destabilizing bump search expects unperturbed coefficients (only a2 is "
        "perturbed by the search)");
  }
  const PeriodicScalar base = invasion_baseline(set);
  DestabilizingResult res{SpatialBump(0.0, 0.0, 0.0, 1.0), 0.0, 0.0, 0.0, {}};
  res.lambda_base = lambda_of(base, std::nullopt, grid, dispersal, scheme, opts);
  if (res.lambda_base >= 0.0) {
    throw PreconditionError(fmt::format(
        "lambda(a2 - b2 u0*) = {} is not negative; the semitrivial state is not "
        "stable to begin with",
        res.lambda_base));
  }
  std::vector<double> amps = family.amplitudes;
  std::vector<double> widths = family.widths;
  std::sort(amps.begin(), amps.end());
  std::sort(widths.begin(), widths.end());
  for (double a : amps) {
    for (double w : widths) {
      const SpatialBump bump(a, 0.5 * w, family.ramp);
      BumpCandidate c;
      c.amplitude = a;
      c.width = w;
      c.lambda = lambda_of(base, bump, grid, dispersal, scheme, opts);
      c.lambda_star = c.lambda - base.mean();
      res.evaluated.push_back(c);
      if (c.lambda > 0.0) {
        res.bump = bump;
        res.lambda = c.lambda;
        res.lambda_star = c.lambda_star;
        return res;
      }
    }
  }
  throw ConvergenceError(fmt::format(
      "no bump in the family (max amplitude {}, max width {}) makes lambda(a2 - b2 "
      "u*) positive",
      amps.empty() ? 0.0 : amps.back(), widths.empty() ? 0.0 : widths.back()));
}

}  // namespace compete
