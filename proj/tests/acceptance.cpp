// Desk-scale acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "compete/coefficients.hpp"
#include "compete/dispersal.hpp"
#include "compete/errors.hpp"
#include "compete/periodic_orbits.hpp"
#include "compete/scheme.hpp"
#include "compete/semitrivial.hpp"
#include "compete/simulator.hpp"
#include "compete/spectrum.hpp"
#include "compete/spreading.hpp"
#include "compete/verify.hpp"

using namespace compete;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

const std::array<double, 6> kCanonical = {1.0, 1.0, 0.5, 0.4, 0.5, 1.0};
const std::array<double, 6> kSymmetric = {1.0, 1.0, 0.5, 1.0, 0.5, 1.0};

SchemeConfig scheme_for(double dt) {
  SchemeConfig s;
  s.dt = dt;
  s.mode = StepMode::diffusion_implicit;
  return s;
}

CoefficientSet with_bump(const std::array<double, 6>& v, Coef c, double amp,
                         double width) {
  const auto set = CoefficientSet::constants(v);
  return set.with_field(c, set[c].with_bump(SpatialBump::with_width(amp, width)));
}

Outcome homogeneous_mean_law() {
  std::mt19937_64 rng(20240611);
  const auto draw = [&] { return unit_draw(rng()); };
  const Grid grid(-2.0, 2.0, 21);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double T = 0.5 + 1.5 * draw();
    std::vector<Harmonic> hs;
    for (int k = 1; k <= 3; ++k) {
      hs.push_back({k, (draw() - 0.5) * 0.8, 2.0 * std::numbers::pi * draw()});
    }
    const double mean = (draw() - 0.5) * 2.0;
    const auto a0 = PeriodicScalar::trig(T, mean, hs);
    const auto p = LinearProblem::make(0.0, GrowthRate::separable(CoefficientField(a0), grid),
                                       grid, Dispersal::random(),
                                       SchemeConfig::per_period(T, 200));
    const double lam = principal_spectrum_point(p).lambda;
    worst = std::max(worst, std::abs(lam - a0.mean()));
  }
  return {worst < 1e-5, fmt::format("max |lambda - mean| = {:.3e}", worst)};
}

Outcome tilted_laws() {
  const double a = 0.3;
  double worst_r = 0.0, worst_n = 0.0;
  const Grid rgrid(-2.0, 2.0, 41);
  const Grid ngrid(-2.5, 2.5, 501);
  const Kernel kernel(KernelShape::uniform, 1.0, ngrid.h());
  const auto field = CoefficientField(PeriodicScalar::constant(1.0, a));
  for (double mu : {0.0, 0.5, 1.0, 2.0}) {
    const auto pr = LinearProblem::make(mu, GrowthRate::separable(field, rgrid), rgrid,
                                        Dispersal::random(), scheme_for(0.01));
    worst_r = std::max(worst_r, std::abs(principal_spectrum_point(pr).lambda - (mu * mu + a)));
    const auto pn = LinearProblem::make(mu, GrowthRate::separable(field, ngrid), ngrid,
                                        Dispersal::nonlocal(kernel), scheme_for(0.01));
    const double exact = (mu == 0.0 ? 1.0 : std::sinh(mu) / mu) - 1.0 + a;
    worst_n = std::max(worst_n, std::abs(principal_spectrum_point(pn).lambda - exact));
  }
  return {worst_r < 1e-5 && worst_n < 1e-4,
          fmt::format("random max err {:.2e}, nonlocal max err {:.2e}", worst_r, worst_n)};
}

Outcome dispersion_closed_form() {
  const auto set = CoefficientSet::constants(kCanonical);
  const auto est = dispersion_speed(set, Dispersal::random());
  DispersionOptions grid_opts;
  grid_opts.grid_only = true;
  const auto scan = dispersion_speed(set, Dispersal::random(), grid_opts);
  const double c_err = std::abs(est.c - 2.0 * std::sqrt(0.8));
  const double mu_err = std::abs(est.mu_star - std::sqrt(0.8));
  const double rel = std::abs(est.c - scan.c) / scan.c;
  return {c_err < 1e-4 && mu_err < 1e-3 && rel < 1e-4 && est.unimodal,
          fmt::format("c0* = {:.8f} (err {:.1e}), mu* = {:.6f} (err {:.1e}), grid rel {:.1e}",
                      est.c, c_err, est.mu_star, mu_err, rel)};
}

Outcome kpp_control() {
  const Grid grid(-50.0, 350.0, 4001);
  FrontRunOptions opts;
  opts.periods = 100;
  opts.x0 = -30.0;
  const auto r = scalar_front_speed(1.0, 1.0, Dispersal::random(), grid, scheme_for(0.01), opts);
  const double rel = std::abs(r.estimate.c - 2.0) / 2.0;
  return {rel < 0.05, fmt::format("speed {:.4f} +- {:.1e} (rel err {:.3f}, R^2 {:.6f})",
                                  r.estimate.c, r.estimate.std_error, rel, r.estimate.r2)};
}

FrontRunOptions competition_front_options() {
  FrontRunOptions opts;
  opts.periods = 100;
  opts.x0 = -20.0;
  return opts;
}

const Grid& competition_grid() {
  static const Grid grid(-60.0, 220.0, 2801);
  return grid;
}

Outcome homogeneous_front() {
  const auto set = CoefficientSet::constants(kCanonical);
  const auto r = speed_interval(set, Dispersal::random(), competition_grid(),
                                scheme_for(0.01), competition_front_options());
  const double c0 = 2.0 * std::sqrt(0.8);
  const double el = std::abs(r.lower.c - c0) / c0;
  const double eu = std::abs(r.upper.c - c0) / c0;
  return {el < 0.05 && eu < 0.05,
          fmt::format("lower {:.4f} (rel {:.3f}), upper {:.4f} (rel {:.3f})", r.lower.c, el,
                      r.upper.c, eu)};
}

Outcome bump_not_slower() {
  const auto set = with_bump(kCanonical, Coef::a1, -0.2, 4.0);
  const auto env = compute_envelopes(set.baselines());
  const bool hyp = check_H0(env).holds && check_H1(env).holds &&
                   set[Coef::a1].bounds().first > 0.0;
  const auto r = speed_interval(set, Dispersal::random(), competition_grid(),
                                scheme_for(0.01), competition_front_options());
  const double c0 = r.theoretical.c;
  const double floor = c0 - (r.lower.std_error + 0.02 * c0);
  return {hyp && r.lower.c >= floor,
          fmt::format("lower {:.4f} +- {:.1e} >= {:.4f} (c0* {:.5f})", r.lower.c,
                      r.lower.std_error, floor, c0)};
}

Outcome bump_equal_speed() {
  const auto set = with_bump(kCanonical, Coef::a1, 0.3, 4.0);
  const auto h2 = check_H2(set.baselines(), compute_envelopes(set.baselines()));
  const auto r = speed_interval(set, Dispersal::random(), competition_grid(),
                                scheme_for(0.01), competition_front_options());
  const double c0 = r.theoretical.c;
  const double el = std::abs(r.lower.c - c0) / c0;
  const double eu = std::abs(r.upper.c - c0) / c0;
  return {h2.holds && el < 0.05 && eu < 0.05,
          fmt::format("H2 {}, lower {:.4f} (rel {:.3f}), upper {:.4f} (rel {:.3f})",
                      h2.holds ? "holds" : "fails", r.lower.c, el, r.upper.c, eu)};
}

Outcome continuity() {
  const auto set = CoefficientSet::constants(kCanonical);
  const auto table = continuity_sweep(set, Coef::a1, {0.2, 0.1, 0.05}, Dispersal::random());
  double worst = 0.0;
  for (const auto& row : table.rows) {
    worst = std::max(worst, std::abs(row.c0 - 2.0 * std::sqrt(0.8 + row.eps)));
  }
  return {worst < 1e-4 && table.monotone,
          fmt::format("max closed-form err {:.2e}, monotone {}", worst, table.monotone)};
}

Outcome destabilize() {
  const auto set = CoefficientSet::constants(kCanonical);
  const Grid grid(-40.0, 40.0, 401);
  const auto scheme = scheme_for(0.01);
  const Dispersal d = Dispersal::random();
  SpectrumOptions sopts;
  sopts.max_periods = 20000;

  const PeriodicField u_star = compute_semitrivial(Species::u, set, grid, d, scheme);
  const auto base = linearized_radius(Species::u, set, u_star, d, scheme, sopts);
  const bool base_ok = std::abs(base.lambda + 0.1) < 1e-5;

  const auto found = destabilizing_bump(set, grid, d, scheme, BumpFamily::standard(), sopts);
  // Independent check: semitrivial of the perturbed set and the tabulated rate.
  const auto perturbed = set.with_field(Coef::a2, set[Coef::a2].with_bump(found.bump));
  const PeriodicField u_pert = compute_semitrivial(Species::u, perturbed, grid, d, scheme);
  const auto check = linearized_radius(Species::u, perturbed, u_pert, d, scheme, sopts);

  bool chain = true;
  double chain_min = INFINITY;
  for (double amp : {0.05, 0.2, 0.5}) {
    for (double w : {1.0, 4.0}) {
      const auto s = set.with_field(Coef::a2,
                                    set[Coef::a2].with_bump(SpatialBump::with_width(amp, w)));
      const auto us = compute_semitrivial(Species::u, s, grid, d, scheme);
      const double lam = linearized_radius(Species::u, s, us, d, scheme, sopts).lambda;
      chain_min = std::min(chain_min, lam - base.lambda);
      chain = chain && lam >= base.lambda - 1e-5;
    }
  }
  return {base_ok && check.lambda > 0.0 && chain,
          fmt::format("base lambda {:.7f}; bump A = {}, width {} -> lambda {:.4f} "
                      "(verified {:.4f}); chain min gap {:.2e}",
                      base.lambda, found.bump.amplitude(), 2.0 * found.bump.plateau(),
                      found.lambda, check.lambda, chain_min)};
}

Outcome coexistence() {
  const Grid grid(-30.0, 30.0, 301);
  const auto scheme = scheme_for(0.01);
  const Dispersal d = Dispersal::random();
  const auto plain = monotone_coexistence(CoefficientSet::constants(kSymmetric), grid, d, scheme);
  double err = 0.0;
  for (const PeriodicField* f : {&plain.upper_u, &plain.upper_v, &plain.lower_u, &plain.lower_v}) {
    err = std::max({err, std::abs(f->sup() - 2.0 / 3.0), std::abs(f->inf() - 2.0 / 3.0)});
  }
  const auto bumped =
      monotone_coexistence(with_bump(kSymmetric, Coef::a1, 0.2, 4.0), grid, d, scheme);
  double tail = 0.0;
  double spread = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto& uu = bumped.upper_u.at_step(0);
    spread = std::max(spread, std::abs(uu[j] - uu[0]));
    if (std::abs(grid.x(j)) < 25.0) continue;
    for (const PeriodicField* f :
         {&bumped.upper_u, &bumped.upper_v, &bumped.lower_u, &bumped.lower_v}) {
      for (std::size_t k = 0; k < f->steps_per_period(); ++k) {
        tail = std::max(tail, std::abs(f->at_step(k)[j] - 2.0 / 3.0));
      }
    }
  }
  const double viol = std::max(plain.max_violation, bumped.max_violation);
  return {err < 1e-4 && tail < 1e-3 && spread > 1e-3 && viol <= 1e-10,
          fmt::format("flat err {:.2e}; bump tail err {:.2e}, x-variation {:.3f}; max "
                      "monotonicity violation {:.1e}",
                      err, tail, spread, viol)};
}

Outcome comparison_suite() {
  const Grid grid(-20.0, 20.0, 201);
  const auto scheme = scheme_for(0.01);
  const auto set = with_bump(kCanonical, Coef::a1, 0.3, 4.0);
  const Dispersal d = Dispersal::random();
  Simulator sim(CompetitionSystem(set, grid, d), scheme);
  const PeriodicField v_star = compute_semitrivial(Species::v, set, grid, d, scheme);
  std::mt19937_64 rng(7);
  const auto draw = [&] { return unit_draw(rng()); };
  const std::size_t n = grid.size();
  double worst_comp = 0.0, worst_coop = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    SystemState lo{0.0, Field(n), Field(n)}, hi{0.0, Field(n), Field(n)};
    for (std::size_t j = 0; j < n; ++j) {
      lo.u[j] = 1.2 * draw();
      hi.u[j] = lo.u[j] + 0.5 * draw();
      hi.v[j] = 0.6 * draw();
      lo.v[j] = hi.v[j] + 0.3 * draw();
    }
    for (int p = 0; p < 50; ++p) {
      lo = sim.run_periods(std::move(lo), 1);
      hi = sim.run_periods(std::move(hi), 1);
      for (std::size_t j = 0; j < n; ++j) {
        worst_comp = std::max({worst_comp, lo.u[j] - hi.u[j], hi.v[j] - lo.v[j]});
      }
    }
    // Cooperative order of the transformed system.
    SystemState a{0.0, Field(n), Field(n)}, b{0.0, Field(n), Field(n)};
    const Field& vs = v_star.at_step(0);
    for (std::size_t j = 0; j < n; ++j) {
      a.u[j] = 0.8 * draw();
      b.u[j] = a.u[j] + 0.2 * draw();
      a.v[j] = 0.7 * vs[j] * draw();
      b.v[j] = a.v[j] + (vs[j] - a.v[j]) * draw();
    }
    for (int p = 0; p < 50; ++p) {
      a = sim.run_transformed(std::move(a), v_star, 1);
      b = sim.run_transformed(std::move(b), v_star, 1);
      for (std::size_t j = 0; j < n; ++j) {
        worst_coop = std::max({worst_coop, a.u[j] - b.u[j], a.v[j] - b.v[j]});
      }
    }
  }
  return {worst_comp <= 1e-10 && worst_coop <= 1e-10,
          fmt::format("competitive violation {:.1e}, cooperative violation {:.1e}",
                      worst_comp, worst_coop)};
}

Outcome supersolution() {
  const auto set = CoefficientSet::constants(kCanonical);
  const Dispersal d = Dispersal::random();
  const double eps = 0.05;
  const auto spec = make_supersolution(set, eps, d);
  const auto res = ansatz_residual(spec.ansatz);
  const auto ineq = check_ansatz_inequalities(spec);
  const double margin = std::min(ineq.margins[0], ineq.margins[1]);

  const Grid grid(-40.0, 160.0, 2001);
  const auto scheme = scheme_for(0.01);
  std::vector<double> times;
  for (int k = 0; k <= 40; ++k) times.push_back(0.25 * k);
  const auto rep = supersolution_residual(spec, grid, d, times, scheme.dt);
  const auto cmp = supersolution_front_check(spec, set, grid, d, scheme, 40, -20.0);
  const bool ok = res.phi < 1e-8 && res.psi < 1e-8 && ineq.holds && margin > 0.0 &&
                  rep.pass && cmp.max_excess_u <= 0.0 && cmp.max_excess_v <= 0.0;
  return {ok, fmt::format("ansatz residual {:.1e}/{:.1e}; ineq margin {:.4f}; F/G min "
                          "margin {:.2e} over {} pts; front excess {:.2e}/{:.2e} (K = {})",
                          res.phi, res.psi, margin, rep.min_margin, rep.points,
                          cmp.max_excess_u, cmp.max_excess_v, cmp.K)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "homogeneous mean law", 10.0, homogeneous_mean_law},
      {2, "tilted analytic laws", 10.0, tilted_laws},
      {3, "dispersion speed closed form", 5.0, dispersion_closed_form},
      {4, "KPP solver control", 120.0, kpp_control},
      {5, "homogeneous competition front", 180.0, homogeneous_front},
      {6, "localized variation does not slow spreading", 180.0, bump_not_slower},
      {7, "localized variation under H2 keeps the speed", 180.0, bump_equal_speed},
      {8, "continuity sweep", 10.0, continuity},
      {9, "semitrivial stability and destabilizing bump", 60.0, destabilize},
      {10, "monotone iteration to coexistence", 180.0, coexistence},
      {11, "comparison-principle suite", 120.0, comparison_suite},
      {12, "super-solution machinery", 120.0, supersolution},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s  criterion %2d  %-46s %7.2fs  %s%s\n", pass ? "PASS" : "FAIL", c.id,
                c.name, secs, o.detail.c_str(), in_time ? "" : " [over time budget]");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
