#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include <fmt/format.h>

#include "compete/errors.hpp"
#include "compete/semitrivial.hpp"
#include "compete/spreading.hpp"
#include "compete/verify.hpp"
#include "output.hpp"

namespace compete::cli {

namespace {

json estimate_json(const SpeedEstimate& e) {
  json j = {{"kind", speed_kind_name(e.kind)}, {"c", e.c}};
  if (e.kind == SpeedKind::theoretical) {
    j["mu_star"] = e.mu_star;
    j["alpha_mean"] = e.alpha_mean;
    j["unimodal"] = e.unimodal;
  } else {
    j["std_error"] = e.std_error;
    j["r2"] = e.r2;
    j["window"] = {e.window_t0, e.window_t1};
    j["window_points"] = e.window_points;
  }
  return j;
}

json verdict_json(const HypothesisVerdict& v) {
  json j = {{"holds", v.holds}, {"margins", v.margins}};
  if (!v.detail.empty()) j["detail"] = v.detail;
  return j;
}

json hypotheses_json(const CoefficientSet& set) {
  const CoefficientSet base = set.baselines();
  const EnvelopeTable env = compute_envelopes(base);
  json j = {{"H0", verdict_json(check_H0(env))}};
  try {
    j["H1"] = verdict_json(check_H1(env));
    j["H2"] = verdict_json(check_H2(base, env));
  } catch (const PreconditionError& e) {
    j["H1"] = {{"holds", false}, {"detail", e.what()}};
  }
  return j;
}

DispersionOptions dispersion_options(const RunOptions& opts) {
  DispersionOptions d;
  d.grid_only = opts.mu_grid_only;
  return d;
}

FrontRunOptions front_options(const Scenario& s) {
  FrontRunOptions o;
  o.periods = s.periods;
  o.x0 = s.x0;
  o.theta = s.theta;
  return o;
}

std::vector<std::vector<double>> trace_rows(const std::vector<FrontSample>& trace) {
  std::vector<std::vector<double>> rows;
  rows.reserve(trace.size());
  for (const auto& s : trace) rows.push_back({s.t, s.x});
  return rows;
}

Series trace_series(const std::string& name, const std::vector<FrontSample>& trace) {
  Series s{name, {}, {}};
  for (const auto& p : trace) {
    s.x.push_back(p.t);
    s.y.push_back(p.x);
  }
  return s;
}

// Runs fn(i) for i < n on up to `workers` threads. Results are indexed, so
// the merge order never depends on scheduling; the lowest-index failure wins.
template <typename R>
std::vector<R> parallel_map(std::size_t n, std::size_t workers,
                            const std::function<R(std::size_t)>& fn) {
  std::vector<std::optional<R>> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<R> res;
  res.reserve(n);
  for (auto& r : out) res.push_back(std::move(*r));
  return res;
}

CommandResult finish(Emitter& em, json report, std::string summary) {
  em.report(report);
  CommandResult r;
  r.manifest = em.finish();
  r.files = em.files();
  r.report = std::move(report);
  r.summary = std::move(summary);
  return r;
}

CommandResult run_speed(const RunConfig& cfg, const RunOptions& opts) {
  const SpeedEstimate est =
      dispersion_speed(cfg.coefficients, cfg.dispersal, dispersion_options(opts));
  Emitter em(cfg, "speed");
  std::vector<std::vector<double>> rows;
  Series ratio{"lambda/mu", {}, {}};
  for (const auto& p : est.table) {
    rows.push_back({p.mu, p.lambda, p.ratio});
    ratio.x.push_back(p.mu);
    ratio.y.push_back(p.ratio);
  }
  em.csv("dispersion", {"mu", "lambda", "ratio"}, rows);
  em.svg("dispersion", "dispersion relation", "mu", {ratio});
  json report = {{"speed", estimate_json(est)},
                 {"mu_grid_only", opts.mu_grid_only},
                 {"hypotheses", hypotheses_json(cfg.coefficients)}};
  return finish(em, std::move(report),
                fmt::format("c0* = {:.5f}, mu* = {:.5f}", est.c, est.mu_star));
}

CommandResult run_simulate(const RunConfig& cfg, const RunOptions&) {
  const Scenario& s = cfg.scenario;
  Emitter em(cfg, "simulate");
  if (s.front == FrontKind::scalar) {
    const auto& a = cfg.coefficients[Coef::a1];
    const auto& b = cfg.coefficients[Coef::b1];
    if (a.has_bump() || b.has_bump() || !a.baseline().is_constant() ||
        !b.baseline().is_constant()) {
      throw ConfigError("a scalar front run needs constant a1 and b1 without bumps");
    }
    const double av = a.baseline().mean(), bv = b.baseline().mean();
    const auto r =
        scalar_front_speed(av, bv, cfg.dispersal, cfg.grid, cfg.scheme, front_options(s));
    em.csv("trace", {"t", "x"}, trace_rows(r.trace));
    em.svg("trace", "front position", "t", {trace_series("front", r.trace)});
    json report = {{"front", "scalar"}, {"a", av}, {"b", bv}, {"estimate", estimate_json(r.estimate)}};
    return finish(em, std::move(report),
                  fmt::format("scalar front speed {:.5f} +- {:.1e} (R^2 {:.6f})", r.estimate.c,
                              r.estimate.std_error, r.estimate.r2));
  }
  const auto r = speed_interval(cfg.coefficients, cfg.dispersal, cfg.grid, cfg.scheme,
                                front_options(s));
  em.csv("lower_trace", {"t", "x"}, trace_rows(r.lower_trace));
  em.csv("upper_trace", {"t", "x"}, trace_rows(r.upper_trace));
  em.svg("traces", "front positions", "t",
         {trace_series("lower", r.lower_trace), trace_series("upper", r.upper_trace)});
  json report = {{"front", "competition"},
                 {"lower", estimate_json(r.lower)},
                 {"upper", estimate_json(r.upper)},
                 {"theoretical", estimate_json(r.theoretical)}};
  return finish(em, std::move(report),
                fmt::format("lower {:.5f}, upper {:.5f}, c0* = {:.5f}", r.lower.c, r.upper.c,
                            r.theoretical.c));
}

json stability_json(const StabilityReport& r) {
  return {{"lambda", r.lambda},
          {"radius", r.radius},
          {"unstable", r.unstable},
          {"inconclusive", r.inconclusive},
          {"iterations", r.spectrum.iterations}};
}

CommandResult run_spectrum(const RunConfig& cfg, const RunOptions&) {
  const auto& set = cfg.coefficients;
  const PeriodicField us = compute_semitrivial(Species::u, set, cfg.grid, cfg.dispersal, cfg.scheme);
  const PeriodicField vs = compute_semitrivial(Species::v, set, cfg.grid, cfg.dispersal, cfg.scheme);
  const auto ru = linearized_radius(Species::u, set, us, cfg.dispersal, cfg.scheme);
  const auto rv = linearized_radius(Species::v, set, vs, cfg.dispersal, cfg.scheme);
  Emitter em(cfg, "spectrum");
  std::vector<std::vector<double>> rows;
  Series su{"u*", {}, {}}, sv{"v*", {}, {}};
  for (std::size_t j = 0; j < cfg.grid.size(); ++j) {
    const double x = cfg.grid.x(j);
    rows.push_back({x, us.at_step(0)[j], vs.at_step(0)[j], ru.spectrum.profile[j],
                    rv.spectrum.profile[j]});
    su.x.push_back(x);
    su.y.push_back(us.at_step(0)[j]);
    sv.x.push_back(x);
    sv.y.push_back(vs.at_step(0)[j]);
  }
  em.csv("profiles", {"x", "u_star", "v_star", "phi_u_invasion", "phi_v_invasion"}, rows);
  em.svg("semitrivials", "semitrivial states at t = 0", "x", {su, sv});
  json report = {{"at_u_star", stability_json(ru)},
                 {"at_v_star", stability_json(rv)},
                 {"u_star", {{"inf", us.inf()}, {"sup", us.sup()}}},
                 {"v_star", {{"inf", vs.inf()}, {"sup", vs.sup()}}}};
  return finish(em, std::move(report),
                fmt::format("lambda(a2 - b2 u*) = {:.7f} ({}), lambda(a1 - c1 v*) = {:.7f} ({})",
                            ru.lambda, ru.unstable ? "unstable" : "stable", rv.lambda,
                            rv.unstable ? "unstable" : "stable"));
}

CommandResult run_persistence(const RunConfig& cfg, const RunOptions&) {
  PersistenceOptions o;
  o.mode = cfg.scenario.mode == "exclusion" ? PersistenceMode::exclusion
                                            : PersistenceMode::coexistence;
  o.trials = cfg.scenario.trials;
  o.seed = cfg.seed;
  o.periods = cfg.scenario.periods;
  o.zero_v = cfg.scenario.zero_v;
  const auto rep = persistence_probe(cfg.coefficients, cfg.grid, cfg.dispersal, cfg.scheme, o);
  Emitter em(cfg, "persistence");
  std::vector<std::vector<double>> rows;
  json trials = json::array();
  std::size_t settled = 0;
  for (std::size_t i = 0; i < rep.trials.size(); ++i) {
    const auto& t = rep.trials[i];
    rows.push_back({double(i), t.eta, t.t_detect, double(t.settled), double(t.failed)});
    trials.push_back({{"eta", t.eta}, {"t_detect", t.t_detect}, {"settled", t.settled},
                      {"failed", t.failed}});
    settled += t.settled;
  }
  em.csv("trials", {"trial", "eta", "t_detect", "settled", "failed"}, rows);
  json report = {{"mode", cfg.scenario.mode}, {"eta", rep.eta}, {"all_settled", rep.all_settled},
                 {"any_failed", rep.any_failed}, {"trials", trials}};
  return finish(em, std::move(report),
                fmt::format("eta = {:.6f} ({} of {} trials settled, {} failed)", rep.eta, settled,
                            rep.trials.size(), rep.any_failed ? "some" : "none"));
}

CommandResult run_coexist(const RunConfig& cfg, const RunOptions&) {
  const auto r = monotone_coexistence(cfg.coefficients, cfg.grid, cfg.dispersal, cfg.scheme);
  Emitter em(cfg, "coexist");
  std::vector<std::vector<double>> rows;
  std::vector<Series> series = {{"u upper", {}, {}}, {"u lower", {}, {}},
                                {"v upper", {}, {}}, {"v lower", {}, {}}};
  for (std::size_t j = 0; j < cfg.grid.size(); ++j) {
    const double x = cfg.grid.x(j);
    const double vals[4] = {r.upper_u.at_step(0)[j], r.lower_u.at_step(0)[j],
                            r.upper_v.at_step(0)[j], r.lower_v.at_step(0)[j]};
    rows.push_back({x, vals[0], vals[1], vals[2], vals[3]});
    for (int k = 0; k < 4; ++k) {
      series[k].x.push_back(x);
      series[k].y.push_back(vals[k]);
    }
  }
  em.csv("profiles", {"x", "u_upper", "u_lower", "v_upper", "v_lower"}, rows);
  em.svg("profiles", "coexistence limits at t = 0", "x", series);
  const auto range = [](const PeriodicField& f) { return json{{"inf", f.inf()}, {"sup", f.sup()}}; };
  json report = {{"periods", r.periods},
                 {"max_violation", r.max_violation},
                 {"lambda_at_u_star", r.lambda_u},
                 {"lambda_at_v_star", r.lambda_v},
                 {"upper_u", range(r.upper_u)},
                 {"lower_u", range(r.lower_u)},
                 {"upper_v", range(r.upper_v)},
                 {"lower_v", range(r.lower_v)}};
  return finish(em, std::move(report),
                fmt::format("u in [{:.6f}, {:.6f}], v in [{:.6f}, {:.6f}] after {} periods; "
                            "max monotonicity violation {:.1e}",
                            r.lower_u.inf(), r.upper_u.sup(), r.upper_v.inf(), r.lower_v.sup(),
                            r.periods, r.max_violation));
}

CommandResult run_destabilize(const RunConfig& cfg, const RunOptions&) {
  const auto r = destabilizing_bump(cfg.coefficients, cfg.grid, cfg.dispersal, cfg.scheme);
  Emitter em(cfg, "destabilize");
  std::vector<std::vector<double>> rows;
  for (const auto& c : r.evaluated) rows.push_back({c.amplitude, c.width, c.lambda, c.lambda_star});
  em.csv("candidates", {"amplitude", "width", "lambda", "lambda_star"}, rows);
  json report = {{"lambda_base", r.lambda_base},
                 {"bump", {{"amplitude", r.bump.amplitude()},
                           {"width", 2.0 * r.bump.plateau()},
                           {"ramp", r.bump.ramp()}}},
                 {"lambda", r.lambda},
                 {"lambda_star", r.lambda_star},
                 {"evaluated", r.evaluated.size()}};
  return finish(em, std::move(report),
                fmt::format("base lambda {:.7f}; bump amplitude {}, width {} -> lambda {:.5f}",
                            r.lambda_base, r.bump.amplitude(), 2.0 * r.bump.plateau(), r.lambda));
}

CommandResult run_verify_super(const RunConfig& cfg, const RunOptions&) {
  const double eps = cfg.scenario.eps.front();
  const auto spec = make_supersolution(cfg.coefficients, eps, cfg.dispersal, cfg.scenario.K);
  const auto res = ansatz_residual(spec.ansatz);
  const auto ineq = check_ansatz_inequalities(spec);
  const double horizon = std::min<double>(static_cast<double>(cfg.scenario.periods), 10.0) *
                         cfg.coefficients.period();
  std::vector<double> times;
  for (double t = 0.0; t <= horizon + 1e-12; t += 0.25 * cfg.coefficients.period()) {
    times.push_back(t);
  }
  const auto rep = supersolution_residual(spec, cfg.grid, cfg.dispersal, times, cfg.scheme.dt);
  const auto cmp = supersolution_front_check(spec, cfg.coefficients, cfg.grid, cfg.dispersal,
                                             cfg.scheme, cfg.scenario.periods, cfg.scenario.x0);
  const bool pass = res.phi < 1e-8 && res.psi < 1e-8 && ineq.holds && rep.pass &&
                    cmp.max_excess_u <= 0.0 && cmp.max_excess_v <= 0.0;
  Emitter em(cfg, "verify-super");
  std::vector<std::vector<double>> rows;
  const auto& phi = spec.ansatz.phi;
  for (std::size_t k = 0; k <= phi.intervals(); ++k) {
    const double t = phi.time(k);
    rows.push_back({t, phi.values()[k], spec.ansatz.psi(t)});
  }
  em.csv("ansatz", {"t", "phi", "psi"}, rows);
  json report = {{"eps", eps},
                 {"mu", spec.mu()},
                 {"c", spec.c},
                 {"K", spec.K},
                 {"M", spec.M},
                 {"k", spec.k},
                 {"ansatz_residual", {{"phi", res.phi}, {"psi", res.psi}}},
                 {"inequalities", verdict_json(ineq)},
                 {"residual", {{"min_u", rep.min_u}, {"min_v", rep.min_v},
                               {"min_margin", rep.min_margin}, {"points", rep.points},
                               {"pass", rep.pass}}},
                 {"front_check", {{"K", cmp.K}, {"max_excess_u", cmp.max_excess_u},
                                  {"max_excess_v", cmp.max_excess_v}, {"checks", cmp.checks}}},
                 {"pass", pass}};
  return finish(em, std::move(report),
                fmt::format("{}: ansatz residual {:.1e}/{:.1e}, residual margin {:.2e}, front "
                            "excess {:.2e}/{:.2e}",
                            pass ? "PASS" : "FAIL", res.phi, res.psi, rep.min_margin,
                            cmp.max_excess_u, cmp.max_excess_v));
}

CommandResult run_sweep(const RunConfig& cfg, const RunOptions& opts) {
  const Scenario& s = cfg.scenario;
  const auto table = continuity_sweep(cfg.coefficients, s.target, s.eps, cfg.dispersal,
                                      dispersion_options(opts));
  Emitter em(cfg, "sweep");
  std::vector<std::vector<double>> rows;
  json jrows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back({r.eps, r.c0, r.diff});
    jrows.push_back({{"eps", r.eps}, {"c0", r.c0}, {"diff", r.diff}});
  }
  em.csv("continuity", {"eps", "c0", "diff"}, rows);
  json report = {{"target", coef_name(s.target)},
                 {"c0_base", table.c0_base},
                 {"monotone", table.monotone},
                 {"rows", jrows}};
  std::string summary;
  for (const auto& r : table.rows) {
    summary += fmt::format("eps = {}: c0* = {:.6f} (diff {:+.6f})\n", r.eps, r.c0, r.diff);
  }
  summary += fmt::format("monotone: {}", table.monotone ? "yes" : "no");

  if (s.fronts) {
    const auto intervals = parallel_map<SpeedInterval>(
        s.eps.size(), opts.workers, [&](std::size_t i) {
          const auto& f = cfg.coefficients[s.target];
          const auto shifted =
              cfg.coefficients.with_field(s.target, f.with_baseline(f.baseline().shifted(s.eps[i])));
          return speed_interval(shifted, cfg.dispersal, cfg.grid, cfg.scheme, front_options(s));
        });
    std::vector<std::vector<double>> frows;
    json fj = json::array();
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      const auto& r = intervals[i];
      frows.push_back({s.eps[i], r.lower.c, r.upper.c, r.theoretical.c});
      fj.push_back({{"eps", s.eps[i]}, {"lower", r.lower.c}, {"upper", r.upper.c},
                    {"theoretical", r.theoretical.c}});
      summary += fmt::format("\neps = {}: fronts lower {:.5f}, upper {:.5f}", s.eps[i], r.lower.c,
                             r.upper.c);
    }
    em.csv("fronts", {"eps", "lower", "upper", "theoretical"}, frows);
    report["fronts"] = fj;
  }
  return finish(em, std::move(report), std::move(summary));
}

}  // namespace

std::vector<std::string> command_names() {
  return {"speed", "simulate", "spectrum", "persistence", "coexist", "destabilize",
          "verify-super", "sweep"};
}

json apply_overrides(json config, std::optional<std::size_t> periods,
                     const std::optional<std::string>& out_dir) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (periods) config["scenario"]["periods"] = *periods;
  if (out_dir) config["output"]["directory"] = *out_dir;
  return config;
}

CommandResult run_command(const std::string& command, const RunConfig& config,
                          const RunOptions& opts) {
  using Fn = CommandResult (*)(const RunConfig&, const RunOptions&);
  static const std::pair<const char*, Fn> table[] = {
      {"speed", run_speed},         {"simulate", run_simulate},
      {"spectrum", run_spectrum},   {"persistence", run_persistence},
      {"coexist", run_coexist},     {"destabilize", run_destabilize},
      {"verify-super", run_verify_super}, {"sweep", run_sweep}};
  for (const auto& [name, fn] : table) {
    if (command == name) return fn(config, opts);
  }
  throw ConfigError(fmt::format("unknown command '{}'", command));
}

}  // namespace compete::cli
