#include "compete/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "compete/errors.hpp"

namespace compete {

GrowthRate GrowthRate::separable(const CoefficientField& field, const Grid& grid) {
  GrowthRate g;
  g.period_ = field.period();
  g.size_ = grid.size();
  g.baseline_ = field.baseline();
  if (field.has_bump()) {
    g.bump_.resize(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      g.bump_[j] = field.bump_cell(grid.x(j), grid.h());
    }
  }
  return g;
}

GrowthRate GrowthRate::tabulated(const PeriodicField& samples) {
  GrowthRate g;
  g.period_ = samples.period();
  g.size_ = samples.grid().size();
  g.table_ = samples;
  return g;
}

bool GrowthRate::spatially_uniform() const {
  if (baseline_) {
    return std::all_of(bump_.begin(), bump_.end(),
                       [](double b) { return b == 0.0; });
  }
  for (std::size_t k = 0; k < table_->steps_per_period(); ++k) {
    const auto& f = table_->at_step(k);
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    if (*hi - *lo > 1e-14 * std::max(1.0, std::abs(*hi))) return false;
  }
  return true;
}

void GrowthRate::exponent(double t0, double t1, std::span<double> out) const {
  const double span_t = t1 - t0;
  if (baseline_) {
    const double base = baseline_->integral(t0, t1) + offset_ * span_t;
    if (bump_.empty()) {
      std::fill(out.begin(), out.end(), base);
    } else {
      for (std::size_t j = 0; j < size_; ++j) out[j] = base + bump_[j] * span_t;
    }
    return;
  }
  std::fill(out.begin(), out.end(), offset_ * span_t);
  const std::size_t N = table_->steps_per_period();
  const double dt = period_ / static_cast<double>(N);
  double s0 = t0;
  while (s0 < t1) {
    // Locate the sample interval containing s0 (robust to rounding).
    const double q = s0 / dt;
    auto k = static_cast<long long>(std::floor(q + 1e-9));
    const double interval_end = static_cast<double>(k + 1) * dt;
    const double s1 = std::min(t1, interval_end);
    if (s1 <= s0) break;
    const auto kk = static_cast<std::size_t>(((k % static_cast<long long>(N)) +
                                              static_cast<long long>(N)) %
                                             static_cast<long long>(N));
    const auto& fa = table_->at_step(kk);
    const auto& fb = table_->at_step(kk + 1);
    const double left = static_cast<double>(k) * dt;
    const double wa0 = (s0 - left) / dt;
    const double wa1 = (s1 - left) / dt;
    const double len = s1 - s0;
    // Linear interpolant a = fa + w (fb - fa); integral over [w0, w1].
    const double wmid = 0.5 * (wa0 + wa1);
    for (std::size_t j = 0; j < size_; ++j) {
      out[j] += len * (fa[j] + wmid * (fb[j] - fa[j]));
    }
    s0 = s1;
  }
}

double GrowthRate::value(double t, std::size_t j) const {
  if (baseline_) {
    return (*baseline_)(t) + (bump_.empty() ? 0.0 : bump_[j]) + offset_;
  }
  return table_->value(t, j) + offset_;
}

GrowthRate GrowthRate::shifted(double offset) const {
  GrowthRate g = *this;
  g.offset_ += offset;
  return g;
}

// ---------------------------------------------------------------------------

LinearProblem LinearProblem::make(double mu, GrowthRate rate, Grid grid,
                                  Dispersal dispersal, SchemeConfig scheme) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw PreconditionError(fmt::format("tilt mu must be >= 0, got {}", mu));
  }
  if (rate.size() != grid.size()) {
    throw ConfigError("growth rate is not bound to the problem grid");
  }
  if (mu > 0.0 && !rate.spatially_uniform()) {
    throw PreconditionError(
        "the tilted operator is only used with x-independent coefficients; "
        "mu > 0 with a spatially varying coefficient is rejected");
  }
  scheme.validate(grid, dispersal, rate.period());
  return LinearProblem{mu, std::move(rate), std::move(grid), std::move(dispersal),
                       scheme};
}

namespace {

double random_tilt(const LinearProblem& p) {
  return p.dispersal.is_random() ? p.mu * p.mu : 0.0;
}

void require_finite(std::span<const double> u, double t) {
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (!std::isfinite(u[j])) {
      throw NumericalGuard(
          fmt::format("linear evolution became nonfinite at t = {}, j = {}", t, j));
    }
  }
}

/// One period of the Strang-split linear evolution with cached growth factors.
class PeriodMap {
 public:
  explicit PeriodMap(const LinearProblem& p)
      : stepper_(p.grid, p.dispersal, p.scheme.dt, p.scheme.mode, p.mu) {
    const double T = p.rate.period();
    const std::size_t N = p.scheme.steps_per_period(T);
    const double dt = T / static_cast<double>(N);
    const double tilt = random_tilt(p);
    const std::size_t n = p.grid.size();
    uniform_ = p.rate.spatially_uniform();
    const std::size_t width = uniform_ ? 1 : n;
    first_.assign(N, std::vector<double>(width));
    second_.assign(N, std::vector<double>(width));
    std::vector<double> buf(n);
    for (std::size_t k = 0; k < N; ++k) {
      const double t = static_cast<double>(k) * dt;
      p.rate.exponent(t, t + 0.5 * dt, buf);
      for (std::size_t j = 0; j < width; ++j) {
        first_[k][j] = std::exp(buf[j] + 0.5 * dt * tilt);
      }
      p.rate.exponent(t + 0.5 * dt, t + dt, buf);
      for (std::size_t j = 0; j < width; ++j) {
        second_[k][j] = std::exp(buf[j] + 0.5 * dt * tilt);
      }
    }
  }

  void apply(std::span<double> u) {
    for (std::size_t k = 0; k < first_.size(); ++k) {
      scale(u, first_[k]);
      stepper_.advance(u);
      scale(u, second_[k]);
    }
  }

 private:
  void scale(std::span<double> u, const std::vector<double>& g) const {
    if (uniform_) {
      const double f = g[0];
      for (double& x : u) x *= f;
    } else {
      for (std::size_t j = 0; j < u.size(); ++j) u[j] *= g[j];
    }
  }

  DispersalStepper stepper_;
  bool uniform_ = true;
  std::vector<std::vector<double>> first_;
  std::vector<std::vector<double>> second_;
};

double sup_abs(std::span<const double> u) {
  double m = 0.0;
  for (double x : u) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

Field evolve_linear(std::span<const double> u0, const LinearProblem& p,
                    double t0, double t1) {
  if (t1 < t0) {
    throw ConfigError("evolve_linear needs t1 >= t0");
  }
  if (u0.size() != p.grid.size()) {
    throw ConfigError("initial field does not match the grid");
  }
  Field u(u0.begin(), u0.end());
  const double dt = p.scheme.dt;
  const double tilt = random_tilt(p);
  const double span_t = t1 - t0;
  const auto full = static_cast<std::size_t>(std::floor(span_t / dt + 1e-9));
  const double rest = span_t - static_cast<double>(full) * dt;
  std::vector<double> ex(p.grid.size());
  auto substep = [&](DispersalStepper& stepper, double t, double h) {
    p.rate.exponent(t, t + 0.5 * h, ex);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] *= std::exp(ex[j] + 0.5 * h * tilt);
    stepper.advance(u);
    p.rate.exponent(t + 0.5 * h, t + h, ex);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] *= std::exp(ex[j] + 0.5 * h * tilt);
  };
  if (full > 0) {
    DispersalStepper stepper(p.grid, p.dispersal, dt, p.scheme.mode, p.mu);
    for (std::size_t s = 0; s < full; ++s) {
      substep(stepper, t0 + static_cast<double>(s) * dt, dt);
    }
  }
  if (rest > 1e-12 * std::max(1.0, dt)) {
    DispersalStepper stepper(p.grid, p.dispersal, rest, p.scheme.mode, p.mu);
    substep(stepper, t0 + static_cast<double>(full) * dt, rest);
  }
  require_finite(u, t1);
  return u;
}

double SpectrumResult::radius(double period) const {
  return std::exp(lambda * period);
}

SpectrumResult principal_spectrum_point(const LinearProblem& p,
                                        const SpectrumOptions& opts) {
  if (!(opts.tol > 0.0)) {
    throw ConfigError("spectrum tolerance must be positive");
  }
  const double T = p.rate.period();
  PeriodMap map(p);
  Field u(p.grid.size(), 1.0);
  SpectrumResult res;
  std::size_t stable = 0;
  for (std::size_t it = 1; it <= opts.max_periods; ++it) {
    map.apply(u);
    const double r = sup_abs(u);
    if (!std::isfinite(r) || !(r > 0.0)) {
      throw NumericalGuard(
          fmt::format("period map produced a degenerate iterate (ratio {})", r));
    }
    for (double& x : u) x /= r;
    res.ratios.push_back(r);
    // Small spectral gaps make successive ratios creep: the stop uses the
    // geometric tail d q / (1 - q) rather than the bare difference d.
    double tail = 0.0;
    if (res.ratios.size() >= 2) {
      const double prev = res.ratios[res.ratios.size() - 2];
      const double d = r - prev;
      res.residual = std::abs(d);
      double err = res.residual;
      if (res.ratios.size() >= 3) {
        const double d_prev = prev - res.ratios[res.ratios.size() - 3];
        const double q = d_prev != 0.0 ? d / d_prev : 0.0;
        if (q > 0.0 && q < 1.0 && res.residual > 1e-13 * r) {
          tail = d * q / (1.0 - q);
          err = std::max(err, std::abs(tail));
        }
      }
      stable = (err / prev < opts.tol) ? stable + 1 : 0;
    }
    if (stable >= opts.stable_periods) {
      res.lambda = std::log(r + tail) / T;
      res.iterations = it;
      res.profile = std::move(u);
      return res;
    }
  }
  std::string tail;
  const std::size_t show = std::min<std::size_t>(res.ratios.size(), 5);
  for (std::size_t i = res.ratios.size() - show; i < res.ratios.size(); ++i) {
    tail += fmt::format(" {:.12g}", res.ratios[i]);
  }
  throw ConvergenceError(fmt::format(
      "principal spectrum point: ratios not stable to {} after {} periods; last "
      "ratios:{}",
      opts.tol, opts.max_periods, tail));
}

double domain_sensitivity(const CoefficientField& coefficient,
                          const LinearProblem& base,
                          const SpectrumOptions& opts) {
  const Grid& g = base.grid;
  const double center = 0.5 * (g.x_min() + g.x_max());
  const auto wide_intervals =
      static_cast<std::size_t>(std::llround(1.5 * static_cast<double>(g.size() - 1)));
  const double half = 0.5 * static_cast<double>(wide_intervals) * g.h();
  Grid wide(center - half, center + half, wide_intervals + 1);
  Dispersal d = base.dispersal;
  if (!d.is_random()) {
    d.kernel = Kernel(d.kernel->shape(), d.kernel->radius(), wide.h());
  }
  const auto lam_base = principal_spectrum_point(base, opts).lambda;
  const auto wide_problem = LinearProblem::make(
      base.mu, GrowthRate::separable(coefficient, wide), wide, d, base.scheme);
  const auto lam_wide = principal_spectrum_point(wide_problem, opts).lambda;
  return std::abs(lam_wide - lam_base);
}

double lambda_homogeneous(double mu, double mean_growth,
                          const Dispersal& dispersal) {
  return tilt_rate(dispersal, mu) + mean_growth;
}

MonotonicityVerdict spectrum_monotonicity_check(const LinearProblem& low,
                                                const LinearProblem& high,
                                                double tol,
                                                const SpectrumOptions& opts) {
  if (low.grid.size() != high.grid.size() || low.mu != high.mu ||
      low.dispersal.kind != high.dispersal.kind) {
    throw ConfigError("monotonicity check needs problems sharing mu, grid and kind");
  }
  const double T = low.rate.period();
  const std::size_t N = low.scheme.steps_per_period(T);
  for (std::size_t k = 0; k < N; ++k) {
    const double t = T * static_cast<double>(k) / static_cast<double>(N);
    for (std::size_t j = 0; j < low.grid.size(); ++j) {
      if (low.rate.value(t, j) > high.rate.value(t, j)) {
        throw PreconditionError(fmt::format(
            "monotonicity check: a_low > a_high at t = {}, x = {}", t,
            low.grid.x(j)));
      }
    }
  }
  MonotonicityVerdict v;
  v.lambda_low = principal_spectrum_point(low, opts).lambda;
  v.lambda_high = principal_spectrum_point(high, opts).lambda;
  v.holds = v.lambda_low <= v.lambda_high + tol;
  return v;
}

}  // namespace compete
