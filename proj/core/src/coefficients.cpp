#include "compete/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "compete/errors.hpp"

namespace compete {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_period(double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ConfigError(fmt::format("period must be positive, got {}", period));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// PeriodicScalar

PeriodicScalar PeriodicScalar::constant(double period, double value) {
  require_period(period);
  return PeriodicScalar(period, Constant{value});
}

PeriodicScalar PeriodicScalar::harmonic(double period, double mean,
                                        double amplitude, double phase) {
  return trig(period, mean, {Harmonic{1, amplitude, phase}});
}

PeriodicScalar PeriodicScalar::trig(double period, double mean,
                                    std::vector<Harmonic> harmonics) {
  require_period(period);
  for (const auto& h : harmonics) {
    if (h.order < 1) {
      throw ConfigError("harmonic order must be >= 1");
    }
  }
  std::erase_if(harmonics, [](const Harmonic& h) { return h.amplitude == 0.0; });
  if (harmonics.empty()) {
    return PeriodicScalar(period, Constant{mean});
  }
  return PeriodicScalar(period, Trig{mean, std::move(harmonics)});
}

PeriodicScalar PeriodicScalar::table(
    double period, std::vector<std::pair<double, double>> knots) {
  require_period(period);
  if (knots.size() < 2) {
    throw ConfigError("periodic table needs at least two knots");
  }
  const double scale_t = period;
  if (std::abs(knots.front().first) > 1e-12 * scale_t ||
      std::abs(knots.back().first - period) > 1e-12 * scale_t) {
    throw ConfigError("periodic table must start at t = 0 and end at t = T");
  }
  Table table;
  table.times.reserve(knots.size());
  table.values.reserve(knots.size());
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (i > 0 && !(knots[i].first > knots[i - 1].first)) {
      throw ConfigError("periodic table times must be strictly increasing");
    }
    if (!std::isfinite(knots[i].second)) {
      throw ConfigError("periodic table values must be finite");
    }
    table.times.push_back(knots[i].first);
    table.values.push_back(knots[i].second);
  }
  table.times.front() = 0.0;
  table.times.back() = period;
  const double vscale = std::max(1.0, std::abs(table.values.front()));
  if (std::abs(table.values.front() - table.values.back()) > 1e-12 * vscale) {
    throw ConfigError("periodic table endpoint values must match");
  }
  table.values.back() = table.values.front();
  return PeriodicScalar(period, std::move(table));
}

PeriodicScalar PeriodicScalar::tabulate(
    double period, std::size_t n, const std::function<double(double)>& fn) {
  require_period(period);
  if (n < 2) {
    throw ConfigError("tabulate needs at least two samples per period");
  }
  std::vector<std::pair<double, double>> knots;
  knots.reserve(n + 1);
  bool all_equal = true;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = period * static_cast<double>(k) / static_cast<double>(n);
    knots.emplace_back(t, fn(t));
    all_equal = all_equal && knots[k].second == knots[0].second;
  }
  if (all_equal) {
    return constant(period, knots[0].second);
  }
  knots.emplace_back(period, knots[0].second);
  return table(period, std::move(knots));
}

double PeriodicScalar::operator()(double t) const {
  if (const auto* c = std::get_if<Constant>(&desc_)) {
    return c->value;
  }
  if (const auto* g = std::get_if<Trig>(&desc_)) {
    double v = g->mean;
    const double w = kTwoPi / period_;
    for (const auto& h : g->harmonics) {
      v += h.amplitude * std::sin(w * h.order * t + h.phase);
    }
    return v;
  }
  const auto& tb = std::get<Table>(desc_);
  double tau = t - std::floor(t / period_) * period_;
  if (tau >= period_) tau = 0.0;
  const auto it = std::upper_bound(tb.times.begin(), tb.times.end(), tau);
  const auto i = static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(it - tb.times.begin(), 1,
                                 static_cast<std::ptrdiff_t>(tb.times.size()) - 1));
  const double t0 = tb.times[i - 1];
  const double t1 = tb.times[i];
  const double s = (tau - t0) / (t1 - t0);
  return tb.values[i - 1] + s * (tb.values[i] - tb.values[i - 1]);
}

double PeriodicScalar::table_antiderivative(double tau) const {
  const auto& tb = std::get<Table>(desc_);
  double acc = 0.0;
  for (std::size_t i = 1; i < tb.times.size(); ++i) {
    const double t0 = tb.times[i - 1];
    const double t1 = tb.times[i];
    if (tau >= t1) {
      acc += 0.5 * (tb.values[i - 1] + tb.values[i]) * (t1 - t0);
      continue;
    }
    if (tau > t0) {
      const double slope = (tb.values[i] - tb.values[i - 1]) / (t1 - t0);
      const double d = tau - t0;
      acc += tb.values[i - 1] * d + 0.5 * slope * d * d;
    }
    break;
  }
  return acc;
}

double PeriodicScalar::mean() const {
  if (const auto* c = std::get_if<Constant>(&desc_)) return c->value;
  if (const auto* g = std::get_if<Trig>(&desc_)) return g->mean;
  return table_antiderivative(period_) / period_;
}

double PeriodicScalar::integral(double t0, double t1) const {
  if (const auto* c = std::get_if<Constant>(&desc_)) {
    return c->value * (t1 - t0);
  }
  if (const auto* g = std::get_if<Trig>(&desc_)) {
    double v = g->mean * (t1 - t0);
    const double w = kTwoPi / period_;
    for (const auto& h : g->harmonics) {
      const double wk = w * h.order;
      v -= h.amplitude / wk *
           (std::cos(wk * t1 + h.phase) - std::cos(wk * t0 + h.phase));
    }
    return v;
  }
  const double total = table_antiderivative(period_);
  auto F = [&](double t) {
    const double k = std::floor(t / period_);
    return k * total + table_antiderivative(t - k * period_);
  };
  return F(t1) - F(t0);
}

std::optional<std::pair<double, double>> PeriodicScalar::exact_extrema() const {
  if (const auto* c = std::get_if<Constant>(&desc_)) {
    return std::pair{c->value, c->value};
  }
  if (const auto* g = std::get_if<Trig>(&desc_)) {
    if (g->harmonics.size() == 1) {
      const double a = std::abs(g->harmonics[0].amplitude);
      return std::pair{g->mean - a, g->mean + a};
    }
    return std::nullopt;
  }
  const auto& tb = std::get<Table>(desc_);
  const auto [lo, hi] = std::minmax_element(tb.values.begin(), tb.values.end());
  return std::pair{*lo, *hi};
}

std::pair<double, double> PeriodicScalar::extrema(
    std::size_t samples_per_period) const {
  if (auto exact = exact_extrema()) {
    return *exact;
  }
  double lo = (*this)(0.0);
  double hi = lo;
  for (std::size_t k = 1; k < samples_per_period; ++k) {
    const double v = (*this)(period_ * static_cast<double>(k) /
                             static_cast<double>(samples_per_period));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

bool PeriodicScalar::is_constant() const {
  return std::holds_alternative<Constant>(desc_);
}

PeriodicScalar PeriodicScalar::shifted(double offset) const {
  return std::visit(
      [&](const auto& d) -> PeriodicScalar {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Constant>) {
          return PeriodicScalar(period_, Constant{d.value + offset});
        } else if constexpr (std::is_same_v<D, Trig>) {
          return PeriodicScalar(period_, Trig{d.mean + offset, d.harmonics});
        } else {
          Table t = d;
          for (auto& v : t.values) v += offset;
          return PeriodicScalar(period_, std::move(t));
        }
      },
      desc_);
}

PeriodicScalar PeriodicScalar::scaled(double factor) const {
  return std::visit(
      [&](const auto& d) -> PeriodicScalar {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Constant>) {
          return PeriodicScalar(period_, Constant{d.value * factor});
        } else if constexpr (std::is_same_v<D, Trig>) {
          Trig t = d;
          t.mean *= factor;
          for (auto& h : t.harmonics) h.amplitude *= factor;
          return PeriodicScalar(period_, std::move(t));
        } else {
          Table t = d;
          for (auto& v : t.values) v *= factor;
          return PeriodicScalar(period_, std::move(t));
        }
      },
      desc_);
}

// ---------------------------------------------------------------------------
// SpatialBump / CoefficientField

SpatialBump::SpatialBump(double amplitude, double plateau, double ramp,
                         std::optional<double> support)
    : amplitude_(amplitude), plateau_(plateau), ramp_(ramp) {
  if (!std::isfinite(amplitude) || !(plateau >= 0.0) || !(ramp >= 0.0)) {
    throw ConfigError("bump needs finite amplitude and nonnegative plateau/ramp");
  }
  const double natural = plateau + ramp;
  support_ = support.value_or(natural);
  if (!(support_ > 0.0) || support_ < natural) {
    throw ConfigError(fmt::format(
        "bump support M0 = {} must be positive and >= plateau + ramp = {}",
        support_, natural));
  }
}

SpatialBump SpatialBump::with_width(double amplitude, double width,
                                    double ramp) {
  return SpatialBump(amplitude, 0.5 * width, ramp);
}

double SpatialBump::operator()(double x) const {
  const double r = std::abs(x);
  if (r >= support_) return 0.0;
  if (r <= plateau_) return amplitude_;
  const double edge = plateau_ + ramp_;
  if (r >= edge) return 0.0;
  return amplitude_ * (edge - r) / ramp_;
}

double SpatialBump::cell_average(double x, double h) const {
  if (!(h > 0.0)) return (*this)(x);
  const double edge = plateau_ + ramp_;
  // Integral of the profile over [0, r], r >= 0.
  const auto half = [&](double r) {
    if (r <= plateau_) return amplitude_ * r;
    const double s = std::min(r, edge);
    const double d = s - plateau_;
    return ramp_ > 0.0 ? amplitude_ * (plateau_ + d - 0.5 * d * d / ramp_)
                       : amplitude_ * plateau_;
  };
  const auto prim = [&](double y) { return y < 0.0 ? -half(-y) : half(y); };
  return (prim(x + 0.5 * h) - prim(x - 0.5 * h)) / h;
}

double CoefficientField::operator()(double t, double x) const {
  return baseline_(t) + bump_value(x);
}

double CoefficientField::integral(double t0, double t1, double x) const {
  return baseline_.integral(t0, t1) + bump_value(x) * (t1 - t0);
}

std::pair<double, double> CoefficientField::bounds(
    std::size_t samples_per_period) const {
  auto [lo, hi] = baseline_.extrema(samples_per_period);
  if (bump_) {
    lo += std::min(0.0, bump_->amplitude());
    hi += std::max(0.0, bump_->amplitude());
  }
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// CoefficientSet

const char* coef_name(Coef c) {
  static constexpr std::array<const char*, 6> names = {"a1", "b1", "c1",
                                                       "a2", "b2", "c2"};
  return names[static_cast<int>(c)];
}

std::optional<Coef> coef_from_name(const std::string& name) {
  for (Coef c : kAllCoefs) {
    if (name == coef_name(c)) return c;
  }
  return std::nullopt;
}

CoefficientSet::CoefficientSet(CoefficientField a1, CoefficientField b1,
                               CoefficientField c1, CoefficientField a2,
                               CoefficientField b2, CoefficientField c2)
    : fields_{std::move(a1), std::move(b1), std::move(c1),
              std::move(a2), std::move(b2), std::move(c2)} {
  const double T = fields_[0].period();
  for (Coef c : kAllCoefs) {
    const double Tc = (*this)[c].period();
    if (std::abs(Tc - T) > 1e-12 * T) {
      throw ConfigError(fmt::format("coefficient {} has period {} but a1 has {}",
                                    coef_name(c), Tc, T));
    }
  }
  for (Coef c : {Coef::b1, Coef::c1, Coef::b2, Coef::c2}) {
    const auto [lo, hi] = (*this)[c].bounds();
    if (!(lo > 0.0)) {
      throw ConfigError(fmt::format(
          "coefficient {} must be strictly positive everywhere (inf = {})",
          coef_name(c), lo));
    }
  }
}

CoefficientSet CoefficientSet::constants(const std::array<double, 6>& v,
                                         double period) {
  auto f = [&](int i) {
    return CoefficientField(PeriodicScalar::constant(period, v[i]));
  };
  return CoefficientSet(f(0), f(1), f(2), f(3), f(4), f(5));
}

bool CoefficientSet::has_bumps() const {
  return std::any_of(fields_.begin(), fields_.end(),
                     [](const auto& f) { return f.has_bump(); });
}

double CoefficientSet::bump_support() const {
  double m = 0.0;
  for (const auto& f : fields_) {
    if (f.bump()) m = std::max(m, f.bump()->support());
  }
  return m;
}

CoefficientSet CoefficientSet::baselines() const {
  auto f = [&](int i) { return fields_[i].with_bump(std::nullopt); };
  return CoefficientSet(f(0), f(1), f(2), f(3), f(4), f(5));
}

CoefficientSet CoefficientSet::with_field(Coef c, CoefficientField field) const {
  auto fields = fields_;
  fields[static_cast<int>(c)] = std::move(field);
  return CoefficientSet(fields[0], fields[1], fields[2], fields[3], fields[4],
                        fields[5]);
}

// ---------------------------------------------------------------------------
// Envelopes and hypotheses

EnvelopeTable compute_envelopes(const CoefficientSet& set,
                                std::size_t samples_per_period) {
  if (samples_per_period < 16) {
    throw ConfigError("compute_envelopes needs at least 16 samples per period");
  }
  EnvelopeTable env;
  for (Coef c : kAllCoefs) {
    const auto [lo, hi] = set[c].baseline().extrema(samples_per_period);
    env.low[static_cast<int>(c)] = lo;
    env.high[static_cast<int>(c)] = hi;
  }
  return env;
}

HypothesisVerdict check_H0(const EnvelopeTable& env) {
  HypothesisVerdict v;
  v.holds = true;
  for (Coef c : kAllCoefs) {
    const double m = env.L(c);
    v.margins.push_back(m);
    if (!(m > 0.0)) {
      v.holds = false;
      if (!v.detail.empty()) v.detail += "; ";
      v.detail += fmt::format("{}L = {} is not > 0", coef_name(c), m);
    }
  }
  return v;
}

namespace {

void require_H0(const EnvelopeTable& env, const char* who) {
  const auto h0 = check_H0(env);
  if (!h0.holds) {
    throw PreconditionError(fmt::format("{} requires H0: {}", who, h0.detail));
  }
}

}  // namespace

HypothesisVerdict check_H1(const EnvelopeTable& env) {
  require_H0(env, "check_H1");
  using enum Coef;
  HypothesisVerdict v;
  const double s1 = env.L(a1) - env.M(c1) * env.M(a2) / env.L(c2);
  const double s2 = env.L(a1) * env.L(b2) / env.M(b1) - env.M(a2);
  v.margins = {s1, s2};
  v.holds = s1 > 0.0 && s2 > 0.0;
  if (!(s1 > 0.0)) {
    v.detail = fmt::format("a1L > c1M*a2M/c2L violated ({} <= {})", env.L(a1),
                           env.M(c1) * env.M(a2) / env.L(c2));
  }
  if (!(s2 > 0.0)) {
    if (!v.detail.empty()) v.detail += "; ";
    v.detail += fmt::format("a2M < a1L*b2L/b1M violated ({} >= {})", env.M(a2),
                            env.L(a1) * env.L(b2) / env.M(b1));
  }
  return v;
}

HypothesisVerdict check_H2(const CoefficientSet& set, const EnvelopeTable& env,
                           std::size_t samples_per_period) {
  require_H0(env, "check_H2");
  using enum Coef;
  const double ratio = env.M(a2) / env.L(c2);
  const double lower_ratio = env.L(a2) / env.M(c2);
  const double p1 = ratio * env.M(c1) / env.L(b1);
  const double p2 = ratio * env.M(c2) / env.L(b2);
  const double T = set.period();
  double m1 = INFINITY;
  double m2 = INFINITY;
  double t1_worst = 0.0;
  double t2_worst = 0.0;
  for (std::size_t k = 0; k < samples_per_period; ++k) {
    const double t =
        T * static_cast<double>(k) / static_cast<double>(samples_per_period);
    const auto& bl = [&](Coef c) { return set[c].baseline()(t); };
    const double common =
        bl(a1) - bl(c1) * ratio - bl(a2) + 2.0 * bl(c2) * lower_ratio;
    const double e1 = common - bl(b2) * p1;
    const double e2 = common - bl(b2) * p2;
    if (e1 < m1) {
      m1 = e1;
      t1_worst = t;
    }
    if (e2 < m2) {
      m2 = e2;
      t2_worst = t;
    }
  }
  HypothesisVerdict v;
  v.margins = {m1, m2};
  v.holds = m1 > 0.0 && m2 > 0.0;
  if (!(m1 > 0.0)) {
    v.detail = fmt::format("first H2 expression is {} at t = {}", m1, t1_worst);
  }
  if (!(m2 > 0.0)) {
    if (!v.detail.empty()) v.detail += "; ";
    v.detail += fmt::format("second H2 expression is {} at t = {}", m2, t2_worst);
  }
  return v;
}

HypothesisVerdict check_H2_constant(const std::array<double, 6>& c) {
  const auto [a1, b1, c1, a2, b2, c2] = c;
  const double e1 = a1 + a2 - a2 * c1 / c2 - a2 * b2 * c1 / (b1 * c2);
  const double e2 = a1 - a2 * c1 / c2;
  HypothesisVerdict v;
  v.margins = {e1, e2};
  v.holds = e1 > 0.0 && e2 > 0.0;
  return v;
}

HypothesisVerdict check_coexistence(const EnvelopeTable& env) {
  require_H0(env, "check_coexistence");
  using enum Coef;
  HypothesisVerdict v;
  const double s1 = env.L(a1) - env.M(c1) * env.M(a2) / env.L(c2);
  const double s2 = env.L(a2) - env.M(b2) * env.M(a1) / env.L(b1);
  v.margins = {s1, s2};
  v.holds = s1 > 0.0 && s2 > 0.0;
  if (!(s1 > 0.0)) v.detail = "a1L > c1M*a2M/c2L violated";
  if (!(s2 > 0.0)) {
    if (!v.detail.empty()) v.detail += "; ";
    v.detail += "a2L > b2M*a1M/b1L violated";
  }
  return v;
}

LvDeterminacy check_lv_determinacy(double r1, double r2, double a1_tilde,
                                   double a2_tilde, double period) {
  if (!(r1 > 0.0) || !(r2 > 0.0) || !(a1_tilde > 0.0)) {
    throw PreconditionError("r1, r2 and a1~ must be positive");
  }
  if (!(a1_tilde < 1.0 && 1.0 <= a2_tilde)) {
    throw PreconditionError(fmt::format(
        "linear determinacy form needs a1~ < 1 <= a2~ (got {}, {})", a1_tilde,
        a2_tilde));
  }
  const double lhs = (a1_tilde * a2_tilde - 1.0) / (1.0 - a1_tilde);
  const double rhs = r1 / r2;
  HypothesisVerdict verdict;
  verdict.margins = {rhs - lhs};
  verdict.holds = lhs <= rhs;
  if (!verdict.holds) {
    verdict.detail = fmt::format("(a1~ a2~ - 1)/(1 - a1~) = {} > r1/r2 = {}",
                                 lhs, rhs);
  }
  auto set = CoefficientSet::constants(
      {r1, r1, a1_tilde * r1, r2, r2 * a2_tilde, r2}, period);
  auto h2 = check_H2(set, compute_envelopes(set));
  return LvDeterminacy{std::move(verdict), std::move(set), std::move(h2)};
}

}  // namespace compete
