#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace compete {

/// One sinusoidal component amplitude * sin(2*pi*order*t/T + phase).
struct Harmonic {
  int order = 1;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// A continuous T-periodic function of time described in closed form.
///
/// Three descriptors are supported: a constant, a trigonometric polynomial
/// (mean plus harmonics) and a piecewise-linear table over one period whose
/// first knot sits at t = 0 and last knot at t = T with a matching value.
/// Evaluation, means and integrals are exact for every descriptor.
class PeriodicScalar {
 public:
  struct Constant {
    double value;
  };
  struct Trig {
    double mean;
    std::vector<Harmonic> harmonics;
  };
  struct Table {
    std::vector<double> times;
    std::vector<double> values;
  };

  static PeriodicScalar constant(double period, double value);
  /// mean + amplitude * sin(2*pi*t/T + phase)
  static PeriodicScalar harmonic(double period, double mean, double amplitude,
                                 double phase = 0.0);
  static PeriodicScalar trig(double period, double mean,
                             std::vector<Harmonic> harmonics);
  static PeriodicScalar table(double period,
                              std::vector<std::pair<double, double>> knots);
  /// Piecewise-linear interpolant of fn at n uniform samples per period.
  /// Collapses to a constant when every sample is identical.
  static PeriodicScalar tabulate(double period, std::size_t n,
                                 const std::function<double(double)>& fn);

  double period() const { return period_; }
  double operator()(double t) const;
  double mean() const;
  /// Exact integral over [t0, t1] (any t0 <= t1, across periods).
  double integral(double t0, double t1) const;

  /// Extrema that are known exactly from the descriptor, if any.
  std::optional<std::pair<double, double>> exact_extrema() const;
  std::pair<double, double> extrema(std::size_t samples_per_period) const;

  bool is_constant() const;
  PeriodicScalar shifted(double offset) const;
  PeriodicScalar scaled(double factor) const;

  const std::variant<Constant, Trig, Table>& descriptor() const { return desc_; }

 private:
  PeriodicScalar(double period, std::variant<Constant, Trig, Table> desc)
      : period_(period), desc_(std::move(desc)) {}

  double table_antiderivative(double t) const;

  double period_;
  std::variant<Constant, Trig, Table> desc_;
};

/// Trapezoidal plateau centered at x = 0, exactly zero for |x| >= M0.
///
/// The plateau has height `amplitude` on |x| <= plateau and falls linearly to
/// zero over `ramp`. ramp == 0 gives a square profile.
class SpatialBump {
 public:
  SpatialBump(double amplitude, double plateau, double ramp,
              std::optional<double> support = std::nullopt);
  /// Bump of total plateau width `width` (plateau half-width width/2).
  static SpatialBump with_width(double amplitude, double width,
                                double ramp = 1.0);

  double operator()(double x) const;
  /// Exact mean over [x - h/2, x + h/2]. Grid operators sample bumps this
  /// way so that a jump does not bias the effective width by h/2.
  double cell_average(double x, double h) const;
  double amplitude() const { return amplitude_; }
  double plateau() const { return plateau_; }
  double ramp() const { return ramp_; }
  double support() const { return support_; }

 private:
  double amplitude_;
  double plateau_;
  double ramp_;
  double support_;
};

/// baseline(t) + bump(x); equals the baseline exactly outside the bump support.
class CoefficientField {
 public:
  explicit CoefficientField(PeriodicScalar baseline,
                            std::optional<SpatialBump> bump = std::nullopt)
      : baseline_(std::move(baseline)), bump_(std::move(bump)) {}

  double operator()(double t, double x) const;
  double integral(double t0, double t1, double x) const;
  double period() const { return baseline_.period(); }

  const PeriodicScalar& baseline() const { return baseline_; }
  const std::optional<SpatialBump>& bump() const { return bump_; }
  bool has_bump() const { return bump_.has_value(); }
  double bump_value(double x) const { return bump_ ? (*bump_)(x) : 0.0; }
  double bump_cell(double x, double h) const {
    return bump_ ? bump_->cell_average(x, h) : 0.0;
  }
  /// Sampled lower/upper bound over all (t, x).
  std::pair<double, double> bounds(std::size_t samples_per_period = 256) const;

  CoefficientField with_bump(std::optional<SpatialBump> bump) const {
    return CoefficientField(baseline_, std::move(bump));
  }
  CoefficientField with_baseline(PeriodicScalar baseline) const {
    return CoefficientField(std::move(baseline), bump_);
  }

 private:
  PeriodicScalar baseline_;
  std::optional<SpatialBump> bump_;
};

enum class Coef : int { a1 = 0, b1, c1, a2, b2, c2 };

inline constexpr std::array<Coef, 6> kAllCoefs = {Coef::a1, Coef::b1, Coef::c1,
                                                  Coef::a2, Coef::b2, Coef::c2};

const char* coef_name(Coef c);
std::optional<Coef> coef_from_name(const std::string& name);

/// The six coefficient fields of the competition system, sharing one period.
/// Construction rejects mismatched periods and nonpositive b_i, c_i.
class CoefficientSet {
 public:
  CoefficientSet(CoefficientField a1, CoefficientField b1, CoefficientField c1,
                 CoefficientField a2, CoefficientField b2, CoefficientField c2);

  /// Spatially and temporally constant coefficients in the order
  /// (a1, b1, c1, a2, b2, c2).
  static CoefficientSet constants(const std::array<double, 6>& values,
                                  double period = 1.0);

  const CoefficientField& operator[](Coef c) const {
    return fields_[static_cast<int>(c)];
  }
  double period() const { return fields_[0].period(); }
  bool has_bumps() const;
  /// Maximal support radius over all bumps (0 if none).
  double bump_support() const;

  /// Same baselines with every bump removed.
  CoefficientSet baselines() const;
  CoefficientSet with_field(Coef c, CoefficientField field) const;

 private:
  std::array<CoefficientField, 6> fields_;
};

/// Infima (L) and suprema (M) of the six baselines over one period.
struct EnvelopeTable {
  std::array<double, 6> low{};
  std::array<double, 6> high{};

  double L(Coef c) const { return low[static_cast<int>(c)]; }
  double M(Coef c) const { return high[static_cast<int>(c)]; }
};

struct HypothesisVerdict {
  bool holds = false;
  std::vector<double> margins;
  std::string detail;
};

EnvelopeTable compute_envelopes(const CoefficientSet& set,
                                std::size_t samples_per_period = 256);

HypothesisVerdict check_H0(const EnvelopeTable& env);
/// Throws PreconditionError when H0 fails.
HypothesisVerdict check_H1(const EnvelopeTable& env);
HypothesisVerdict check_H2(const CoefficientSet& set, const EnvelopeTable& env,
                           std::size_t samples_per_period = 256);
/// Baseline condition for a homogeneous periodic coexistence state.
HypothesisVerdict check_coexistence(const EnvelopeTable& env);

/// Closed-form H2 for time-independent coefficients. Used as a cross-check of
/// the sampled form.
HypothesisVerdict check_H2_constant(const std::array<double, 6>& values);

struct LvDeterminacy {
  HypothesisVerdict verdict;
  CoefficientSet coefficients;
  HypothesisVerdict h2;
};

/// Lotka-Volterra linear-determinacy condition in (r1, r2, a1~, a2~) form,
/// together with the coefficient set it corresponds to and H2 evaluated on it.
LvDeterminacy check_lv_determinacy(double r1, double r2, double a1_tilde,
                                   double a2_tilde, double period = 1.0);

}  // namespace compete
