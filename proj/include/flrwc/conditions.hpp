// The theorem's two integral conditions and the (family, epsilon, kappa)
// applicability classification, plus the Raychaudhuri consistency check.
//
// Condition 25: I(t) = integral_t^{t1} a(t') integral_{t'}^{t1} (1/a)
// [a''/a - (a'/a)^2 - kappa/a^2] dt'' dt' must diverge to -infinity as
// t -> t0. Condition 26: F+(t) = integral_t^{t1} max(f, 0) dt' must converge
// to a finite alpha >= 0, where f = 3 a'' + (2C/a)[a''/a - (a'/a)^2 -
// kappa/a^2]. Both are improper at the singularity; verdicts come from the
// geometric shrinking sequence t_k = t0 + (t1 - t0) r^{-k} and an increment
// ratio rule, with the power-law closed form preferred where it exists.

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "flrwc/geodesic.hpp"
#include "flrwc/jacobi.hpp"
#include "flrwc/scale_factor.hpp"

namespace flrwc {

enum class Verdict25 {
  DivergesToMinusInfinity,
  DivergesToPlusInfinity,
  ConvergesFinite,
  Inconclusive,
};

enum class Verdict26 {
  FiniteNonnegativeLimit,
  Diverges,
  Inconclusive,
};

enum class Decision {
  TheoremApplies,
  TheoremFailsCondition25,
  TheoremFailsCondition26,
  OutsidePaperAnalysis,
};

enum class VerdictSource { PaperTable, ClosedForm, Numeric };

struct WindowTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureControls {
  int levels = 14;      // K: deepest shrinking level, t_K = t0 + (t1-t0) r^{-K}
  double shrink = 4.0;  // r
  double rel_tol = 1e-7;  // quadrature self-check bound, relative to max(1, |I|)
};

struct TheoremInputs {
  ScaleFactorModel model;
  double C = 1.0;
  QuadratureControls quad;
};

// f(t) = 3 a'' + (2C/a)[a''/a - (a'/a)^2 - kappa/a^2] and its positive /
// negative parts (f = fplus - fminus, both nonnegative).
double f_of_t(const TheoremInputs& in, double t);
double fplus_of_t(const TheoremInputs& in, double t);
double fminus_of_t(const TheoremInputs& in, double t);

// The condition-25 double integral I(t), by graded Gauss-Legendre panels with
// a cached inner tail table. Throws QuadratureFailure when the embedded error
// estimate exceeds quad.rel_tol.
double condition25_integral(const TheoremInputs& in, double t);

// Closed form of I(t) for the power-law family; requires epsilon not in
// {1, 3} (those make the antiderivatives logarithmic).
double powerlaw_condition25_closed(double epsilon, double kappa, double t1, double t);

struct ConditionReport {
  std::vector<double> t_values;  // t_k, k = 0..K (t_0 = t1)
  std::vector<double> I_values;
  std::vector<double> Fplus_values;
  Verdict25 verdict25 = Verdict25::Inconclusive;
  Verdict26 verdict26 = Verdict26::Inconclusive;
  std::optional<double> I_limit;         // Richardson limit when ConvergesFinite
  std::optional<double> alpha_estimate;  // when FiniteNonnegativeLimit
  bool applicable = false;
  VerdictSource source25 = VerdictSource::Numeric;
  bool f_negative_shortcut = false;  // f < 0 sampled on the last 4 levels
  // The partial-integration diagnostic: condition 25 holds if the integral
  // with inner integrand (a'^2 - kappa)/a^3 does not diverge to +infinity.
  // Reported only; never feeds `applicable`.
  Verdict25 alt_check = Verdict25::Inconclusive;
};

ConditionReport decide_conditions(const TheoremInputs& in);

struct ClassificationVerdict {
  Family family = Family::PowerLaw;
  double epsilon = 0;
  double kappa = 0;
  double C = 1;
  Decision decision = Decision::OutsidePaperAnalysis;
  VerdictSource source = VerdictSource::Numeric;
  Verdict25 verdict25 = Verdict25::Inconclusive;
  Verdict26 verdict26 = Verdict26::Inconclusive;
};

// Built-in families resolve against the encoded applicability table; custom
// models fall through to decide_conditions.
ClassificationVerdict classify(Family family, double epsilon, double kappa, double C = 1.0);
ClassificationVerdict classify(const ScaleFactorModel& model, double C = 1.0,
                               QuadratureControls quad = {});

struct ResidualSample {
  double t = 0;
  double tau = 0;
  double residual = 0;  // normalized: |raw| / max(1, largest term magnitude)
};

// Raychaudhuri self-consistency: theta-dot + theta^2/n + tr(sigma^2) +
// Ric(u,u) per usable sample, theta-dot from 5-point finite differences in
// tau. `theta_sq_divisor` overrides n (used by the negative control); 0 keeps
// the run's own n. Throws WindowTooSmall with fewer than 7 usable samples in
// [t_lo, t_hi].
std::vector<ResidualSample> raychaudhuri_residual(const JacobiRun& run, const GeodesicPath& path,
                                                  double t_lo, double t_hi,
                                                  int theta_sq_divisor = 0);

const char* to_string(Verdict25 v);
const char* to_string(Verdict26 v);
const char* to_string(Decision d);
const char* to_string(VerdictSource s);

}  // namespace flrwc
