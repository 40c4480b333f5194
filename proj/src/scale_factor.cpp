#include "flrwc/scale_factor.hpp"

#include <cmath>

namespace flrwc {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ModelError(msg);
}

}  // namespace

ScaleFactorModel ScaleFactorModel::power_law(double epsilon, double kappa, double t1) {
  require(std::isfinite(epsilon) && epsilon > 0, "power-law model needs epsilon > 0");
  require(std::isfinite(t1) && t1 > 0, "power-law model needs t1 > t0 = 0");
  ScaleFactorModel m;
  m.family_ = Family::PowerLaw;
  m.epsilon_ = epsilon;
  m.kappa_ = kappa;
  m.t1_ = t1;
  m.p_ = 1.0 / epsilon;
  return m;
}

ScaleFactorModel ScaleFactorModel::log_corrected(double epsilon, double kappa, double t1) {
  require(std::isfinite(epsilon) && epsilon > 0, "log-corrected model needs epsilon > 0");
  // -t^(1/eps) log t is positive only on (0,1); t1 = 1 would make a(t1) = 0.
  require(std::isfinite(t1) && t1 > 0 && t1 < 1,
          "log-corrected model is valid on t in (0,1); need 0 < t1 < 1");
  ScaleFactorModel m;
  m.family_ = Family::LogCorrected;
  m.epsilon_ = epsilon;
  m.kappa_ = kappa;
  m.t1_ = t1;
  m.p_ = 1.0 / epsilon;
  return m;
}

ScaleFactorModel ScaleFactorModel::custom(const std::string& expression, double t0,
                                          double t1, double kappa) {
  require(std::isfinite(t0) && std::isfinite(t1) && t1 > t0,
          "custom model needs finite t0 < t1");
  ScaleFactorModel m;
  m.family_ = Family::Custom;
  m.epsilon_ = 0.0;
  m.kappa_ = kappa;
  m.t0_ = t0;
  m.t1_ = t1;
  m.source_ = expression;
  m.f_ = expr::parse(expression);
  m.df_ = expr::differentiate(m.f_);
  m.ddf_ = expr::differentiate(m.df_);

  // The model must describe a singular spacetime: a(t) -> 0 as t -> t0+.
  // Probe three geometrically spaced offsets; require positive values that
  // decrease strictly toward t0 and by a definite factor overall, which
  // rejects non-singular expressions like 1 + t while admitting slow decay.
  const double dt = t1 - t0;
  double q1 = 0, q2 = 0, q3 = 0;
  try {
    q1 = expr::evaluate(m.f_, t0 + 1e-12 * dt);
    q2 = expr::evaluate(m.f_, t0 + 1e-9 * dt);
    q3 = expr::evaluate(m.f_, t0 + 1e-6 * dt);
  } catch (const expr::DomainError&) {
    throw ModelError("custom scale factor is not evaluable near t0");
  }
  require(q1 > 0 && q2 > 0 && q3 > 0, "custom scale factor must be positive near t0");
  require(q1 < q2 && q2 < q3 && q1 <= 0.9 * q3,
          "custom scale factor does not decay toward t0 (not a singular model)");
  return m;
}

void ScaleFactorModel::check_domain(double t) const {
  if (!(t > t0_))
    throw DomainError("scale factor evaluated at t = " + std::to_string(t) +
                      " outside (t0, ...), t0 = " + std::to_string(t0_));
  if (family_ == Family::LogCorrected && t >= 1.0)
    throw DomainError("log-corrected scale factor is only defined for t < 1");
}

double ScaleFactorModel::a(double t) const {
  check_domain(t);
  switch (family_) {
    case Family::PowerLaw:
      return std::pow(t, p_);
    case Family::LogCorrected:
      return -std::pow(t, p_) * std::log(t);
    case Family::Custom: {
      double v = expr::evaluate(f_, t);
      if (!(v > 0))
        throw DomainError("custom scale factor is non-positive at t = " + std::to_string(t));
      return v;
    }
  }
  return 0;  // unreachable
}

double ScaleFactorModel::a_dot(double t) const {
  check_domain(t);
  switch (family_) {
    case Family::PowerLaw:
      return p_ * std::pow(t, p_ - 1.0);
    case Family::LogCorrected:
      // d/dt [-t^p log t] = t^(p-1) (p L - 1),  L = -log t
      return std::pow(t, p_ - 1.0) * (-p_ * std::log(t) - 1.0);
    case Family::Custom:
      return expr::evaluate(df_, t);
  }
  return 0;
}

double ScaleFactorModel::a_ddot(double t) const {
  check_domain(t);
  switch (family_) {
    case Family::PowerLaw:
      return p_ * (p_ - 1.0) * std::pow(t, p_ - 2.0);
    case Family::LogCorrected: {
      // t^(p-2) [(p-1)(p L - 1) - p],  L = -log t
      const double L = -std::log(t);
      return std::pow(t, p_ - 2.0) * ((p_ - 1.0) * (p_ * L - 1.0) - p_);
    }
    case Family::Custom:
      return expr::evaluate(ddf_, t);
  }
  return 0;
}

double ScaleFactorModel::curvature_bracket(double t) const {
  const double av = a(t);
  const double ad = a_dot(t);
  const double add = a_ddot(t);
  const double h = ad / av;
  return add / av - h * h - kappa_ / (av * av);
}

}  // namespace flrwc
