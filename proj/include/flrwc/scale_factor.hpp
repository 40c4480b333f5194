// Singular FLRW scale-factor models a(t) on (t0, t1] with a(t) -> 0 at t0.
//
// Built-in families (t0 = 0, stiffness parameter epsilon > 0):
//   PowerLaw      a(t) = t^(1/epsilon)
//   LogCorrected  a(t) = -t^(1/epsilon) log t,  valid only on t in (0,1)
// Custom models supply an expression for a(t) plus an explicit t0.
//
// kappa is the spatial curvature parameter carried with the model; it enters
// scalar combinations (curvature_bracket, condition integrands) while the
// transport/geodesic machinery works in the flat spatial chart (kappa = 0).

#pragma once

#include <stdexcept>
#include <string>

#include "flrwc/expression.hpp"

namespace flrwc {

enum class Family { PowerLaw, LogCorrected, Custom };

// Invalid model parameters (rejected at construction).
struct ModelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Evaluation outside the model's domain.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ScaleFactorModel {
 public:
  static ScaleFactorModel power_law(double epsilon, double kappa, double t1 = 1.0);
  static ScaleFactorModel log_corrected(double epsilon, double kappa, double t1 = 0.5);
  // Expression in t with a declared singularity time t0 < t1. The expression
  // is parsed, differentiated symbolically twice, and checked to decay
  // toward t0 (three probe points; see README).
  static ScaleFactorModel custom(const std::string& expression, double t0, double t1,
                                 double kappa = 0.0);

  Family family() const { return family_; }
  double epsilon() const { return epsilon_; }
  double kappa() const { return kappa_; }
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  // Numerical floor for integrations that approach the singularity.
  double t_min() const { return t0_ + 1e-12 * (t1_ - t0_); }
  const std::string& expression_source() const { return source_; }

  double a(double t) const;
  double a_dot(double t) const;
  double a_ddot(double t) const;

  // addot/a - (adot/a)^2 - kappa/a^2: the scalar combination sourcing both
  // geodesic-deviation focusing and the condition integrands.
  double curvature_bracket(double t) const;

 private:
  ScaleFactorModel() = default;
  void check_domain(double t) const;

  Family family_ = Family::PowerLaw;
  double epsilon_ = 2.0;
  double kappa_ = 0.0;
  double t0_ = 0.0;
  double t1_ = 1.0;
  double p_ = 0.5;  // 1/epsilon for the built-in families
  std::string source_;
  expr::ExpressionTree f_, df_, ddf_;  // Custom only
};

}  // namespace flrwc
