// Timelike and null geodesics of the flat-chart FLRW metric.
//
// The conserved momenta C_i = a^2 u^i reduce the geodesic equations to
// quadratures: u^0 = sqrt(C - eps_n a^2)/a with C = sum C_i^2 and eps_n the
// normalization (-1 timelike, 0 null). Integration runs in coordinate time
// (the affine map degenerates at the singularity); tau is anchored so that
// tau -> 0 at the singularity whenever that improper integral converges.

#pragma once

#include <array>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "flrwc/geometry.hpp"
#include "flrwc/ode.hpp"
#include "flrwc/scale_factor.hpp"

namespace flrwc {

struct GeodesicSpec {
  NormClass normclass = NormClass::Timelike;
  std::array<double, 3> Ci{1.0, 0.0, 0.0};
  std::array<double, 3> Di{0.0, 0.0, 0.0};
  double t_start = 0.0;
  double t_end = 0.0;

  double C() const { return Ci[0] * Ci[0] + Ci[1] * Ci[1] + Ci[2] * Ci[2]; }

  // Momentum along x^1 only; classification depends only on C.
  static GeodesicSpec canonical(NormClass cls, double C, double t_start, double t_end);
};

struct PathSample {
  double tau = 0;
  double t = 0;
  std::array<double, 3> x{};
  double u0 = 0;
  std::array<double, 3> u{};
};

class GeodesicPath {
 public:
  const std::vector<PathSample>& samples() const { return samples_; }
  const GeodesicSpec& spec() const { return spec_; }
  const ScaleFactorModel& model() const { return *model_; }
  double C() const { return spec_.C(); }
  double t0() const { return t0_; }

  // True when tau (resp. x) could be anchored at the singularity, i.e. the
  // improper integral from t0 converged.
  bool tau_anchored() const { return tau_anchored_; }
  bool x_anchored() const { return x_anchored_; }

  // Cubic Hermite interpolation in log(t - t0); u is evaluated exactly.
  PathSample state_at(double t) const;
  double tau_at(double t) const { return state_at(t).tau; }

  // Header "tau,t,x1,x2,x3,u0,u1,u2,u3", one sample per line, 17 significant
  // digits.
  void write_csv(std::ostream& os) const;

 private:
  friend GeodesicPath integrate_geodesic(const ScaleFactorModel&, const GeodesicSpec&,
                                          const OdeOptions&);
  GeodesicSpec spec_;
  std::shared_ptr<const ScaleFactorModel> model_;
  double t0_ = 0;
  bool tau_anchored_ = false;
  bool x_anchored_ = false;
  std::vector<PathSample> samples_;
  std::vector<double> xi_;        // log(t - t0) per sample
  std::vector<double> dtau_dxi_;  // per-sample derivatives for interpolation
  std::array<std::vector<double>, 3> dx_dxi_;
};

// Samples the path on a grid of 128 points per decade of t - t0.
GeodesicPath integrate_geodesic(const ScaleFactorModel& m, const GeodesicSpec& spec,
                                const OdeOptions& opts = {});

// Closed forms for the radiation model (epsilon = 2, kappa = 0, C = 1,
// timelike): tau(t), x1(t), and the transverse Jacobi component h3(t) that
// vanishes at t2. Accepts t = 0 (the anchored limit); negative t is an error.
struct RadiationClosedForms {
  double tau = 0;
  double x1 = 0;
  double h3 = 0;
};
RadiationClosedForms radiation_closed_forms(double t, double t2);

// Finite-difference variation through geodesics: both neighbours start at the
// event (spec.t_end, x=0) with velocity u +- h * velocity_perturbation and are
// integrated in affine parameter. Returns (Gamma(+h) - Gamma(-h)) / (2h) in
// coordinate components (dt, dx^i) at the requested affine offsets (<= 0,
// measured from the base event).
struct VariationSample {
  double tau_offset = 0;
  Vec4 delta{};
};
std::vector<VariationSample> vary_geodesic(const ScaleFactorModel& m, const GeodesicSpec& spec,
                                           const Vec4& velocity_perturbation, double h,
                                           std::span<const double> tau_offsets,
                                           const OdeOptions& opts = {});

}  // namespace flrwc
