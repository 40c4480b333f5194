// Parallel-transported frames, the matrix Jacobi equation, and conjugate
// point detection.
//
// Timelike: frame E0..E3 with E0 = gamma-dot, Jacobi tensor A is 3x3 over the
// spatial legs. Null: a 2x2 screen-space tensor over legs E2, E3 orthogonal
// to gamma-dot and to an auxiliary null vector. Columns of A are the Jacobi
// fields with J(t2) = 0 and covariant derivative E_i there, so det A = 0 away
// from t2 marks a conjugate point; at the singularity the criterion is the
// vanishing of the Jacobi-field norm, tracked through det A -> 0.

#pragma once

#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "flrwc/geodesic.hpp"
#include "flrwc/geometry.hpp"
#include "flrwc/numerics.hpp"
#include "flrwc/ode.hpp"

namespace flrwc {

struct DegenerateSeed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// det A heads to zero toward the singularity but the trend fails the
// monotonicity / fit-quality gates, so neither a SingularLimit event nor its
// absence can be certified.
struct InconclusiveTrend : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class FrameField {
 public:
  NormClass normclass() const { return cls_; }
  // Number of Jacobi legs: 3 timelike (E1..E3), 2 null (E2, E3).
  int nlegs() const { return cls_ == NormClass::Timelike ? 3 : 2; }

  const std::vector<double>& times() const { return t_; }

  // E_mu at sample k. Null frames carry only mu = 2, 3.
  Vec4 sample(std::size_t k, int mu) const;
  // Cubic Hermite interpolation in log(t - t0).
  Vec4 at(double t, int mu) const;

  // j-th Jacobi leg: timelike j -> E_{j+1}, null j -> E_{j+2}.
  Vec4 leg_at(double t, int j) const { return at(t, j + (cls_ == NormClass::Timelike ? 1 : 2)); }

 private:
  friend FrameField transport_frame(const GeodesicPath&, const OdeOptions&);
  int slot(int mu) const;
  NormClass cls_ = NormClass::Timelike;
  double t0_ = 0;
  int nvec_ = 4;  // stored vectors: 4 timelike (E0..E3), 2 null (E2, E3)
  std::vector<double> t_, xi_;
  std::vector<double> comp_;   // [k][vec][component]
  std::vector<double> dcomp_;  // d/dxi, for interpolation
};

// Seeds an orthonormal frame at the path's end point by Gram-Schmidt over the
// coordinate axes and integrates the parallel-transport equation backwards.
FrameField transport_frame(const GeodesicPath& path, const OdeOptions& opts = {});

struct JacobiTensorState {
  double t = 0;
  double tau = 0;
  MatN A, DA;
  double detA = 0;
  bool B_valid = false;  // A invertible to working precision
  MatN B;                // (D_tau A) A^{-1}
  double theta = 0;
  double sigma_norm = 0;
  double omega_norm = 0;  // ||antisym(B)||_F / max(||B||_F, 1)
  bool kernel_ok = true;  // Ker A and Ker DA intersect trivially
};

struct JacobiRun {
  double t2 = 0;
  double tau2 = 0;
  int n = 3;
  NormClass normclass = NormClass::Timelike;
  std::vector<JacobiTensorState> states;  // ascending t, last state at t2
  // Diagnostics of the frame-basis curvature matrix along the run.
  double max_R_asymmetry = 0;     // pre-symmetrization, relative to ||R||
  double max_screen_mixing = 0;   // null only: |g(R(E_a,u)u, u)| relative

  // Header "t,tau,detA,theta,sigma_norm,omega_norm,A11,...,Ann"; theta,
  // sigma_norm, omega_norm are nan where B is invalid.
  void write_csv(std::ostream& os) const;
};

// Integrates A'' = -R A (covariantly, in the frame basis) from A(t2) = 0,
// DA(t2) = I backwards to the start of the path, co-integrating the frame
// legs so curvature projection does not pay interpolation error. States are
// recorded at the path's own samples below t2, or at `sample_times` when
// nonempty (ascending, within (t0, t2]; t2 is always appended).
JacobiRun integrate_jacobi_tensor(const GeodesicPath& path, const FrameField& frame, double t2,
                                  const OdeOptions& opts = {},
                                  std::span<const double> sample_times = {});

// Recording grid dense on both ends: log-spaced in t - t0 from t_lo up to the
// midpoint scale, then log-spaced in t2 - t down to (t2 - t0) * 1e-6 near t2.
// theta has a pole at the trivial zero of det A, so finite differencing in
// tau near t2 needs the right-end refinement.
std::vector<double> jacobi_sample_grid(double t0, double t_lo, double t2, double per_decade);

enum class ConjugateKind { InteriorZero, SingularLimit };

struct ConjugateEvent {
  ConjugateKind kind = ConjugateKind::InteriorZero;
  double t_conj = 0;
  // InteriorZero: |det A| at the bracketing sample (sign change certified).
  // SingularLimit: fitted power of |det A| in t - t0.
  double detA_evidence = 0;
  // Minimum over columns J_i of g(J_i, J_i) = sum_k A[k][i]^2 at the sample
  // nearest the event.
  double jacobi_norm_evidence = 0;
};

struct TrendDiagnostics {
  double slope = 0;
  double r2 = 0;
  bool monotone = false;
  int points = 0;
};

struct ConjugatePointReport {
  double t2 = 0;
  std::vector<ConjugateEvent> events;
  TrendDiagnostics trend;
  enum class Trend { None, Confirmed } trend_state = Trend::None;
};

// Scans (t_min, t2) for interior zeros of det A (the trivial zero at t2 is
// excluded within |t - t2| < 1e-6 t2) and applies the singular-limit gates:
// log|det A| vs log(t - t0) over the last 8 sample decades must be monotone
// with R^2 >= 0.999 and slope >= 0.5. Throws InconclusiveTrend when det A
// heads to zero but the gates fail.
ConjugatePointReport detect_conjugate(const JacobiRun& run, const GeodesicPath& path);

}  // namespace flrwc
