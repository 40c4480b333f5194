#include "flrwc/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "flrwc/numerics.hpp"
#include "flrwc/quadrature.hpp"

namespace flrwc {

namespace {

struct AnchorResult {
  double value = 0;
  bool converged = false;
};

// Improper integral of f over (t0, t_hi] on panels [t0 + D*4^{-j-1}, t0 +
// D*4^{-j}]. Panel sums of power-type integrands decay geometrically, so the
// cascade stops once the extrapolated tail is negligible; hitting the panel
// cap without that means the integral is treated as unanchored.
template <class F>
AnchorResult anchor_integral(F&& f, double t0, double t_hi) {
  const double span = t_hi - t0;
  double sum = 0;
  double prev = 0;
  double e_hi = t_hi;
  for (int j = 1; j <= 120; ++j) {
    const double e_lo = t0 + span * std::pow(4.0, -j);
    if (!(e_lo > t0) || !(e_lo < e_hi)) break;  // ran out of float resolution
    const double panel = detail::gl_panel(detail::gl16(), f, e_lo, e_hi);
    sum += panel;
    if (j >= 3 && prev != 0.0) {
      const double r = panel / prev;
      if (r >= 0.0 && r < 0.9) {
        const double tail = panel * r / (1.0 - r);
        if (std::abs(tail) < 1e-12 * std::max(std::abs(sum), 1e-300))
          return {sum + tail, true};
      }
    }
    prev = panel;
    e_hi = e_lo;
  }
  return {sum, false};
}

double norm_sign(NormClass cls) { return cls == NormClass::Timelike ? -1.0 : 0.0; }

void validate_spec(const ScaleFactorModel& m, const GeodesicSpec& spec) {
  if (m.kappa() != 0.0)
    throw UnsupportedChart("geodesics are only implemented in the flat chart (kappa = 0)");
  if (!(spec.C() > 0.0))
    throw std::invalid_argument("geodesic spec requires C = sum Ci^2 > 0 (non-comoving)");
  if (!(m.t0() < spec.t_start && spec.t_start < spec.t_end))
    throw std::invalid_argument("geodesic spec requires t0 < t_start < t_end");
}

}  // namespace

GeodesicSpec GeodesicSpec::canonical(NormClass cls, double C, double t_start, double t_end) {
  if (!(C > 0.0)) throw std::invalid_argument("canonical geodesic requires C > 0");
  GeodesicSpec s;
  s.normclass = cls;
  s.Ci = {std::sqrt(C), 0.0, 0.0};
  s.Di = {0.0, 0.0, 0.0};
  s.t_start = t_start;
  s.t_end = t_end;
  return s;
}

GeodesicPath integrate_geodesic(const ScaleFactorModel& m, const GeodesicSpec& spec,
                                const OdeOptions& opts) {
  validate_spec(m, spec);
  const double C = spec.C();
  const double epsn = norm_sign(spec.normclass);
  const double t0 = m.t0();

  const auto root = [&](double t) {
    const double a = m.a(t);
    return std::sqrt(C - epsn * a * a);
  };
  // dx^i/dt = Ci * s(t): one shared scalar quadrature serves all three axes.
  const auto dtau_dt = [&](double t) { return m.a(t) / root(t); };
  const auto ds_dt = [&](double t) { return 1.0 / (m.a(t) * root(t)); };

  const AnchorResult tau_anchor = anchor_integral(dtau_dt, t0, spec.t_start);
  const AnchorResult x_anchor = anchor_integral(ds_dt, t0, spec.t_start);

  GeodesicPath path;
  path.spec_ = spec;
  path.model_ = std::make_shared<ScaleFactorModel>(m);
  path.t0_ = t0;
  path.tau_anchored_ = tau_anchor.converged;
  path.x_anchored_ = x_anchor.converged;

  const std::vector<double> grid = log_grid(t0, spec.t_start, spec.t_end, 128.0);
  path.samples_.reserve(grid.size());
  path.xi_.reserve(grid.size());
  path.dtau_dxi_.reserve(grid.size());
  for (auto& v : path.dx_dxi_) v.reserve(grid.size());

  // State y = (tau, X) integrated in xi = log(t - t0).
  const OdeRhs rhs = [&](double xi, std::span<const double>, std::span<double> dy) {
    const double t = t0 + std::exp(xi);
    const double w = t - t0;
    dy[0] = w * dtau_dt(t);
    dy[1] = w * ds_dt(t);
  };

  AdaptiveRK rk(opts);
  std::array<double, 2> y{tau_anchor.converged ? tau_anchor.value : 0.0,
                          x_anchor.converged ? x_anchor.value : 0.0};
  double xi_prev = std::log(grid.front() - t0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const double xi = std::log(t - t0);
    if (k > 0) rk.advance(rhs, xi_prev, xi, y);
    xi_prev = xi;

    const double a = m.a(t);
    const double rt = root(t);
    PathSample s;
    s.tau = y[0];
    s.t = t;
    s.u0 = rt / a;
    for (int i = 0; i < 3; ++i) {
      s.x[static_cast<std::size_t>(i)] =
          spec.Di[static_cast<std::size_t>(i)] + spec.Ci[static_cast<std::size_t>(i)] * y[1];
      s.u[static_cast<std::size_t>(i)] = spec.Ci[static_cast<std::size_t>(i)] / (a * a);
    }
    path.samples_.push_back(s);
    path.xi_.push_back(xi);
    path.dtau_dxi_.push_back((t - t0) * a / rt);
    const double dX = (t - t0) / (a * rt);
    for (int i = 0; i < 3; ++i)
      path.dx_dxi_[static_cast<std::size_t>(i)].push_back(
          spec.Ci[static_cast<std::size_t>(i)] * dX);
  }
  return path;
}

PathSample GeodesicPath::state_at(double t) const {
  const double lo = samples_.front().t, hi = samples_.back().t;
  if (!(t >= lo && t <= hi))
    throw std::out_of_range("state_at: t outside the integrated range");
  const auto it = std::upper_bound(xi_.begin(), xi_.end(), std::log(t - t0_));
  std::size_t k = it == xi_.begin() ? 1 : static_cast<std::size_t>(it - xi_.begin());
  if (k >= xi_.size()) k = xi_.size() - 1;
  const std::size_t j = k - 1;

  const double xi = std::log(t - t0_);
  PathSample s;
  s.t = t;
  s.tau = hermite_eval(xi_[j], xi_[k], samples_[j].tau, samples_[k].tau, dtau_dxi_[j],
                       dtau_dxi_[k], xi);
  for (int i = 0; i < 3; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    s.x[ii] = hermite_eval(xi_[j], xi_[k], samples_[j].x[ii], samples_[k].x[ii], dx_dxi_[ii][j],
                           dx_dxi_[ii][k], xi);
  }
  // u is algebraic in a(t); no interpolation needed.
  const double a = model_->a(t);
  const double epsn = norm_sign(spec_.normclass);
  s.u0 = std::sqrt(spec_.C() - epsn * a * a) / a;
  for (int i = 0; i < 3; ++i)
    s.u[static_cast<std::size_t>(i)] = spec_.Ci[static_cast<std::size_t>(i)] / (a * a);
  return s;
}

void GeodesicPath::write_csv(std::ostream& os) const {
  os << "tau,t,x1,x2,x3,u0,u1,u2,u3\n";
  for (const PathSample& s : samples_) {
    os << fmt17(s.tau) << ',' << fmt17(s.t) << ',' << fmt17(s.x[0]) << ',' << fmt17(s.x[1]) << ','
       << fmt17(s.x[2]) << ',' << fmt17(s.u0) << ',' << fmt17(s.u[0]) << ',' << fmt17(s.u[1])
       << ',' << fmt17(s.u[2]) << '\n';
  }
}

RadiationClosedForms radiation_closed_forms(double t, double t2) {
  if (t < 0.0 || t2 < 0.0)
    throw DomainError("radiation closed forms require non-negative times");
  const double rt = std::sqrt(t);
  RadiationClosedForms r;
  r.tau = std::sqrt(t + t * t) - std::asinh(rt);
  r.x1 = 2.0 * std::asinh(rt);
  r.h3 = -2.0 * std::sqrt(t2) * (std::asinh(std::sqrt(t2)) - std::asinh(rt));
  return r;
}

std::vector<VariationSample> vary_geodesic(const ScaleFactorModel& m, const GeodesicSpec& spec,
                                           const Vec4& velocity_perturbation, double h,
                                           std::span<const double> tau_offsets,
                                           const OdeOptions& opts) {
  validate_spec(m, spec);
  const double t2 = spec.t_end;
  const double a2 = m.a(t2);
  const double epsn = norm_sign(spec.normclass);
  const double C = spec.C();

  Vec4 u_base;
  u_base[0] = std::sqrt(C - epsn * a2 * a2) / a2;
  for (int i = 0; i < 3; ++i)
    u_base[i + 1] = spec.Ci[static_cast<std::size_t>(i)] / (a2 * a2);

  // Integrates the geodesic through (t2, 0) with velocity u in affine
  // parameter and records (t, x) at the requested offsets.
  const auto run = [&](const Vec4& u) {
    std::array<double, 3> Ct{};
    for (int i = 0; i < 3; ++i) Ct[static_cast<std::size_t>(i)] = a2 * a2 * u[i + 1];
    const double Q = Ct[0] * Ct[0] + Ct[1] * Ct[1] + Ct[2] * Ct[2];
    const double eps = metric_dot(m, t2, u, u);

    const OdeRhs rhs = [&](double, std::span<const double> y, std::span<double> dy) {
      const double a = m.a(y[0]);
      dy[0] = std::sqrt(Q - eps * a * a) / a;
      for (int i = 0; i < 3; ++i)
        dy[static_cast<std::size_t>(i) + 1] = Ct[static_cast<std::size_t>(i)] / (a * a);
    };

    // Offsets are visited monotonically away from 0 in each direction.
    std::vector<std::size_t> order(tau_offsets.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a_, std::size_t b_) {
      return std::abs(tau_offsets[a_]) < std::abs(tau_offsets[b_]);
    });

    std::vector<Vec4> out(tau_offsets.size());
    AdaptiveRK fwd(opts), bwd(opts);
    std::array<double, 4> yf{t2, 0, 0, 0}, yb{t2, 0, 0, 0};
    double tf = 0, tb = 0;
    for (std::size_t idx : order) {
      const double target = tau_offsets[idx];
      std::array<double, 4>& y = target >= 0 ? yf : yb;
      AdaptiveRK& rk = target >= 0 ? fwd : bwd;
      double& cur = target >= 0 ? tf : tb;
      rk.advance(rhs, cur, target, y);
      cur = target;
      out[idx] = Vec4{{y[0], y[1], y[2], y[3]}};
    }
    return out;
  };

  const std::vector<Vec4> plus = run(u_base + velocity_perturbation * h);
  const std::vector<Vec4> minus = run(u_base + velocity_perturbation * (-h));

  std::vector<VariationSample> out(tau_offsets.size());
  for (std::size_t k = 0; k < tau_offsets.size(); ++k) {
    out[k].tau_offset = tau_offsets[k];
    out[k].delta = (plus[k] - minus[k]) * (1.0 / (2.0 * h));
  }
  return out;
}

}  // namespace flrwc
