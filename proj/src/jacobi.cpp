#include "flrwc/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flrwc {

namespace {

double norm_sign(NormClass cls) { return cls == NormClass::Timelike ? -1.0 : 0.0; }

// Tangent from the conserved momenta; exact, never transported numerically.
Vec4 tangent_at(const ScaleFactorModel& m, const GeodesicSpec& spec, double t) {
  const double a = m.a(t);
  Vec4 u;
  u[0] = std::sqrt(spec.C() - norm_sign(spec.normclass) * a * a) / a;
  for (int i = 0; i < 3; ++i)
    u[i + 1] = spec.Ci[static_cast<std::size_t>(i)] / (a * a);
  return u;
}

// d/dxi of the exact tangent, Hermite data for legs reconstructed from it.
Vec4 tangent_rate_xi(const ScaleFactorModel& m, const GeodesicSpec& spec, double t0, double t) {
  const double a = m.a(t);
  const double ad = m.a_dot(t);
  const double C = spec.C();
  const double root = std::sqrt(C - norm_sign(spec.normclass) * a * a);
  Vec4 du;
  du[0] = -C * ad / (a * a * root);
  for (int i = 0; i < 3; ++i)
    du[i + 1] = -2.0 * ad * spec.Ci[static_cast<std::size_t>(i)] / (a * a * a);
  return du * (t - t0);
}

std::vector<Vec4> seed_frame(const ScaleFactorModel& m, const GeodesicSpec& spec, double t) {
  const Vec4 u = tangent_at(m, spec, t);
  std::vector<Vec4> E;
  if (spec.normclass == NormClass::Timelike) {
    E.push_back(u);  // g(E0, E0) = -1
    for (int axis = 1; axis <= 3 && E.size() < 4; ++axis) {
      Vec4 v{};
      v[axis] = 1.0;
      v = v + E[0] * metric_dot(m, t, v, E[0]);  // minus (g(v,E0)/g(E0,E0)) E0
      for (std::size_t j = 1; j < E.size(); ++j) v = v - E[j] * metric_dot(m, t, v, E[j]);
      const double n2 = metric_dot(m, t, v, v);
      if (!(n2 > 1e-20)) continue;
      E.push_back(v * (1.0 / std::sqrt(n2)));
    }
    if (E.size() != 4) throw DegenerateSeed("Gram-Schmidt collapsed seeding the timelike frame");
    return E;
  }
  // Null: screen legs orthogonal to gamma-dot and the reflected null vector.
  Vec4 aux;
  aux[0] = u[0];
  for (int i = 1; i < 4; ++i) aux[i] = -u[i];
  const double gun = metric_dot(m, t, u, aux);  // -2 (u^0)^2, never 0
  for (int axis = 1; axis <= 3 && E.size() < 2; ++axis) {
    Vec4 v{};
    v[axis] = 1.0;
    v = v - u * (metric_dot(m, t, v, aux) / gun) - aux * (metric_dot(m, t, v, u) / gun);
    for (std::size_t j = 0; j < E.size(); ++j) v = v - E[j] * metric_dot(m, t, v, E[j]);
    const double n2 = metric_dot(m, t, v, v);
    if (!(n2 > 1e-20)) continue;
    E.push_back(v * (1.0 / std::sqrt(n2)));
  }
  if (E.size() != 2) throw DegenerateSeed("Gram-Schmidt collapsed seeding the null screen pair");
  return E;
}

}  // namespace

int FrameField::slot(int mu) const {
  if (cls_ == NormClass::Timelike) {
    if (mu < 0 || mu > 3) throw std::out_of_range("frame index");
    return mu;
  }
  if (mu < 2 || mu > 3) throw std::out_of_range("null frames carry only E2, E3");
  return mu - 2;
}

Vec4 FrameField::sample(std::size_t k, int mu) const {
  const std::size_t base = (k * static_cast<std::size_t>(nvec_) +
                            static_cast<std::size_t>(slot(mu))) * 4;
  return Vec4{{comp_[base], comp_[base + 1], comp_[base + 2], comp_[base + 3]}};
}

Vec4 FrameField::at(double t, int mu) const {
  if (!(t >= t_.front() && t <= t_.back()))
    throw std::out_of_range("frame queried outside the transported range");
  const double xi = std::log(t - t0_);
  const auto it = std::upper_bound(xi_.begin(), xi_.end(), xi);
  std::size_t k = it == xi_.begin() ? 1 : static_cast<std::size_t>(it - xi_.begin());
  if (k >= xi_.size()) k = xi_.size() - 1;
  const std::size_t j = k - 1;
  const int s = slot(mu);
  Vec4 out;
  for (int c = 0; c < 4; ++c) {
    const std::size_t off = (static_cast<std::size_t>(nvec_)) * 4;
    const std::size_t ij = j * off + static_cast<std::size_t>(s) * 4 + static_cast<std::size_t>(c);
    const std::size_t ik = k * off + static_cast<std::size_t>(s) * 4 + static_cast<std::size_t>(c);
    out[c] = hermite_eval(xi_[j], xi_[k], comp_[ij], comp_[ik], dcomp_[ij], dcomp_[ik], xi);
  }
  return out;
}

FrameField transport_frame(const GeodesicPath& path, const OdeOptions& opts) {
  const ScaleFactorModel& m = path.model();
  const GeodesicSpec& spec = path.spec();
  const double t0 = path.t0();
  const double C = spec.C();
  const double epsn = norm_sign(spec.normclass);
  const auto& S = path.samples();
  const bool timelike = spec.normclass == NormClass::Timelike;

  FrameField F;
  F.cls_ = spec.normclass;
  F.t0_ = t0;
  F.nvec_ = timelike ? 4 : 2;
  const std::size_t nvec = static_cast<std::size_t>(F.nvec_);

  // Timelike E0 is the exact tangent and is never integrated; E1 is carried
  // as the deviation d = E1 - u, which obeys the same transport equation but
  // keeps bounded components near the singularity, where raw E1 tends to u
  // and their difference would drown in roundoff.
  const std::size_t nint = timelike ? 3 : 2;

  const OdeRhs rhs = [&](double xi, std::span<const double> y, std::span<double> dy) {
    const double t = t0 + std::exp(xi);
    const double a = m.a(t);
    const double dtau_dxi = (t - t0) * a / std::sqrt(C - epsn * a * a);
    const Christoffels G = christoffels(m, t);
    const Vec4 u = tangent_at(m, spec, t);
    for (std::size_t v = 0; v < nint; ++v) {
      const Vec4 E{{y[v * 4], y[v * 4 + 1], y[v * 4 + 2], y[v * 4 + 3]}};
      const Vec4 dE = christoffel_contract(G, u, E);
      for (int c = 0; c < 4; ++c) dy[v * 4 + static_cast<std::size_t>(c)] = -dtau_dxi * dE[c];
    }
  };

  const std::vector<Vec4> seed = seed_frame(m, spec, S.back().t);
  std::vector<double> y(nint * 4);
  for (std::size_t v = 0; v < nint; ++v) {
    Vec4 s = timelike ? seed[v + 1] : seed[v];
    if (timelike && v == 0) s = s - seed[0];  // seed[0] is the exact tangent
    for (int c = 0; c < 4; ++c) y[v * 4 + static_cast<std::size_t>(c)] = s[c];
  }

  const std::size_t ns = S.size();
  F.t_.resize(ns);
  F.xi_.resize(ns);
  F.comp_.resize(ns * nvec * 4);
  F.dcomp_.resize(ns * nvec * 4);

  AdaptiveRK rk(opts);
  std::vector<double> dy(nint * 4);
  double xi_prev = std::log(S.back().t - t0);
  for (std::size_t step = 0; step < ns; ++step) {
    const std::size_t k = ns - 1 - step;  // integrate backwards, store ascending
    const double t = S[k].t;
    const double xi = std::log(t - t0);
    if (step > 0) rk.advance(rhs, xi_prev, xi, y);
    xi_prev = xi;
    rhs(xi, y, dy);
    F.t_[k] = t;
    F.xi_[k] = xi;
    const std::size_t base = k * nvec * 4;
    const std::size_t skip = timelike ? 1 : 0;  // stored slot of the first integrated vector
    std::copy(y.begin(), y.end(), F.comp_.begin() + static_cast<std::ptrdiff_t>(base + skip * 4));
    std::copy(dy.begin(), dy.end(),
              F.dcomp_.begin() + static_cast<std::ptrdiff_t>(base + skip * 4));
    if (timelike) {
      const Vec4 u = tangent_at(m, spec, t);
      const Vec4 du = tangent_rate_xi(m, spec, t0, t);
      for (int c = 0; c < 4; ++c) {
        const std::size_t uc = static_cast<std::size_t>(c);
        F.comp_[base + uc] = u[c];
        F.dcomp_[base + uc] = du[c];
        F.comp_[base + 4 + uc] = u[c] + y[uc];  // E1 = u + d
        F.dcomp_[base + 4 + uc] = du[c] + dy[uc];
      }
    }
  }
  return F;
}

void JacobiRun::write_csv(std::ostream& os) const {
  os << "t,tau,detA,theta,sigma_norm,omega_norm";
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) os << ",A" << i << j;
  os << '\n';
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const JacobiTensorState& s : states) {
    os << fmt17(s.t) << ',' << fmt17(s.tau) << ',' << fmt17(s.detA);
    if (s.B_valid)
      os << ',' << fmt17(s.theta) << ',' << fmt17(s.sigma_norm) << ',' << fmt17(s.omega_norm);
    else
      os << ',' << fmt17(nan) << ',' << fmt17(nan) << ',' << fmt17(nan);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) os << ',' << fmt17(s.A(i, j));
    os << '\n';
  }
}

std::vector<double> jacobi_sample_grid(double t0, double t_lo, double t2, double per_decade) {
  if (!(t0 < t_lo && t_lo < t2))
    throw std::invalid_argument("sample grid needs t0 < t_lo < t2");
  const double w2 = t2 - t0;
  const double split = t0 + 0.5 * w2;
  std::vector<double> out;
  if (t_lo < split)
    out = log_grid(t0, t_lo, split, per_decade);
  else
    out.push_back(t_lo);
  // Right stream in v = t2 - t; its largest v lands on out.back() and is
  // skipped.
  const std::vector<double> vs = log_grid(0.0, 1e-6 * w2, t2 - out.back(), per_decade);
  for (std::size_t i = vs.size() - 1; i-- > 0;) {
    const double t = t2 - vs[i];
    if (t > out.back()) out.push_back(t);
  }
  return out;
}

JacobiRun integrate_jacobi_tensor(const GeodesicPath& path, const FrameField& frame, double t2,
                                  const OdeOptions& opts, std::span<const double> sample_times) {
  const ScaleFactorModel& m = path.model();
  const GeodesicSpec& spec = path.spec();
  if (frame.normclass() != spec.normclass)
    throw std::invalid_argument("frame and path normalization classes differ");
  const auto& S = path.samples();
  if (!(t2 > S.front().t && t2 <= S.back().t))
    throw std::invalid_argument("t2 outside the integrated path range");

  const double t0 = path.t0();
  const double C = spec.C();
  const double epsn = norm_sign(spec.normclass);
  const int n = frame.nlegs();
  const std::size_t un = static_cast<std::size_t>(n);

  JacobiRun run;
  run.t2 = t2;
  run.n = n;
  run.normclass = spec.normclass;

  // State layout: tau, legs (n x 4), A (n^2), DA (n^2), integrated in
  // xi = log(t - t0).
  const std::size_t off_legs = 1;
  const std::size_t off_A = off_legs + un * 4;
  const std::size_t off_DA = off_A + un * un;
  const std::size_t dim = off_DA + un * un;

  double max_asym = 0, max_mix = 0;
  const OdeRhs rhs = [&](double xi, std::span<const double> y, std::span<double> dy) {
    const double t = t0 + std::exp(xi);
    const double a = m.a(t);
    const double dtau_dxi = (t - t0) * a / std::sqrt(C - epsn * a * a);
    const Christoffels G = christoffels(m, t);
    const Vec4 u = tangent_at(m, spec, t);

    dy[0] = dtau_dxi;

    std::array<Vec4, 3> E, RE;
    for (std::size_t v = 0; v < un; ++v)
      E[v] = Vec4{{y[off_legs + v * 4], y[off_legs + v * 4 + 1], y[off_legs + v * 4 + 2],
                   y[off_legs + v * 4 + 3]}};
    for (std::size_t v = 0; v < un; ++v) {
      const Vec4 dE = christoffel_contract(G, u, E[v]);
      for (int c = 0; c < 4; ++c)
        dy[off_legs + v * 4 + static_cast<std::size_t>(c)] = -dtau_dxi * dE[c];
      RE[v] = curvature_operator(m, t, E[v], u);
    }

    MatN R = MatN::zero(n);
    double rnorm = 0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        R(j, k) = metric_dot(m, t, E[static_cast<std::size_t>(j)],
                             RE[static_cast<std::size_t>(k)]);
        rnorm += R(j, k) * R(j, k);
      }
    rnorm = std::sqrt(rnorm);
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const double d = std::abs(R(j, k) - R(k, j));
        if (rnorm > 0) max_asym = std::max(max_asym, d / rnorm);
        const double sym = 0.5 * (R(j, k) + R(k, j));
        R(j, k) = sym;
        R(k, j) = sym;
      }
    if (spec.normclass == NormClass::Null && rnorm > 0)
      for (std::size_t v = 0; v < un; ++v)
        max_mix = std::max(max_mix, std::abs(metric_dot(m, t, RE[v], u)) / rnorm);

    // dA = dtau * DA; dDA = -dtau * R A.
    for (std::size_t i = 0; i < un * un; ++i) dy[off_A + i] = dtau_dxi * y[off_DA + i];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double acc = 0;
        for (int k = 0; k < n; ++k)
          acc += R(i, k) * y[off_A + static_cast<std::size_t>(k * n + j)];
        dy[off_DA + static_cast<std::size_t>(i * n + j)] = -dtau_dxi * acc;
      }
  };

  // Initial data at t2. The timelike boost leg tends to the tangent near the
  // singularity and their curvature projections cancel catastrophically, so
  // slot 0 stores the deviation d = E1 - u instead. d obeys the same
  // transport equation, and R(u,u)u = 0 with g(u, R(v,u)u) = 0 make every
  // contraction in the rhs exact for d as written.
  std::vector<double> y(dim, 0.0);
  y[0] = path.state_at(t2).tau;
  for (int j = 0; j < n; ++j) {
    Vec4 E = frame.leg_at(t2, j);
    if (spec.normclass == NormClass::Timelike && j == 0) E = E - tangent_at(m, spec, t2);
    for (int c = 0; c < 4; ++c)
      y[off_legs + static_cast<std::size_t>(j) * 4 + static_cast<std::size_t>(c)] = E[c];
    y[off_DA + static_cast<std::size_t>(j * n + j)] = 1.0;
  }

  // Sample times: path grid (or the caller's grid) strictly below t2, then
  // t2 itself.
  std::vector<double> ts;
  if (sample_times.empty()) {
    for (const PathSample& s : S)
      if (s.t < t2 - 1e-15 * (t2 - t0)) ts.push_back(s.t);
  } else {
    for (double t : sample_times) {
      if (!(t > t0 && t <= t2))
        throw std::invalid_argument("sample times must lie in (t0, t2]");
      if (!ts.empty() && !(t > ts.back()))
        throw std::invalid_argument("sample times must ascend");
      if (t < t2 - 1e-15 * (t2 - t0)) ts.push_back(t);
    }
  }
  ts.push_back(t2);

  const auto record = [&](double t, std::span<const double> st) {
    JacobiTensorState out;
    out.t = t;
    out.tau = st[0];
    out.A = MatN::zero(n);
    out.DA = MatN::zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        out.A(i, j) = st[off_A + static_cast<std::size_t>(i * n + j)];
        out.DA(i, j) = st[off_DA + static_cast<std::size_t>(i * n + j)];
      }
    out.detA = out.A.det();

    const double anorm = out.A.frobenius();
    const double scale = anorm / std::sqrt(static_cast<double>(n));
    out.B_valid = anorm > 0 && std::abs(out.detA) > 1e-12 * std::pow(scale, n);
    if (out.B_valid) {
      out.B = out.DA * out.A.inverse();
      out.theta = out.B.trace();
      MatN sym = (out.B + out.B.transposed()) * 0.5;
      for (int i = 0; i < n; ++i) sym(i, i) -= out.theta / n;
      out.sigma_norm = sym.frobenius();
      const MatN anti = (out.B - out.B.transposed()) * 0.5;
      out.omega_norm = anti.frobenius() / std::max(out.B.frobenius(), 1.0);
    }

    const MatN gram = out.A.transposed() * out.A + out.DA.transposed() * out.DA;
    const double gscale = std::max(gram.trace() / n, 1e-300);
    out.kernel_ok = gram.det() > 1e-20 * std::pow(gscale, n);
    return out;
  };

  run.states.reserve(ts.size());
  run.states.push_back(record(t2, y));
  AdaptiveRK rk(opts);
  double xi_prev = std::log(t2 - t0);
  for (std::size_t step = ts.size() - 1; step-- > 0;) {
    const double t = ts[step];
    const double xi = std::log(t - t0);
    rk.advance(rhs, xi_prev, xi, y);
    xi_prev = xi;
    run.states.push_back(record(t, y));
  }
  std::reverse(run.states.begin(), run.states.end());
  run.tau2 = run.states.back().tau;
  run.max_R_asymmetry = max_asym;
  run.max_screen_mixing = max_mix;
  return run;
}

ConjugatePointReport detect_conjugate(const JacobiRun& run, const GeodesicPath& path) {
  const ScaleFactorModel& m = path.model();
  const double t0 = path.t0();
  const double t2 = run.t2;
  const double C = path.C();
  const double epsn = norm_sign(path.spec().normclass);
  const auto& st = run.states;

  ConjugatePointReport rep;
  rep.t2 = t2;
  const double excl = 1e-6 * std::max(std::abs(t2), t2 - t0);

  const auto min_column_norm = [&](const JacobiTensorState& s) {
    double best = 0;
    for (int i = 0; i < run.n; ++i) {
      double acc = 0;
      for (int k = 0; k < run.n; ++k) acc += s.A(k, i) * s.A(k, i);
      if (i == 0 || acc < best) best = acc;
    }
    return best;
  };

  // Interior zeros: sign changes of det A between adjacent samples.
  const auto dtau_dxi_at = [&](double t) {
    const double a = m.a(t);
    return (t - t0) * a / std::sqrt(C - epsn * a * a);
  };
  for (std::size_t k = 0; k + 1 < st.size(); ++k) {
    const JacobiTensorState& L = st[k];
    const JacobiTensorState& Rr = st[k + 1];
    if (L.t > t2 - excl || Rr.t > t2 - excl) continue;
    if (L.detA == 0.0) {
      rep.events.push_back({ConjugateKind::InteriorZero, L.t, 0.0, min_column_norm(L)});
      continue;
    }
    if (!(L.detA * Rr.detA < 0.0)) continue;

    // det A between samples via cubic Hermite: d(detA)/dxi = theta detA
    // dtau/dxi where B is valid, else linear.
    const double x0 = std::log(L.t - t0), x1 = std::log(Rr.t - t0);
    const bool herm = L.B_valid && Rr.B_valid;
    const double d0 = herm ? L.theta * L.detA * dtau_dxi_at(L.t) : 0.0;
    const double d1 = herm ? Rr.theta * Rr.detA * dtau_dxi_at(Rr.t) : 0.0;
    const auto f = [&](double x) {
      if (herm) return hermite_eval(x0, x1, L.detA, Rr.detA, d0, d1, x);
      return L.detA + (Rr.detA - L.detA) * (x - x0) / (x1 - x0);
    };
    double lo = x0, hi = x1;
    double flo = L.detA;
    while ((t0 + std::exp(hi)) - (t0 + std::exp(lo)) > 1e-10 * (t0 + std::exp(hi))) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((flo < 0) == (fm < 0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    const double t_root = t0 + std::exp(0.5 * (lo + hi));
    const bool left_closer = std::abs(t_root - L.t) < std::abs(Rr.t - t_root);
    rep.events.push_back({ConjugateKind::InteriorZero, t_root,
                          std::min(std::abs(L.detA), std::abs(Rr.detA)),
                          min_column_norm(left_closer ? L : Rr)});
  }

  // Singular-limit trend at the low end.
  double global_max = 0;
  double argmax_w = st.front().t - t0;
  for (const JacobiTensorState& s : st) {
    if (s.t > t2 - excl) continue;
    if (std::abs(s.detA) > global_max) {
      global_max = std::abs(s.detA);
      argmax_w = s.t - t0;
    }
  }
  const double w_min = st.front().t - t0;
  const bool heads_to_zero =
      global_max > 0 && std::abs(st.front().detA) < 1e-4 * global_max && w_min < argmax_w;

  if (heads_to_zero) {
    // Last 8 sample decades, capped 1.5 decades below the det A peak so the
    // fit sees only the singular trend.
    const double w_hi = std::min(w_min * 1e8, argmax_w / 31.622776601683793);
    std::vector<double> xs, ys;
    bool monotone = true;
    double prev = -1;
    for (const JacobiTensorState& s : st) {
      const double w = s.t - t0;
      if (w > w_hi || s.detA == 0.0) continue;
      const double ad = std::abs(s.detA);
      if (prev >= 0 && ad < prev * (1.0 - 1e-9)) monotone = false;
      prev = ad;
      xs.push_back(std::log(w));
      ys.push_back(std::log(ad));
    }
    rep.trend.points = static_cast<int>(xs.size());
    rep.trend.monotone = monotone;
    if (xs.size() >= 8) {
      const LineFit fit = fit_line(xs, ys);
      rep.trend.slope = fit.slope;
      rep.trend.r2 = fit.r2;
    }
    const bool ok = xs.size() >= 8 && monotone && rep.trend.r2 >= 0.999 && rep.trend.slope >= 0.5;
    if (!ok)
      throw InconclusiveTrend("det A heads to zero toward the singularity but fails the "
                              "monotonicity/fit gates");
    rep.trend_state = ConjugatePointReport::Trend::Confirmed;
    rep.events.push_back(
        {ConjugateKind::SingularLimit, t0, rep.trend.slope, min_column_norm(st.front())});
  }
  return rep;
}

}  // namespace flrwc
