#include "flrwc/geometry.hpp"

#include <cmath>

namespace flrwc {

namespace {

void require_flat_chart(const ScaleFactorModel& m) {
  if (m.kappa() != 0.0)
    throw UnsupportedChart(
        "pointwise geometry uses the flat Cartesian chart; model has kappa != 0");
}

}  // namespace

double metric_dot(const ScaleFactorModel& m, double t, const Vec4& v, const Vec4& w) {
  require_flat_chart(m);
  const double a2 = m.a(t) * m.a(t);
  return -v[0] * w[0] + a2 * (v[1] * w[1] + v[2] * w[2] + v[3] * w[3]);
}

Christoffels christoffels(const ScaleFactorModel& m, double t) {
  require_flat_chart(m);
  const double av = m.a(t);
  const double ad = m.a_dot(t);
  return {av * ad, ad / av};
}

double Christoffels::component(int mu, int nu, int rho) const {
  if (mu == 0 && nu != 0 && nu == rho) return a_adot;
  if (mu != 0 && ((nu == 0 && rho == mu) || (rho == 0 && nu == mu))) return adot_over_a;
  return 0.0;
}

Vec4 christoffel_contract(const Christoffels& G, const Vec4& u, const Vec4& v) {
  const double spatial_dot = u[1] * v[1] + u[2] * v[2] + u[3] * v[3];
  Vec4 out;
  out[0] = G.a_adot * spatial_dot;
  for (int i = 1; i < 4; ++i) out[i] = G.adot_over_a * (u[0] * v[i] + v[0] * u[i]);
  return out;
}

Vec4 curvature_operator(const ScaleFactorModel& m, double t, const Vec4& v, const Vec4& u) {
  require_flat_chart(m);
  const double av = m.a(t);
  const double ad = m.a_dot(t);
  const double add = m.a_ddot(t);

  const double us2 = u[1] * u[1] + u[2] * u[2] + u[3] * u[3];
  const double uv = u[1] * v[1] + u[2] * v[2] + u[3] * v[3];

  Vec4 out;
  out[0] = av * add * (us2 * v[0] - uv * u[0]);
  const double c1 = add / av;
  const double c2 = ad * ad;
  for (int i = 1; i < 4; ++i)
    out[i] = c1 * (u[0] * v[0] * u[i] - u[0] * u[0] * v[i]) + c2 * (us2 * v[i] - uv * u[i]);
  return out;
}

double minus_ricci_uu(const ScaleFactorModel& m, double t, double C, NormClass cls) {
  const double av = m.a(t);
  const double motion = 2.0 * (C / (av * av)) * m.curvature_bracket(t);
  if (cls == NormClass::Null) return motion;
  return 3.0 * m.a_ddot(t) / av + motion;
}

ChristoffelTable christoffels_fd(const ScaleFactorModel& m, double t) {
  // Metric as a function of the coordinates; only x^0 = t enters. Central
  // differences in every coordinate direction keep the oracle generic.
  const double h = 1e-5 * std::max(std::abs(t), 1.0);
  auto metric_at = [&](double tt, int mu, int nu) -> double {
    if (mu != nu) return 0.0;
    if (mu == 0) return -1.0;
    const double av = m.a(tt);
    return av * av;
  };

  std::array<std::array<std::array<double, 4>, 4>, 4> dg{};  // dg[lam][mu][nu]
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      dg[0][mu][nu] = (metric_at(t + h, mu, nu) - metric_at(t - h, mu, nu)) / (2.0 * h);
  // Spatial derivatives vanish: dg[1..3] stay zero.

  const double av = m.a(t);
  const double ginv[4] = {-1.0, 1.0 / (av * av), 1.0 / (av * av), 1.0 / (av * av)};

  ChristoffelTable G{};
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu)
      for (int rho = 0; rho < 4; ++rho)
        G[mu][nu][rho] = 0.5 * ginv[mu] *
                         (dg[nu][rho][mu] + dg[rho][nu][mu] - dg[mu][nu][rho]);
  return G;
}

Vec4 curvature_operator_fd(const ScaleFactorModel& m, double t, const Vec4& v,
                           const Vec4& u) {
  // R^rho_{sigma mu nu} = d_mu G^rho_{nu sigma} - d_nu G^rho_{mu sigma}
  //                       + G^rho_{mu lam} G^lam_{nu sigma}
  //                       - G^rho_{nu lam} G^lam_{mu sigma},
  // with the Christoffel t-derivative taken by central differences of the
  // analytic symbols (the symbols themselves are validated separately).
  const double h = 1e-5 * std::max(std::abs(t), 1.0);
  const Christoffels Gp = christoffels(m, t + h);
  const Christoffels Gm = christoffels(m, t - h);
  const Christoffels G0 = christoffels(m, t);

  auto dG0 = [&](int mu, int nu, int rho) {
    return (Gp.component(mu, nu, rho) - Gm.component(mu, nu, rho)) / (2.0 * h);
  };
  auto dG = [&](int lam, int mu, int nu, int rho) {
    return lam == 0 ? dG0(mu, nu, rho) : 0.0;
  };

  Vec4 out{};
  for (int rho = 0; rho < 4; ++rho) {
    double acc = 0;
    for (int sig = 0; sig < 4; ++sig)
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
          const double uvu = u[sig] * v[mu] * u[nu];
          if (uvu == 0.0) continue;
          double r = dG(mu, rho, nu, sig) - dG(nu, rho, mu, sig);
          for (int lam = 0; lam < 4; ++lam)
            r += G0.component(rho, mu, lam) * G0.component(lam, nu, sig) -
                 G0.component(rho, nu, lam) * G0.component(lam, mu, sig);
          acc += r * uvu;
        }
    out[rho] = acc;
  }
  return out;
}

}  // namespace flrwc
