#include <cmath>

#include "doctest.h"
#include "flrwc/geometry.hpp"

using namespace flrwc;

TEST_CASE("metric pairing carries the -+++ signature") {
  const ScaleFactorModel m = ScaleFactorModel::power_law(2.0, 0.0);
  const Vec4 e0{{1, 0, 0, 0}}, e1{{0, 1, 0, 0}}, e3{{0, 0, 0, 1}};
  for (double t : {0.25, 1.0, 4.0}) {
    const double a2 = m.a(t) * m.a(t);
    CHECK(metric_dot(m, t, e0, e0) == -1.0);
    CHECK(metric_dot(m, t, e1, e1) == doctest::Approx(a2).epsilon(1e-15));
    CHECK(metric_dot(m, t, e3, e3) == doctest::Approx(a2).epsilon(1e-15));
    CHECK(metric_dot(m, t, e0, e1) == 0.0);
  }
}

TEST_CASE("christoffel values for the radiation background at t = 1") {
  const ScaleFactorModel m = ScaleFactorModel::power_law(2.0, 0.0);
  const Christoffels G = christoffels(m, 1.0);
  CHECK(G.a_adot == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(G.adot_over_a == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("component accessor agrees with the finite-difference table") {
  for (double eps : {1.0, 2.0}) {
    const ScaleFactorModel m = ScaleFactorModel::power_law(eps, 0.0);
    for (double t : {0.3, 1.0, 2.7}) {
      const Christoffels G = christoffels(m, t);
      const ChristoffelTable T = christoffels_fd(m, t);
      const double scale = std::max(1.0, std::abs(G.a_adot));
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
          for (int rho = 0; rho < 4; ++rho) {
            const double want = T[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)]
                                 [static_cast<std::size_t>(rho)];
            CHECK(G.component(mu, nu, rho) ==
                  doctest::Approx(want).epsilon(1e-7).scale(scale));
          }
    }
  }
}

TEST_CASE("christoffel contraction is symmetric in its arguments") {
  const ScaleFactorModel m = ScaleFactorModel::power_law(1.5, 0.0);
  const Christoffels G = christoffels(m, 0.8);
  const Vec4 u{{1.2, 0.3, -0.7, 0.1}}, v{{0.5, -1.1, 0.2, 0.9}};
  const Vec4 x = christoffel_contract(G, u, v);
  const Vec4 y = christoffel_contract(G, v, u);
  for (int c = 0; c < 4; ++c) CHECK(x[c] == doctest::Approx(y[c]).epsilon(1e-14));
}

TEST_CASE("tidal operator matches the finite-difference assembly") {
  const Vec4 v{{0.4, 1.3, -0.6, 0.2}}, u{{1.5, 0.7, 0.1, -0.3}};
  for (double eps : {1.0, 2.0, 3.0}) {
    const ScaleFactorModel m = ScaleFactorModel::power_law(eps, 0.0);
    for (int k = 0; k < 20; ++k) {
      const double t = 0.2 + 0.24 * k;
      const Vec4 got = curvature_operator(m, t, v, u);
      const Vec4 want = curvature_operator_fd(m, t, v, u);
      double scale = 0;
      for (int c = 0; c < 4; ++c) scale = std::max(scale, std::abs(want[c]));
      for (int c = 0; c < 4; ++c)
        CHECK(got[c] == doctest::Approx(want[c]).epsilon(1e-6).scale(std::max(scale, 1.0)));
    }
  }
}

TEST_CASE("tidal operator annihilates the tangent direction") {
  const ScaleFactorModel m = ScaleFactorModel::power_law(2.0, 0.0);
  const double t = 0.7;
  const double a = m.a(t);
  const Vec4 u{{std::sqrt(1.0 + a * a) / a, 1.0 / (a * a), 0, 0}};
  const Vec4 r = curvature_operator(m, t, u, u);
  for (int c = 0; c < 4; ++c) CHECK(std::abs(r[c]) < 1e-12);
}

TEST_CASE("ricci contraction values for the radiation background") {
  const ScaleFactorModel m = ScaleFactorModel::power_law(2.0, 0.0);
  CHECK(minus_ricci_uu(m, 1.0, 0.0, NormClass::Timelike) ==
        doctest::Approx(-0.75).epsilon(1e-15));  // comoving
  CHECK(minus_ricci_uu(m, 1.0, 1.0, NormClass::Null) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(minus_ricci_uu(m, 1.0, 1.0, NormClass::Timelike) ==
        doctest::Approx(-1.75).epsilon(1e-15));
}

TEST_CASE("timelike and null contractions differ by the trace part") {
  for (double eps : {0.7, 2.0}) {
    for (double kappa : {-1.0, 0.0, 1.0}) {
      const ScaleFactorModel m = ScaleFactorModel::power_law(eps, kappa);
      for (double t : {0.3, 1.1, 3.0}) {
        const double tl = minus_ricci_uu(m, t, 2.0, NormClass::Timelike);
        const double nl = minus_ricci_uu(m, t, 2.0, NormClass::Null);
        const double want = 3.0 * m.a_ddot(t) / m.a(t);
        // One rounding of the final addition separates the two routes.
        const double margin = 4e-16 * std::max({std::abs(tl), std::abs(nl), std::abs(want)});
        CHECK(std::abs((tl - nl) - want) <= margin);
      }
    }
  }
}

TEST_CASE("flat-chart operations reject curved spatial sections") {
  const ScaleFactorModel m = ScaleFactorModel::power_law(2.0, 1.0);
  const Vec4 v{{1, 0, 0, 0}};
  CHECK_THROWS_AS(metric_dot(m, 1.0, v, v), UnsupportedChart);
  CHECK_THROWS_AS(christoffels(m, 1.0), UnsupportedChart);
  CHECK_THROWS_AS(curvature_operator(m, 1.0, v, v), UnsupportedChart);
  // Scalar contractions carry kappa fine.
  CHECK_NOTHROW(minus_ricci_uu(m, 1.0, 1.0, NormClass::Timelike));
}
