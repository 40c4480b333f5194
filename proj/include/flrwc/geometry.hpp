// Pointwise geometry of the FLRW metric ds^2 = -dt^2 + a(t)^2 dx.dx in the
// flat Cartesian chart: metric pairing, Christoffel symbols, the tidal
// curvature operator v -> R(v, u)u, and the Ricci contraction along a
// geodesic tangent. A finite-difference oracle re-derives the Christoffels
// and the curvature operator from the metric alone for validation.

#pragma once

#include <array>
#include <stdexcept>

#include "flrwc/scale_factor.hpp"

namespace flrwc {

enum class NormClass { Timelike, Null };

// Operation requires the flat spatial chart but the model carries kappa != 0.
struct UnsupportedChart : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec4 {
  std::array<double, 4> c{};

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  Vec4 operator+(const Vec4& o) const {
    return {{c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2], c[3] + o.c[3]}};
  }
  Vec4 operator-(const Vec4& o) const {
    return {{c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2], c[3] - o.c[3]}};
  }
  Vec4 operator*(double s) const { return {{c[0] * s, c[1] * s, c[2] * s, c[3] * s}}; }
};

// g(v, w) at coordinate time t. Throws UnsupportedChart when kappa != 0.
double metric_dot(const ScaleFactorModel& m, double t, const Vec4& v, const Vec4& w);

// The two independent nonzero Christoffel values of the flat chart:
//   Gamma^0_{ij} = a adot delta_ij,  Gamma^i_{0j} = (adot/a) delta^i_j.
struct Christoffels {
  double a_adot = 0;
  double adot_over_a = 0;
  // Generic component accessor (indices 0..3), zero for all other slots.
  double component(int mu, int nu, int rho) const;
};

Christoffels christoffels(const ScaleFactorModel& m, double t);

// Gamma^mu_{nu rho} u^nu v^rho: the contraction entering transport equations.
Vec4 christoffel_contract(const Christoffels& G, const Vec4& u, const Vec4& v);

// Tidal operator R(v, u)u (curvature convention [nabla_mu, nabla_nu]V^rho =
// R^rho_{sigma mu nu} V^sigma). u need not be normalized.
Vec4 curvature_operator(const ScaleFactorModel& m, double t, const Vec4& v, const Vec4& u);

// -Ric(gdot, gdot) for the conserved-momentum tangent with C = sum C_i^2:
//   timelike: 3 addot/a + 2 (C/a^2) [addot/a - (adot/a)^2 - kappa/a^2]
//   null:                 2 (C/a^2) [addot/a - (adot/a)^2 - kappa/a^2]
// The timelike value is computed as 3 addot/a plus the identical null
// subexpression, so Timelike - Null recovers 3 addot/a to one rounding of
// the final addition.
double minus_ricci_uu(const ScaleFactorModel& m, double t, double C, NormClass cls);

// --- finite-difference oracle (independent validation route) ---

using ChristoffelTable = std::array<std::array<std::array<double, 4>, 4>, 4>;

// All Gamma^mu_{nu rho} from central differences of the metric components.
ChristoffelTable christoffels_fd(const ScaleFactorModel& m, double t);

// R(v, u)u assembled from finite differences of the analytic Christoffels.
Vec4 curvature_operator_fd(const ScaleFactorModel& m, double t, const Vec4& v,
                           const Vec4& u);

}  // namespace flrwc
