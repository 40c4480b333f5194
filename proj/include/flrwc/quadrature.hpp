// Gauss-Legendre panel quadrature on geometrically graded subdivisions.
//
// The graded edges cluster panels toward a left endpoint where integrands
// behave like powers of (t - t0); each panel then sees an analytic integrand
// and 16-node Gauss-Legendre converges to near machine precision.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace flrwc {

struct QuadratureFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

template <int N>
struct GaussLegendre {
  std::array<double, N> node{}, weight{};
  // Nodes are roots of P_N on (-1,1), found by Newton from the Chebyshev
  // initial guess; weights w = 2 / ((1-x^2) P_N'(x)^2).
  GaussLegendre() {
    for (int i = 0; i < N; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (N + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      node[static_cast<std::size_t>(i)] = x;
      weight[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }
};

template <int N, class F>
double gl_panel(const GaussLegendre<N>& g, F&& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < N; ++i)
    s += g.weight[static_cast<std::size_t>(i)] * f(mid + half * g.node[static_cast<std::size_t>(i)]);
  return half * s;
}

inline const GaussLegendre<16>& gl16() {
  static const GaussLegendre<16> g;
  return g;
}
inline const GaussLegendre<8>& gl8() {
  static const GaussLegendre<8> g;
  return g;
}

}  // namespace detail

// Integrates f over a single interval with GL16 and returns the GL8/GL16
// discrepancy as an error estimate.
template <class F>
double gl16_with_estimate(F&& f, double a, double b, double* err) {
  const double v16 = detail::gl_panel(detail::gl16(), f, a, b);
  if (err) *err = std::abs(v16 - detail::gl_panel(detail::gl8(), f, a, b));
  return v16;
}

// Panel edges t0 + (t1-t0) * shrink^{-j} for j = levels..0, ascending, with
// the innermost edge clamped to `inner` when given. Edges below `inner` are
// dropped.
inline std::vector<double> graded_edges(double t0, double t1, int levels, double shrink,
                                        double inner = 0.0) {
  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(levels) + 1);
  for (int j = levels; j >= 0; --j) {
    const double e = t0 + (t1 - t0) * std::pow(shrink, -j);
    if (inner > t0 && e <= inner) continue;
    edges.push_back(e);
  }
  if (inner > t0) edges.insert(edges.begin(), inner);
  return edges;
}

// Integrates f over [a, b] split at the graded edges; accumulates the GL8 vs
// GL16 discrepancy into *err when given.
template <class F>
double integrate_edges(F&& f, std::span<const double> edges, double* err = nullptr) {
  double total = 0, etotal = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double e = 0;
    total += gl16_with_estimate(f, edges[i], edges[i + 1], &e);
    etotal += e;
  }
  if (err) *err = etotal;
  return total;
}

// Cumulative tail integrals over a fixed edge set: S(x) = integral of f from
// x to the last edge. Panel sums are cached once; a query pays one partial
// panel. Used for the inner integral of nested double integrals so the outer
// quadrature stays linear in the panel count.
class TailTable {
 public:
  template <class F>
  TailTable(F&& f, std::span<const double> edges) : edges_(edges.begin(), edges.end()) {
    tail_.assign(edges_.size(), 0.0);
    for (std::size_t i = edges_.size() - 1; i-- > 0;)
      tail_[i] = tail_[i + 1] + detail::gl_panel(detail::gl16(), f, edges_[i], edges_[i + 1]);
    f_ = [g = std::forward<F>(f)](double x) { return g(x); };
  }

  // x must lie within [edges.front(), edges.back()].
  double from(double x) const {
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    if (it == edges_.begin()) ++it;
    const std::size_t hi = static_cast<std::size_t>(it - edges_.begin());
    if (hi == edges_.size()) return 0.0;
    return detail::gl_panel(detail::gl16(), f_, x, edges_[hi]) + tail_[hi];
  }

 private:
  std::vector<double> edges_;
  std::vector<double> tail_;
  std::function<double(double)> f_;
};

// Richardson extrapolation of a geometrically convergent sequence v_k with
// ratio estimated from the last increments: v_inf ~ v_K + d_K r / (1 - r).
inline double richardson_limit(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n < 3) return v.back();
  const double d1 = v[n - 2] - v[n - 3];
  const double d2 = v[n - 1] - v[n - 2];
  if (d1 == 0.0 || d2 == 0.0) return v.back();
  const double r = d2 / d1;
  if (!(std::abs(r) < 1.0)) return v.back();
  return v.back() + d2 * r / (1.0 - r);
}

}  // namespace flrwc
