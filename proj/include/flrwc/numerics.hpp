// Small shared numerics: fixed-size matrices (n = 2 or 3), finite-difference
// weights on arbitrary nodes, least-squares line fits, bisection, log-spaced
// grids, and float formatting helpers.

#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flrwc {

// Dense n x n matrix with n <= 3, row-major.
struct MatN {
  int n = 3;
  std::array<double, 9> a{};

  static MatN zero(int n) { return MatN{n, {}}; }
  static MatN identity(int n) {
    MatN m = zero(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * n + j)]; }

  MatN operator+(const MatN& o) const {
    MatN r = *this;
    for (int k = 0; k < n * n; ++k) r.a[static_cast<std::size_t>(k)] += o.a[static_cast<std::size_t>(k)];
    return r;
  }
  MatN operator-(const MatN& o) const {
    MatN r = *this;
    for (int k = 0; k < n * n; ++k) r.a[static_cast<std::size_t>(k)] -= o.a[static_cast<std::size_t>(k)];
    return r;
  }
  MatN operator*(double s) const {
    MatN r = *this;
    for (int k = 0; k < n * n; ++k) r.a[static_cast<std::size_t>(k)] *= s;
    return r;
  }
  MatN operator*(const MatN& o) const {
    MatN r = zero(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const double v = (*this)(i, k);
        if (v == 0.0) continue;
        for (int j = 0; j < n; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }

  MatN transposed() const {
    MatN r = zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  double trace() const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += (*this)(i, i);
    return s;
  }

  double frobenius() const {
    double s = 0;
    for (int k = 0; k < n * n; ++k) s += a[static_cast<std::size_t>(k)] * a[static_cast<std::size_t>(k)];
    return std::sqrt(s);
  }

  double det() const {
    if (n == 1) return a[0];
    if (n == 2) return a[0] * a[3] - a[1] * a[2];
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
  }

  // Inverse via adjugate; caller guards against tiny determinants.
  MatN inverse() const {
    MatN r = zero(n);
    const double d = det();
    if (n == 1) {
      r.a[0] = 1.0 / d;
      return r;
    }
    if (n == 2) {
      r.a[0] = a[3] / d;
      r.a[1] = -a[1] / d;
      r.a[2] = -a[2] / d;
      r.a[3] = a[0] / d;
      return r;
    }
    r(0, 0) = (a[4] * a[8] - a[5] * a[7]) / d;
    r(0, 1) = (a[2] * a[7] - a[1] * a[8]) / d;
    r(0, 2) = (a[1] * a[5] - a[2] * a[4]) / d;
    r(1, 0) = (a[5] * a[6] - a[3] * a[8]) / d;
    r(1, 1) = (a[0] * a[8] - a[2] * a[6]) / d;
    r(1, 2) = (a[2] * a[3] - a[0] * a[5]) / d;
    r(2, 0) = (a[3] * a[7] - a[4] * a[6]) / d;
    r(2, 1) = (a[1] * a[6] - a[0] * a[7]) / d;
    r(2, 2) = (a[0] * a[4] - a[1] * a[3]) / d;
    return r;
  }
};

// Weights for the m-th derivative at x0 from values on the given nodes
// (Fornberg's recurrence). Exact for polynomials up to degree nodes-1.
inline std::vector<double> fd_weights(double x0, std::span<const double> x, int m) {
  const int nn = static_cast<int>(x.size());
  std::vector<double> d(static_cast<std::size_t>(nn) * static_cast<std::size_t>(m + 1), 0.0);
  auto D = [&](int i, int k) -> double& {
    return d[static_cast<std::size_t>(k * nn + i)];
  };
  double c1 = 1.0;
  double c4 = x[0] - x0;
  D(0, 0) = 1.0;
  for (int i = 1; i < nn; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[static_cast<std::size_t>(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          D(i, k) = c1 * (k * D(i - 1, k - 1) - c5 * D(i - 1, k)) / c2;
        D(i, 0) = -c1 * c5 * D(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) D(j, k) = (c4 * D(j, k) - k * D(j, k - 1)) / c3;
      D(j, 0) = c4 * D(j, 0) / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(nn));
  for (int i = 0; i < nn; ++i) w[static_cast<std::size_t>(i)] = D(i, m);
  return w;
}

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  LineFit f;
  const double vxx = sxx - sx * sx / n;
  const double vxy = sxy - sx * sy / n;
  const double vyy = syy - sy * sy / n;
  f.slope = vxy / vxx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r2 = vyy > 0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return f;
}

// Bisection on a bracketing interval [lo, hi] with f(lo) f(hi) <= 0, run to
// relative width rel_tol.
template <class F>
double bisect(F&& f, double lo, double hi, double rel_tol) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (f(hi) == 0.0) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) return mid;
    const double fm = f(mid);
    if ((flo < 0) == (fm < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Log-spaced values of (t - origin) from lo to hi inclusive.
inline std::vector<double> log_grid(double origin, double lo, double hi, double per_decade) {
  const double slo = std::log10(lo - origin);
  const double shi = std::log10(hi - origin);
  const int steps = std::max(1, static_cast<int>(std::ceil((shi - slo) * per_decade)));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    const double s = slo + (shi - slo) * i / steps;
    out.push_back(origin + std::pow(10.0, s));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

// Cubic Hermite value on [x0, x1] from endpoint values and derivatives.
inline double hermite_eval(double x0, double x1, double y0, double y1, double d0, double d1,
                           double x) {
  const double w = x1 - x0;
  const double s = (x - x0) / w;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * w * d0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * w * d1;
}

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace flrwc
