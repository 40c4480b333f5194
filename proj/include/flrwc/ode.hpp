// Adaptive Dormand-Prince 5(4) integrator over flat double spans.
//
// The integrator object keeps its accepted step size across advance() calls,
// so driving a system through a dense output grid costs no restarts.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flrwc {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  long max_steps = 2'000'000;
};

struct StepFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// rhs(t, y, dydt) with y and dydt of equal fixed size.
using OdeRhs = std::function<void(double, std::span<const double>, std::span<double>)>;

namespace detail {
// Dormand-Prince coefficients (the RK5(4)7M pair).
inline constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double kB5[7] = {35.0 / 384,      0.0,  500.0 / 1113, 125.0 / 192,
                                  -2187.0 / 6784, 11.0 / 84, 0.0};
inline constexpr double kB4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695, 393.0 / 640,
                                  -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
}  // namespace detail

// One fixed Dormand-Prince step from (t, y) with size h; y is updated with the
// 5th-order result. Used by tests to probe the classical convergence order.
inline void rk_step(const OdeRhs& rhs, double t, double h, std::span<double> y) {
  using namespace detail;
  const std::size_t dim = y.size();
  std::vector<double> k(7 * dim), tmp(dim);
  rhs(t, y, std::span<double>(k.data(), dim));
  for (int s = 1; s < 7; ++s) {
    for (std::size_t i = 0; i < dim; ++i) {
      double acc = y[i];
      for (int j = 0; j < s; ++j)
        acc += h * kA[s][j] * k[static_cast<std::size_t>(j) * dim + i];
      tmp[i] = acc;
    }
    rhs(t + kC[s] * h, tmp, std::span<double>(k.data() + static_cast<std::size_t>(s) * dim, dim));
  }
  for (std::size_t i = 0; i < dim; ++i) {
    double acc = 0;
    for (int s = 0; s < 7; ++s) acc += kB5[s] * k[static_cast<std::size_t>(s) * dim + i];
    y[i] += h * acc;
  }
}

class AdaptiveRK {
 public:
  explicit AdaptiveRK(OdeOptions opts = {}) : opts_(opts) {}

  // Integrates y from t_from to t_to in place. Keeps the last accepted step
  // size for the next call. Direction may be positive or negative.
  void advance(const OdeRhs& rhs, double t_from, double t_to, std::span<double> y) {
    if (t_from == t_to) return;
    const double dir = t_to > t_from ? 1.0 : -1.0;
    const std::size_t dim = y.size();
    resize(dim);

    double t = t_from;
    double h = h_ == 0.0 ? dir * std::abs(t_to - t_from) / 100.0 : dir * std::abs(h_);
    h = dir * std::min(std::abs(h), std::abs(t_to - t_from));

    rhs(t, y, stage(0));
    for (long step = 0; step < opts_.max_steps; ++step) {
      if (dir * (t - t_to) >= 0) {
        h_ = std::abs(h);
        return;
      }
      // A full-span step can land an ulp short of t_to when t_from + (t_to -
      // t_from) does not round back to t_to; that residue is arrival, not a
      // collapsed step.
      if (std::abs(t_to - t) <=
          32 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), std::abs(t_to)) +
              1e-300) {
        h_ = std::abs(h);
        return;
      }
      if (dir * (t + h - t_to) > 0) h = t_to - t;
      if (!(std::abs(h) > std::abs(t) * 1e-15 + 1e-300))
        throw StepFailure("step size underflow at t=" + std::to_string(t));

      using namespace detail;
      for (int s = 1; s < 7; ++s) {
        for (std::size_t i = 0; i < dim; ++i) {
          double acc = y[i];
          for (int j = 0; j < s; ++j) acc += h * kA[s][j] * stage(j)[i];
          tmp_[i] = acc;
        }
        rhs(t + kC[s] * h, tmp_, stage(s));
      }
      double err = 0;
      for (std::size_t i = 0; i < dim; ++i) {
        double y5 = 0, y4 = 0;
        for (int s = 0; s < 7; ++s) {
          y5 += kB5[s] * stage(s)[i];
          y4 += kB4[s] * stage(s)[i];
        }
        y5 = y[i] + h * y5;
        y4 = y[i] + h * y4;
        const double sc = opts_.atol + opts_.rtol * std::max(std::abs(y[i]), std::abs(y5));
        const double e = (y5 - y4) / sc;
        err += e * e;
        tmp_[i] = y5;
      }
      err = std::sqrt(err / static_cast<double>(dim));

      if (err <= 1.0) {
        t += h;
        std::copy(tmp_.begin(), tmp_.end(), y.begin());
        // FSAL: stage 6 was evaluated at (t+h, y_new).
        std::copy(stage(6).begin(), stage(6).end(), stage(0).begin());
        const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
        h *= grow;
      } else {
        // stage(0) still holds rhs(t, y); only the step size changes.
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      }
    }
    throw StepFailure("max step count exceeded at t=" + std::to_string(t));
  }

  void reset_step() { h_ = 0.0; }

 private:
  void resize(std::size_t dim) {
    if (k_.size() != 7 * dim) {
      k_.assign(7 * dim, 0.0);
      tmp_.assign(dim, 0.0);
      h_ = 0.0;
    }
  }
  std::span<double> stage(int s) {
    const std::size_t dim = tmp_.size();
    return {k_.data() + static_cast<std::size_t>(s) * dim, dim};
  }

  OdeOptions opts_;
  std::vector<double> k_, tmp_;
  double h_ = 0.0;
};

}  // namespace flrwc
