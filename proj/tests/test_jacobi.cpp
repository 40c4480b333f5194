#include <cmath>
#include <vector>

#include "doctest.h"
#include "flrwc/jacobi.hpp"

using namespace flrwc;

namespace {

// Independent closed forms for a = sqrt(t), C = 1: the boosted spatial leg
// and the transverse Jacobi components vanishing at t2.
Vec4 boost_leg_oracle(double t) {
  const double a = std::sqrt(t);
  return Vec4{{1.0 / a, std::sqrt(1.0 + a * a) / (a * a), 0, 0}};
}
double h3_oracle(double t, double t2) {
  return -2.0 * std::sqrt(t2) * (std::asinh(std::sqrt(t2)) - std::asinh(std::sqrt(t)));
}
double h3bar_oracle(double t, double t2) {
  return -2.0 * std::sqrt(t2) * (std::sqrt(t2) - std::sqrt(t));
}

struct Setup {
  GeodesicPath path;
  FrameField frame;
};

Setup make(NormClass cls, double t_start = 1e-6, double t_end = 10.0) {
  const ScaleFactorModel m = ScaleFactorModel::power_law(2.0, 0.0);
  const GeodesicSpec spec = GeodesicSpec::canonical(cls, 1.0, t_start, t_end);
  GeodesicPath path = integrate_geodesic(m, spec);
  FrameField frame = transport_frame(path);
  return {std::move(path), std::move(frame)};
}

}  // namespace

TEST_CASE("transported timelike frame matches its closed forms") {
  const Setup s = make(NormClass::Timelike);
  const ScaleFactorModel& m = s.path.model();
  for (std::size_t k = 0; k < s.frame.times().size(); ++k) {
    const double t = s.frame.times()[k];
    const double a = m.a(t);
    const Vec4 u{{std::sqrt(1.0 + a * a) / a, 1.0 / (a * a), 0, 0}};
    const Vec4 E0 = s.frame.sample(k, 0);
    const Vec4 E1 = s.frame.sample(k, 1);
    const Vec4 E2 = s.frame.sample(k, 2);
    const Vec4 want = boost_leg_oracle(t);
    for (int c = 0; c < 4; ++c) {
      CHECK(E0[c] == doctest::Approx(u[c]).epsilon(1e-13).scale(std::abs(u[0]) + 1));
      CHECK(E1[c] ==
            doctest::Approx(want[c]).epsilon(1e-8).scale(std::abs(want[1]) + 1));
    }
    CHECK(E2[0] == 0.0);
    CHECK(E2[2] == doctest::Approx(1.0 / a).epsilon(1e-9));
  }
}

TEST_CASE("frame stays orthonormal where the metric contraction is well posed") {
  const Setup s = make(NormClass::Timelike);
  const ScaleFactorModel& m = s.path.model();
  double drift = 0;
  for (std::size_t k = 0; k < s.frame.times().size(); ++k) {
    const double t = s.frame.times()[k];
    if (t < 1e-4) continue;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = mu; nu < 4; ++nu) {
        const double eta = mu != nu ? 0.0 : (mu == 0 ? -1.0 : 1.0);
        drift = std::max(drift, std::abs(metric_dot(m, t, s.frame.sample(k, mu),
                                                    s.frame.sample(k, nu)) -
                                         eta));
      }
  }
  CHECK(drift < 1e-9);
}

TEST_CASE("null screen legs are comoving, orthonormal, and tangent-orthogonal") {
  const Setup s = make(NormClass::Null);
  const ScaleFactorModel& m = s.path.model();
  for (std::size_t k = 0; k < s.frame.times().size(); k += 100) {
    const double t = s.frame.times()[k];
    const double a = m.a(t);
    const Vec4 u{{std::sqrt(1.0) / a, 1.0 / (a * a), 0, 0}};
    const Vec4 E2 = s.frame.sample(k, 2);
    const Vec4 E3 = s.frame.sample(k, 3);
    CHECK(std::abs(E2[2] * a - 1.0) < 1e-9);
    CHECK(std::abs(E3[3] * a - 1.0) < 1e-9);
    CHECK(std::abs(metric_dot(m, t, E2, E3)) < 1e-10);
    CHECK(std::abs(metric_dot(m, t, E2, u)) < 1e-9);
    CHECK(std::abs(metric_dot(m, t, E3, u)) < 1e-9);
  }
  CHECK(s.frame.nlegs() == 2);
  CHECK_THROWS_AS(s.frame.at(1.0, 0), std::out_of_range);
}

TEST_CASE("transverse tensor entries match the timelike closed form") {
  const Setup s = make(NormClass::Timelike, 1e-8);
  const double t2 = 1.0;
  const std::vector<double> grid = jacobi_sample_grid(0.0, 1e-8, t2, 320.0);
  const JacobiRun run = integrate_jacobi_tensor(s.path, s.frame, t2, {}, grid);
  double err = 0, offdiag = 0;
  for (const JacobiTensorState& st : run.states) {
    err = std::max(err, std::abs(st.A(1, 1) / std::sqrt(st.t) - h3_oracle(st.t, t2)));
    err = std::max(err, std::abs(st.A(2, 2) / std::sqrt(st.t) - h3_oracle(st.t, t2)));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) offdiag = std::max(offdiag, std::abs(st.A(i, j)));
  }
  CHECK(err < 1e-8);
  CHECK(offdiag < 1e-10);  // the run never mixes the diagonal frame
  CHECK(run.tau2 == doctest::Approx(0.5328399753535521).epsilon(1e-12));
  CHECK(run.max_R_asymmetry < 1e-12);
  for (const JacobiTensorState& st : run.states) CHECK(st.kernel_ok);
}

TEST_CASE("screen tensor entries match the null closed form") {
  const Setup s = make(NormClass::Null, 1e-8);
  const double t2 = 1.0;
  const std::vector<double> grid = jacobi_sample_grid(0.0, 1e-8, t2, 320.0);
  const JacobiRun run = integrate_jacobi_tensor(s.path, s.frame, t2, {}, grid);
  CHECK(run.n == 2);
  double err = 0;
  for (const JacobiTensorState& st : run.states) {
    err = std::max(err, std::abs(st.A(0, 0) / std::sqrt(st.t) - h3bar_oracle(st.t, t2)));
    err = std::max(err, std::abs(st.A(1, 1) / std::sqrt(st.t) - h3bar_oracle(st.t, t2)));
  }
  CHECK(err < 1e-8);
  CHECK(run.tau2 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(run.max_screen_mixing < 1e-12);
  // det Abar tends to 4 t2^2 t: linear vanishing at the singularity.
  const JacobiTensorState& lo = run.states.front();
  CHECK(lo.detA == doctest::Approx(4.0 * lo.t).epsilon(1e-3));
}

TEST_CASE("determinant leaves t2 as the cube of the proper-time gap") {
  const Setup s = make(NormClass::Timelike, 1e-6);
  const std::vector<double> grid = jacobi_sample_grid(0.0, 1e-6, 1.0, 64.0);
  const JacobiRun run = integrate_jacobi_tensor(s.path, s.frame, 1.0, {}, grid);
  std::size_t checked = 0;
  for (const JacobiTensorState& st : run.states) {
    const double gap = st.tau - run.tau2;
    if (std::abs(gap) > 1e-3 || gap == 0.0) continue;
    CHECK(st.detA == doctest::Approx(gap * gap * gap).epsilon(5e-3));
    ++checked;
  }
  CHECK(checked >= 8);
}

TEST_CASE("evolution preserves the symplectic pairing and stays rotation-free") {
  const Setup s = make(NormClass::Timelike, 1e-8);
  const std::vector<double> grid = jacobi_sample_grid(0.0, 1e-8, 1.0, 64.0);
  const JacobiRun run = integrate_jacobi_tensor(s.path, s.frame, 1.0, {}, grid);
  for (const JacobiTensorState& st : run.states) {
    // W = DA^T A - A^T DA vanishes identically for symmetric curvature.
    const MatN W = st.DA.transposed() * st.A - st.A.transposed() * st.DA;
    const double scale = std::max(1.0, st.A.frobenius() * st.DA.frobenius());
    CHECK(W.frobenius() / scale < 1e-10);
    if (st.B_valid) CHECK(st.omega_norm < 1e-10);
  }
}

TEST_CASE("radiation run reports one singular event and no interior zeros") {
  const Setup s = make(NormClass::Timelike, 1e-8);
  const std::vector<double> grid = jacobi_sample_grid(0.0, 1e-8, 1.0, 320.0);
  const JacobiRun run = integrate_jacobi_tensor(s.path, s.frame, 1.0, {}, grid);
  const ConjugatePointReport rep = detect_conjugate(run, s.path);
  REQUIRE(rep.events.size() == 1);
  CHECK(rep.events[0].kind == ConjugateKind::SingularLimit);
  CHECK(rep.trend_state == ConjugatePointReport::Trend::Confirmed);
  CHECK(rep.trend.slope > 0.9);
  CHECK(rep.trend.slope < 1.1);
  CHECK(rep.trend.r2 > 0.999);
  CHECK(rep.events[0].jacobi_norm_evidence ==
        doctest::Approx(3.1065725e-8).epsilon(0.01));
}

TEST_CASE("runs that stay away from the singularity report nothing") {
  const Setup s = make(NormClass::Timelike, 0.3, 2.0);
  const JacobiRun run = integrate_jacobi_tensor(s.path, s.frame, 1.0);
  const ConjugatePointReport rep = detect_conjugate(run, s.path);
  CHECK(rep.events.empty());
  CHECK(rep.trend_state == ConjugatePointReport::Trend::None);
}

TEST_CASE("an interior sign change is located and classified") {
  const Setup s = make(NormClass::Timelike, 1e-6);
  JacobiRun run;
  run.t2 = 1.0;
  run.n = 2;
  run.normclass = NormClass::Timelike;
  for (double t : {0.2, 0.4, 0.6, 0.8}) {
    JacobiTensorState st;
    st.t = t;
    st.tau = s.path.tau_at(t);
    st.A = MatN::identity(2);
    st.DA = MatN::identity(2);
    st.detA = t < 0.5 ? 1.0 - t : -t;  // flips sign between 0.4 and 0.6
    run.states.push_back(st);
  }
  const ConjugatePointReport rep = detect_conjugate(run, s.path);
  REQUIRE(rep.events.size() == 1);
  CHECK(rep.events[0].kind == ConjugateKind::InteriorZero);
  CHECK(rep.events[0].t_conj > 0.4);
  CHECK(rep.events[0].t_conj < 0.6);
}

TEST_CASE("a noisy vanishing trend is refused rather than certified") {
  const Setup s = make(NormClass::Timelike, 1e-6);
  JacobiRun run;
  run.t2 = 1.0;
  run.n = 2;
  run.normclass = NormClass::Timelike;
  for (int k = 0; k <= 12; ++k) {
    JacobiTensorState st;
    st.t = 1e-8 * std::pow(4.0, k);
    st.tau = s.path.tau_at(std::max(st.t, 1e-6));
    st.A = MatN::identity(2);
    st.DA = MatN::identity(2);
    st.detA = st.t * (k == 3 ? 25.0 : 1.0);  // one bump breaks monotonicity
    run.states.push_back(st);
  }
  CHECK_THROWS_AS(detect_conjugate(run, s.path), InconclusiveTrend);
}

TEST_CASE("tensor integration validates its inputs") {
  const Setup tl = make(NormClass::Timelike, 1e-4, 2.0);
  const Setup nl = make(NormClass::Null, 1e-4, 2.0);
  CHECK_THROWS_AS(integrate_jacobi_tensor(tl.path, nl.frame, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate_jacobi_tensor(tl.path, tl.frame, 5.0), std::invalid_argument);
  const std::vector<double> bad_order = {0.5, 0.3};
  CHECK_THROWS_AS(integrate_jacobi_tensor(tl.path, tl.frame, 1.0, {}, bad_order),
                  std::invalid_argument);
  const std::vector<double> outside = {-0.5, 0.3};
  CHECK_THROWS_AS(integrate_jacobi_tensor(tl.path, tl.frame, 1.0, {}, outside),
                  std::invalid_argument);
}

TEST_CASE("sample grid is dense at both ends and strictly ascending") {
  const std::vector<double> g = jacobi_sample_grid(0.0, 1e-8, 1.0, 64.0);
  CHECK(g.front() == doctest::Approx(1e-8).epsilon(1e-12));
  CHECK(g.back() > 1.0 - 2e-6);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  // Right-end refinement: a sample within 2e-6 of t2.
  CHECK(1.0 - g.back() < 2e-6);
  CHECK_THROWS_AS(jacobi_sample_grid(0.0, 0.5, 0.1, 64.0), std::invalid_argument);
}
