#include <cmath>
#include <sstream>

#include "doctest.h"
#include "flrwc/geodesic.hpp"

using namespace flrwc;

namespace {

// tau and x^1 for a = sqrt(t), kappa = 0, C = 1, timelike, both anchored at
// the singularity. Written out here independently of the library routine.
double tau_oracle(double t) { return std::sqrt(t + t * t) - std::asinh(std::sqrt(t)); }
double x1_oracle(double t) { return 2.0 * std::asinh(std::sqrt(t)); }

GeodesicPath radiation_path(double t_start = 1e-6, double t_end = 10.0) {
  const ScaleFactorModel m = ScaleFactorModel::power_law(2.0, 0.0);
  const GeodesicSpec spec = GeodesicSpec::canonical(NormClass::Timelike, 1.0, t_start, t_end);
  return integrate_geodesic(m, spec);
}

}  // namespace

TEST_CASE("radiation proper time and comoving distance against closed forms") {
  const GeodesicPath path = radiation_path();
  CHECK(path.tau_anchored());
  CHECK(path.x_anchored());
  double tau_err = 0, x_err = 0;
  for (const PathSample& s : path.samples()) {
    tau_err = std::max(tau_err, std::abs(s.tau - tau_oracle(s.t)));
    x_err = std::max(x_err, std::abs(s.x[0] - x1_oracle(s.t)));
  }
  CHECK(tau_err < 1e-9);
  CHECK(x_err < 1e-9);
  CHECK(path.tau_at(1.0) == doctest::Approx(0.5328399753535521).epsilon(1e-12));
  CHECK(path.state_at(1.0).x[0] == doctest::Approx(1.7627471740390860).epsilon(1e-12));
}

TEST_CASE("interpolated states agree with the oracle between grid nodes") {
  const GeodesicPath path = radiation_path();
  for (double t : {3.14e-5, 0.000777, 0.0123, 0.456, 2.22, 7.89}) {
    const PathSample s = path.state_at(t);
    CHECK(std::abs(s.tau - tau_oracle(t)) < 1e-9);
    CHECK(std::abs(s.x[0] - x1_oracle(t)) < 1e-9);
  }
}

TEST_CASE("velocity comes from the conserved momenta, not integration") {
  const GeodesicPath path = radiation_path();
  const ScaleFactorModel& m = path.model();
  for (const PathSample& s : path.samples()) {
    const double a = m.a(s.t);
    CHECK(s.u0 == doctest::Approx(std::sqrt(1.0 + a * a) / a).epsilon(1e-15));
    CHECK(s.u[0] * a * a == doctest::Approx(1.0).epsilon(1e-15));  // a^2 u^1 = C_1
    CHECK(s.u[1] == 0.0);
    CHECK(s.u[2] == 0.0);
  }
}

TEST_CASE("tangent norm holds along timelike and null paths") {
  const ScaleFactorModel m = ScaleFactorModel::power_law(2.0, 0.0);
  for (NormClass cls : {NormClass::Timelike, NormClass::Null}) {
    const GeodesicSpec spec = GeodesicSpec::canonical(cls, 1.0, 1e-6, 10.0);
    const GeodesicPath path = integrate_geodesic(m, spec);
    const double want = cls == NormClass::Timelike ? -1.0 : 0.0;
    for (const PathSample& s : path.samples()) {
      const Vec4 u{{s.u0, s.u[0], s.u[1], s.u[2]}};
      CHECK(std::abs(metric_dot(m, s.t, u, u) - want) < 1e-9);
    }
  }
}

TEST_CASE("proper time increases strictly along the sample grid") {
  const GeodesicPath path = radiation_path();
  const auto& S = path.samples();
  for (std::size_t k = 1; k < S.size(); ++k) CHECK(S[k].tau > S[k - 1].tau);
}

TEST_CASE("null path on a linear scale factor, tau anchored but x not") {
  // a = t: dtau/dt = t converges at 0, dx/dt = 1/t^2 does not.
  const ScaleFactorModel m = ScaleFactorModel::power_law(1.0, 0.0);
  const GeodesicSpec spec = GeodesicSpec::canonical(NormClass::Null, 1.0, 1e-4, 2.0);
  const GeodesicPath path = integrate_geodesic(m, spec);
  CHECK(path.tau_anchored());
  CHECK(!path.x_anchored());
  CHECK(path.samples().front().x[0] == 0.0);  // measured from t_start instead
  for (const PathSample& s : path.samples())
    CHECK(s.tau == doctest::Approx(0.5 * s.t * s.t).epsilon(1e-8));
}

TEST_CASE("zero velocity perturbation produces a zero variation field") {
  const ScaleFactorModel m = ScaleFactorModel::power_law(2.0, 0.0);
  const GeodesicSpec spec = GeodesicSpec::canonical(NormClass::Timelike, 1.0, 1e-4, 1.0);
  const std::vector<double> offsets = {-0.4, -0.2, -0.05};
  const auto samples = vary_geodesic(m, spec, Vec4{}, 1e-4, offsets);
  REQUIRE(samples.size() == offsets.size());
  for (const VariationSample& v : samples)
    for (int c = 0; c < 4; ++c) CHECK(std::abs(v.delta[c]) < 1e-10);
}

TEST_CASE("csv export uses the documented header") {
  const GeodesicPath path = radiation_path(1e-3, 2.0);
  std::ostringstream os;
  path.write_csv(os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "tau,t,x1,x2,x3,u0,u1,u2,u3");
  std::size_t lines = 0;
  for (std::string line; std::getline(is, line);) ++lines;
  CHECK(lines == path.samples().size());
}

TEST_CASE("spec validation rejects unusable inputs") {
  const ScaleFactorModel flat = ScaleFactorModel::power_law(2.0, 0.0);
  const ScaleFactorModel curved = ScaleFactorModel::power_law(2.0, 1.0);
  GeodesicSpec spec = GeodesicSpec::canonical(NormClass::Timelike, 1.0, 0.1, 1.0);
  CHECK_THROWS_AS(integrate_geodesic(curved, spec), UnsupportedChart);
  CHECK_THROWS_AS(GeodesicSpec::canonical(NormClass::Timelike, 0.0, 0.1, 1.0),
                  std::invalid_argument);
  spec.t_start = -0.5;  // below the singularity at t0 = 0
  CHECK_THROWS_AS(integrate_geodesic(flat, spec), std::invalid_argument);
  spec.t_start = 0.1;
  spec.Ci = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(integrate_geodesic(flat, spec), std::invalid_argument);
}
