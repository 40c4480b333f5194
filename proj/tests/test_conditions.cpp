#include <cmath>
#include <vector>

#include "doctest.h"
#include "flrwc/conditions.hpp"
#include "flrwc/quadrature.hpp"

using namespace flrwc;

namespace {

TheoremInputs inputs(ScaleFactorModel m, double C = 1.0) {
  TheoremInputs in{std::move(m), C, {}};
  return in;
}

// Double integral for a = (t/t1)^p-style power laws with flat sections,
// derived by hand from the antiderivatives of t^(-2-p) and t^(p-1).
double flat_I_oracle(double eps, double t1, double t) {
  const double p = 1.0 / eps;
  return p / ((1 + p) * (1 + p)) * (1.0 - std::pow(t / t1, 1 + p)) -
         p / (1 + p) * std::log(t1 / t);
}

}  // namespace

TEST_CASE("focusing density for the radiation background") {
  const TheoremInputs in = inputs(ScaleFactorModel::power_law(2.0, 0.0));
  CHECK(f_of_t(in, 1.0) == doctest::Approx(-1.75).epsilon(1e-15));
  // f equals a times the tangent Ricci contraction when kappa = 0.
  for (double t : {0.05, 0.3, 1.0, 2.4}) {
    const double via_ricci =
        in.model.a(t) * minus_ricci_uu(in.model, t, in.C, NormClass::Timelike);
    CHECK(f_of_t(in, t) == doctest::Approx(via_ricci).epsilon(1e-14));
  }
}

TEST_CASE("positive and negative parts partition f") {
  const TheoremInputs decel = inputs(ScaleFactorModel::power_law(2.0, 0.0));
  const TheoremInputs mixed = inputs(ScaleFactorModel::power_law(0.5, -1.0));
  for (const TheoremInputs& in : {decel, mixed}) {
    for (double t : {0.02, 0.13, 0.7, 0.97}) {
      const double f = f_of_t(in, t);
      const double fp = fplus_of_t(in, t);
      const double fm = fminus_of_t(in, t);
      CHECK(fp >= 0.0);
      CHECK(fm >= 0.0);
      CHECK(fp - fm == f);
      CHECK(fp * fm == 0.0);
    }
  }
}

TEST_CASE("numeric double integral agrees with the hand-derived flat form") {
  for (double eps : {0.5, 2.0, 4.0}) {
    const TheoremInputs in = inputs(ScaleFactorModel::power_law(eps, 0.0));
    for (double t : {1e-4, 1e-2, 0.3}) {
      CHECK(condition25_integral(in, t) ==
            doctest::Approx(flat_I_oracle(eps, 1.0, t)).epsilon(1e-8));
    }
  }
}

TEST_CASE("library closed form matches quadrature off the flat section") {
  for (double eps : {0.5, 2.0, 4.0}) {
    for (double kappa : {-1.0, 0.0, 1.0}) {
      const TheoremInputs in = inputs(ScaleFactorModel::power_law(eps, kappa));
      const double got = powerlaw_condition25_closed(eps, kappa, 1.0, 1e-3);
      CHECK(condition25_integral(in, 1e-3) == doctest::Approx(got).epsilon(1e-7));
    }
  }
  CHECK_THROWS_AS(powerlaw_condition25_closed(1.0, 0.0, 1.0, 1e-3), std::invalid_argument);
  CHECK_THROWS_AS(powerlaw_condition25_closed(3.0, 0.5, 1.0, 1e-3), std::invalid_argument);
}

TEST_CASE("radiation verdicts: logarithmic divergence down, finite alpha") {
  const ConditionReport rep = decide_conditions(inputs(ScaleFactorModel::power_law(2.0, 0.0)));
  CHECK(rep.verdict25 == Verdict25::DivergesToMinusInfinity);
  CHECK(rep.verdict26 == Verdict26::FiniteNonnegativeLimit);
  CHECK(rep.applicable);
  CHECK(rep.source25 == VerdictSource::ClosedForm);
  CHECK(rep.f_negative_shortcut);  // f < 0 everywhere here
  REQUIRE(rep.alpha_estimate.has_value());
  CHECK(*rep.alpha_estimate == 0.0);
  CHECK(!rep.I_limit.has_value());
  // Per-level increments settle on -log(shrink)/3.
  const std::size_t k = rep.I_values.size();
  REQUIRE(k >= 6);
  for (std::size_t j = k - 5; j < k; ++j) {
    CHECK(rep.I_values[j] - rep.I_values[j - 1] ==
          doctest::Approx(-std::log(4.0) / 3.0).epsilon(1e-6));
  }
  // The partial-integration diagnostic diverges upward here, so it cannot
  // certify anything, and that is the expected state.
  CHECK(rep.alt_check == Verdict25::DivergesToPlusInfinity);
}

TEST_CASE("the marginal linear model with negative curvature is exactly flat") {
  const ConditionReport rep = decide_conditions(inputs(ScaleFactorModel::power_law(1.0, -1.0)));
  CHECK(rep.verdict25 == Verdict25::ConvergesFinite);
  CHECK(rep.verdict26 == Verdict26::FiniteNonnegativeLimit);
  CHECK(!rep.applicable);
  for (double v : rep.I_values) CHECK(std::abs(v) < 1e-9);
  REQUIRE(rep.I_limit.has_value());
  CHECK(std::abs(*rep.I_limit) < 1e-9);
  REQUIRE(rep.alpha_estimate.has_value());
  CHECK(*rep.alpha_estimate == 0.0);
}

TEST_CASE("steep curvature-driven divergence is caught as growth") {
  const ConditionReport rep = decide_conditions(inputs(ScaleFactorModel::power_law(0.5, -1.0)));
  CHECK(rep.verdict25 == Verdict25::DivergesToPlusInfinity);
  CHECK(rep.verdict26 == Verdict26::Diverges);
  CHECK(!rep.applicable);
}

TEST_CASE("applicability table over the built-in families") {
  struct Row {
    Family fam;
    double eps, kappa;
    Decision want;
  };
  const std::vector<Row> rows = {
      {Family::PowerLaw, 2.0, 0.0, Decision::TheoremApplies},
      {Family::PowerLaw, 2.0, 1.0, Decision::TheoremApplies},
      {Family::PowerLaw, 2.0, -1.0, Decision::TheoremApplies},
      {Family::PowerLaw, 0.5, 1.0, Decision::TheoremApplies},
      {Family::PowerLaw, 0.5, 0.0, Decision::TheoremApplies},
      {Family::PowerLaw, 0.5, -1.0, Decision::TheoremFailsCondition25},
      {Family::PowerLaw, 1.0, -0.5, Decision::TheoremApplies},
      {Family::PowerLaw, 1.0, -1.0, Decision::TheoremFailsCondition25},
      {Family::LogCorrected, 1.0, -1.0, Decision::TheoremApplies},
      {Family::LogCorrected, 2.0, 1.0, Decision::TheoremApplies},
      {Family::LogCorrected, 0.5, 0.0, Decision::TheoremApplies},
      {Family::LogCorrected, 0.5, -1.0, Decision::TheoremFailsCondition25},
  };
  for (const Row& r : rows) {
    const ClassificationVerdict v = classify(r.fam, r.eps, r.kappa);
    CHECK(v.decision == r.want);
    CHECK(v.source == VerdictSource::PaperTable);
    if (r.want == Decision::TheoremApplies) {
      CHECK(v.verdict25 == Verdict25::DivergesToMinusInfinity);
      CHECK(v.verdict26 == Verdict26::FiniteNonnegativeLimit);
    }
  }
  // The marginal failing case converges instead of diverging upward.
  const ClassificationVerdict milne = classify(Family::PowerLaw, 1.0, -1.0);
  CHECK(milne.verdict25 == Verdict25::ConvergesFinite);
  const ClassificationVerdict steep = classify(Family::PowerLaw, 0.5, -1.0);
  CHECK(steep.verdict25 == Verdict25::DivergesToPlusInfinity);
  CHECK(steep.verdict26 == Verdict26::Diverges);

  CHECK_THROWS_AS(classify(Family::PowerLaw, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(classify(Family::Custom, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("model-level classification routes built-ins to the table") {
  const ClassificationVerdict v = classify(ScaleFactorModel::power_law(2.0, 0.0));
  CHECK(v.decision == Decision::TheoremApplies);
  CHECK(v.source == VerdictSource::PaperTable);
}

TEST_CASE("custom models classify numerically and match the equivalent power law") {
  const ScaleFactorModel m = ScaleFactorModel::custom("t^(1/3)", 0.0, 1.0);
  const ClassificationVerdict v = classify(m);
  CHECK(v.decision == Decision::TheoremApplies);
  CHECK(v.source == VerdictSource::Numeric);
  CHECK(v.verdict25 == Verdict25::DivergesToMinusInfinity);
  CHECK(v.verdict26 == Verdict26::FiniteNonnegativeLimit);
}

TEST_CASE("quadrature failure surfaces instead of a silent wrong verdict") {
  TheoremInputs in = inputs(ScaleFactorModel::log_corrected(1.0, 0.0));
  in.quad.rel_tol = 0.0;  // no error estimate can satisfy this
  CHECK_THROWS_AS(condition25_integral(in, 1e-4), QuadratureFailure);
}

TEST_CASE("raychaudhuri residual is small for both tangent classes") {
  const ScaleFactorModel m = ScaleFactorModel::power_law(2.0, 0.0);
  for (NormClass cls : {NormClass::Timelike, NormClass::Null}) {
    const GeodesicSpec spec = GeodesicSpec::canonical(cls, 1.0, 1e-6, 10.0);
    const GeodesicPath path = integrate_geodesic(m, spec);
    const FrameField frame = transport_frame(path);
    const std::vector<double> grid = jacobi_sample_grid(0.0, 1e-6, 1.0, 320.0);
    const JacobiRun run = integrate_jacobi_tensor(path, frame, 1.0, {}, grid);

    double sup = 0;
    for (const ResidualSample& r : raychaudhuri_residual(run, path, 0.01, 0.9))
      sup = std::max(sup, r.residual);
    CHECK(sup < 1e-6);

    // Wrong expansion divisor: residual must blow past the pass band.
    const int wrong = cls == NormClass::Timelike ? 2 : 3;
    double sup_bad = 0;
    for (const ResidualSample& r : raychaudhuri_residual(run, path, 0.01, 0.9, wrong))
      sup_bad = std::max(sup_bad, r.residual);
    CHECK(sup_bad > 1e-2);

    CHECK_THROWS_AS(raychaudhuri_residual(run, path, 0.5, 0.5000001), WindowTooSmall);
  }
}

TEST_CASE("verdict labels render for reports") {
  CHECK(std::string(to_string(Verdict25::DivergesToMinusInfinity)) ==
        "DivergesToMinusInfinity");
  CHECK(std::string(to_string(Verdict26::FiniteNonnegativeLimit)) == "FiniteNonnegativeLimit");
  CHECK(std::string(to_string(Decision::TheoremApplies)) == "TheoremApplies");
  CHECK(std::string(to_string(VerdictSource::ClosedForm)) == "ClosedForm");
}
