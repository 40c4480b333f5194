#include "flrwc/report.hpp"

#include <cmath>
#include <stdexcept>

#include "flrwc/geodesic.hpp"
#include "flrwc/geometry.hpp"
#include "flrwc/numerics.hpp"

namespace flrwc {

namespace {

const char* family_name(Family f) {
  switch (f) {
    case Family::PowerLaw: return "power-law";
    case Family::LogCorrected: return "log-corrected";
    case Family::Custom: return "custom";
  }
  return "?";
}

ordered_json number_array(std::span<const double> v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

ordered_json limit25_json(Verdict25 v, const std::optional<double>& limit) {
  switch (v) {
    case Verdict25::ConvergesFinite:
      return limit ? json_number(*limit) : ordered_json(nullptr);
    case Verdict25::DivergesToMinusInfinity: return ordered_json{{"diverges", "-inf"}};
    case Verdict25::DivergesToPlusInfinity: return ordered_json{{"diverges", "+inf"}};
    case Verdict25::Inconclusive: return ordered_json(nullptr);
  }
  return ordered_json(nullptr);
}

ordered_json alpha_json(Verdict26 v, const std::optional<double>& alpha) {
  switch (v) {
    case Verdict26::FiniteNonnegativeLimit:
      return alpha ? json_number(*alpha) : ordered_json(nullptr);
    case Verdict26::Diverges: return ordered_json{{"diverges", "+inf"}};
    case Verdict26::Inconclusive: return ordered_json(nullptr);
  }
  return ordered_json(nullptr);
}

}  // namespace

ordered_json json_number(double v) {
  if (std::isnan(v)) throw std::logic_error("NaN reached JSON emission");
  if (std::isinf(v)) return ordered_json{{"diverges", v > 0 ? "+inf" : "-inf"}};
  return ordered_json(v);
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j;
  j["version"] = kVersion;
  j["subcommand"] = cfg.subcommand;
  j["family"] = cfg.family;
  j["expression"] = cfg.expression;
  j["epsilon"] = json_number(cfg.epsilon);
  j["kappa"] = json_number(cfg.kappa);
  j["C"] = json_number(cfg.C);
  j["t0"] = json_number(cfg.t0);
  j["t1"] = json_number(cfg.t1);
  j["t2"] = json_number(cfg.t2);
  j["t_start"] = json_number(cfg.t_start);
  j["t_end"] = json_number(cfg.t_end);
  j["normclass"] = cfg.timelike ? "timelike" : "null";
  j["levels"] = cfg.levels;
  j["shrink"] = json_number(cfg.shrink);
  j["tolerance"] = json_number(cfg.tolerance);
  j["out"] = cfg.out;
  j["format"] = cfg.format;
  j["strict"] = cfg.strict;
  j["epsilon_grid"] = number_array(cfg.epsilon_grid);
  j["kappa_grid"] = number_array(cfg.kappa_grid);
  j["threads"] = cfg.threads;
  return j;
}

ordered_json make_report(const RunConfig& cfg) {
  ordered_json j;
  j["config"] = config_json(cfg);
  j["verdicts"] = ordered_json::object();
  j["evidence"] = ordered_json::object();
  j["checks"] = ordered_json::object();
  return j;
}

ordered_json report_classification(const RunConfig& cfg, const ClassificationVerdict& v) {
  ordered_json j = make_report(cfg);
  j["verdicts"]["decision"] = to_string(v.decision);
  j["verdicts"]["verdict25"] = to_string(v.verdict25);
  j["verdicts"]["verdict26"] = to_string(v.verdict26);
  j["verdicts"]["applicable"] = v.decision == Decision::TheoremApplies;
  j["verdicts"]["source"] = to_string(v.source);
  j["evidence"]["family"] = family_name(v.family);
  j["evidence"]["epsilon"] = json_number(v.epsilon);
  j["evidence"]["kappa"] = json_number(v.kappa);
  j["evidence"]["C"] = json_number(v.C);
  return j;
}

ordered_json report_conditions(const RunConfig& cfg, const ConditionReport& rep) {
  ordered_json j = make_report(cfg);
  j["verdicts"]["verdict25"] = to_string(rep.verdict25);
  j["verdicts"]["verdict26"] = to_string(rep.verdict26);
  j["verdicts"]["applicable"] = rep.applicable;
  j["verdicts"]["source25"] = to_string(rep.source25);
  j["evidence"]["t_values"] = number_array(rep.t_values);
  j["evidence"]["I_values"] = number_array(rep.I_values);
  j["evidence"]["Fplus_values"] = number_array(rep.Fplus_values);
  j["evidence"]["I_limit"] = limit25_json(rep.verdict25, rep.I_limit);
  j["evidence"]["alpha"] = alpha_json(rep.verdict26, rep.alpha_estimate);
  j["checks"]["f_negative_shortcut"] = rep.f_negative_shortcut;
  // The rewritten inner integrand implies condition 25 whenever it stays off
  // +infinity; a conclusive alt verdict without the matching 25 verdict is a
  // contradiction worth surfacing.
  const bool alt_conclusive = rep.alt_check == Verdict25::ConvergesFinite ||
                              rep.alt_check == Verdict25::DivergesToMinusInfinity;
  j["checks"]["alt_check"] = to_string(rep.alt_check);
  j["checks"]["alt_check_consistent"] =
      !alt_conclusive || rep.verdict25 == Verdict25::DivergesToMinusInfinity;
  return j;
}

ordered_json report_conjugate(const RunConfig& cfg, const ConjugatePointReport& rep,
                              const JacobiRun& run) {
  ordered_json j = make_report(cfg);
  ordered_json events = ordered_json::array();
  for (const ConjugateEvent& e : rep.events) {
    ordered_json ev;
    ev["kind"] = e.kind == ConjugateKind::InteriorZero ? "InteriorZero" : "SingularLimit";
    ev["t_conj"] = json_number(e.t_conj);
    ev["detA_evidence"] = json_number(e.detA_evidence);
    ev["jacobi_norm_evidence"] = json_number(e.jacobi_norm_evidence);
    events.push_back(ev);
  }
  j["verdicts"]["events"] = events;
  j["verdicts"]["trend_state"] =
      rep.trend_state == ConjugatePointReport::Trend::Confirmed ? "Confirmed" : "None";
  j["evidence"]["t2"] = json_number(rep.t2);
  j["evidence"]["tau2"] = json_number(run.tau2);
  j["evidence"]["n"] = run.n;
  j["evidence"]["trend"] = {{"slope", json_number(rep.trend.slope)},
                            {"r2", json_number(rep.trend.r2)},
                            {"monotone", rep.trend.monotone},
                            {"points", rep.trend.points}};
  double omega_max = 0;
  bool kernel_all = true;
  for (const JacobiTensorState& s : run.states) {
    if (s.B_valid) omega_max = std::max(omega_max, s.omega_norm);
    kernel_all = kernel_all && s.kernel_ok;
  }
  j["checks"]["max_omega_norm"] = json_number(omega_max);
  j["checks"]["kernel_ok"] = kernel_all;
  j["checks"]["max_R_asymmetry"] = json_number(run.max_R_asymmetry);
  j["checks"]["max_screen_mixing"] = json_number(run.max_screen_mixing);
  return j;
}

ordered_json report_conjugate_inconclusive(const RunConfig& cfg, const std::string& what) {
  ordered_json j = make_report(cfg);
  j["verdicts"]["events"] = ordered_json::array();
  j["verdicts"]["trend_state"] = "Inconclusive";
  j["evidence"]["detail"] = what;
  return j;
}

std::string classification_grid_csv(std::span<const ClassificationVerdict> grid) {
  std::string out = "family,epsilon,kappa,C,verdict25,verdict26,applicable,source\n";
  for (const ClassificationVerdict& v : grid) {
    out += family_name(v.family);
    out += ',';
    out += fmt17(v.epsilon);
    out += ',';
    out += fmt17(v.kappa);
    out += ',';
    out += fmt17(v.C);
    out += ',';
    out += to_string(v.verdict25);
    out += ',';
    out += to_string(v.verdict26);
    out += ',';
    out += v.decision == Decision::TheoremApplies ? "true" : "false";
    out += ',';
    out += to_string(v.source);
    out += '\n';
  }
  return out;
}

std::vector<RadiationCheck> reproduce_radiation(double t2, double tolerance) {
  const ScaleFactorModel model = ScaleFactorModel::power_law(2.0, 0.0);
  OdeOptions opts;
  opts.rtol = tolerance;
  opts.atol = tolerance * 1e-2;

  const double t_lo = 1e-8 * t2;
  const double t_end = std::max(10.0, 2.0 * t2);
  const GeodesicSpec spec = GeodesicSpec::canonical(NormClass::Timelike, 1.0, t_lo, t_end);
  const GeodesicPath path = integrate_geodesic(model, spec, opts);

  double tau_err = 0;
  for (const PathSample& s : path.samples())
    tau_err = std::max(tau_err, std::abs(s.tau - radiation_closed_forms(s.t, t2).tau));

  const FrameField frame = transport_frame(path, opts);
  // Below ~1e-6 t2 the metric contraction alone costs C/a^2 ulps ~ 1e-8, so
  // the drift window starts there.
  double ortho = 0;
  for (std::size_t k = 0; k < frame.times().size(); ++k) {
    const double t = frame.times()[k];
    if (t < 1e-6 * t2) continue;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = mu; nu < 4; ++nu) {
        const double g = metric_dot(model, t, frame.sample(k, mu), frame.sample(k, nu));
        const double eta = mu == nu ? (mu == 0 ? -1.0 : 1.0) : 0.0;
        ortho = std::max(ortho, std::abs(g - eta));
      }
  }

  const std::vector<double> grid = jacobi_sample_grid(0.0, t_lo, t2, 320.0);
  const JacobiRun run = integrate_jacobi_tensor(path, frame, t2, opts, grid);
  double h3_err = 0;
  for (const JacobiTensorState& s : run.states)
    h3_err = std::max(h3_err, std::abs(s.A(2, 2) / std::sqrt(s.t) -
                                       radiation_closed_forms(s.t, t2).h3));

  double res_sup = 0;
  for (const ResidualSample& r : raychaudhuri_residual(run, path, 0.01 * t2, 0.9 * t2))
    res_sup = std::max(res_sup, r.residual);

  double slope = 0;
  bool trend_ok = false;
  try {
    const ConjugatePointReport rep = detect_conjugate(run, path);
    slope = rep.trend.slope;
    int singular = 0, interior = 0;
    for (const ConjugateEvent& e : rep.events)
      (e.kind == ConjugateKind::SingularLimit ? singular : interior)++;
    trend_ok = rep.trend_state == ConjugatePointReport::Trend::Confirmed && singular == 1 &&
               interior == 0;
  } catch (const InconclusiveTrend&) {
  }

  std::vector<RadiationCheck> checks;
  checks.push_back({"tau_max_abs_err", tau_err, 1e-8, tau_err <= 1e-8});
  checks.push_back({"h3_max_abs_err", h3_err, 1e-6, h3_err <= 1e-6});
  checks.push_back({"frame_orthonormality_drift", ortho, 1e-8, ortho <= 1e-8});
  checks.push_back({"raychaudhuri_residual_sup", res_sup, 1e-6, res_sup <= 1e-6});
  checks.push_back({"detA_trend_slope", slope, 0.5, trend_ok && slope >= 0.5});
  return checks;
}

ordered_json report_radiation(const RunConfig& cfg, std::span<const RadiationCheck> checks) {
  ordered_json j = make_report(cfg);
  bool all = true;
  ordered_json rows = ordered_json::array();
  for (const RadiationCheck& c : checks) {
    all = all && c.pass;
    rows.push_back({{"name", c.name},
                    {"value", json_number(c.value)},
                    {"threshold", json_number(c.threshold)},
                    {"pass", c.pass}});
  }
  j["verdicts"]["pass"] = all;
  j["checks"]["thresholds"] = rows;
  return j;
}

}  // namespace flrwc
