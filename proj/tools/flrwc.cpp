// flrwc: conjugate points and singularity conditions for FLRW geodesics.
//
// Subcommands: classify, conditions, geodesic, conjugate, reproduce-radiation.
// Exit codes: 0 success, 1 configuration error, 2 inconclusive verdict under
// --strict, 3 integrator or threshold failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "flrwc/conditions.hpp"
#include "flrwc/expression.hpp"
#include "flrwc/geodesic.hpp"
#include "flrwc/jacobi.hpp"
#include "flrwc/ode.hpp"
#include "flrwc/quadrature.hpp"
#include "flrwc/report.hpp"
#include "flrwc/scale_factor.hpp"

namespace {

using namespace flrwc;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file: " + cfg.out);
  f << text;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ScaleFactorModel build_model(const RunConfig& cfg) {
  if (cfg.family == "power-law") return ScaleFactorModel::power_law(cfg.epsilon, cfg.kappa, cfg.t1);
  if (cfg.family == "log-corrected")
    return ScaleFactorModel::log_corrected(cfg.epsilon, cfg.kappa, cfg.t1);
  if (cfg.family == "custom")
    return ScaleFactorModel::custom(cfg.expression, cfg.t0, cfg.t1, cfg.kappa);
  throw ConfigError("unknown family: " + cfg.family);
}

OdeOptions ode_options(const RunConfig& cfg) {
  OdeOptions o;
  o.rtol = cfg.tolerance;
  o.atol = cfg.tolerance * 1e-2;
  return o;
}

QuadratureControls quad_controls(const RunConfig& cfg) {
  QuadratureControls q;
  q.levels = cfg.levels;
  q.shrink = cfg.shrink;
  return q;
}

Family family_enum(const std::string& name) {
  if (name == "power-law") return Family::PowerLaw;
  if (name == "log-corrected") return Family::LogCorrected;
  return Family::Custom;
}

int thread_budget(int tuples) {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  if (const char* env = std::getenv("FLRWC_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) cap = std::min(cap, v);
  }
  return std::min(cap, tuples);
}

// Runs fn(i) for i in [0, count) across worker threads; results land by
// index, so emission order never depends on scheduling.
template <class Fn>
void parallel_for_index(int count, Fn&& fn) {
  const int workers = thread_budget(count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w]() {
      for (int i = w; i < count; i += workers) fn(i);
    });
  for (std::thread& th : pool) th.join();
}

int run_classify(const RunConfig& cfg) {
  const bool grid_mode = !cfg.epsilon_grid.empty() || !cfg.kappa_grid.empty();
  if (!grid_mode) {
    ClassificationVerdict v;
    if (cfg.family == "custom")
      v = classify(build_model(cfg), cfg.C, quad_controls(cfg));
    else
      v = classify(family_enum(cfg.family), cfg.epsilon, cfg.kappa, cfg.C);
    emit(cfg, dump(report_classification(cfg, v)));
    if (cfg.strict && (v.verdict25 == Verdict25::Inconclusive ||
                       v.verdict26 == Verdict26::Inconclusive))
      return 2;
    return 0;
  }

  if (cfg.family == "custom" && !cfg.epsilon_grid.empty())
    throw ConfigError("custom models take no epsilon grid");
  const std::vector<double> eps =
      cfg.epsilon_grid.empty() ? std::vector<double>{cfg.epsilon} : cfg.epsilon_grid;
  const std::vector<double> kap =
      cfg.kappa_grid.empty() ? std::vector<double>{cfg.kappa} : cfg.kappa_grid;

  const int count = static_cast<int>(eps.size() * kap.size());
  std::vector<ClassificationVerdict> rows(static_cast<std::size_t>(count));
  std::exception_ptr first_error;
  std::mutex err_mu;
  parallel_for_index(count, [&](int i) {
    const double e = eps[static_cast<std::size_t>(i) / kap.size()];
    const double k = kap[static_cast<std::size_t>(i) % kap.size()];
    try {
      if (cfg.family == "custom") {
        const ScaleFactorModel m =
            ScaleFactorModel::custom(cfg.expression, cfg.t0, cfg.t1, k);
        rows[static_cast<std::size_t>(i)] = classify(m, cfg.C, quad_controls(cfg));
      } else {
        rows[static_cast<std::size_t>(i)] = classify(family_enum(cfg.family), e, k, cfg.C);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mu);
      if (!first_error) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);

  emit(cfg, classification_grid_csv(rows));
  if (cfg.strict)
    for (const ClassificationVerdict& v : rows)
      if (v.verdict25 == Verdict25::Inconclusive || v.verdict26 == Verdict26::Inconclusive)
        return 2;
  return 0;
}

int run_conditions(const RunConfig& cfg) {
  const ScaleFactorModel model = build_model(cfg);
  TheoremInputs in{model, cfg.C, quad_controls(cfg)};
  const ConditionReport rep = decide_conditions(in);
  if (cfg.format == "csv") {
    std::string text = "t,I,Fplus\n";
    for (std::size_t k = 0; k < rep.t_values.size(); ++k)
      text += fmt17(rep.t_values[k]) + "," + fmt17(rep.I_values[k]) + "," +
              fmt17(rep.Fplus_values[k]) + "\n";
    emit(cfg, text);
  } else {
    emit(cfg, dump(report_conditions(cfg, rep)));
  }
  if (cfg.strict && (rep.verdict25 == Verdict25::Inconclusive ||
                     rep.verdict26 == Verdict26::Inconclusive))
    return 2;
  return 0;
}

int run_geodesic(const RunConfig& cfg) {
  const ScaleFactorModel model = build_model(cfg);
  const GeodesicSpec spec =
      GeodesicSpec::canonical(cfg.timelike ? NormClass::Timelike : NormClass::Null, cfg.C,
                              cfg.t_start, cfg.t_end);
  const GeodesicPath path = integrate_geodesic(model, spec, ode_options(cfg));
  if (cfg.format == "csv") {
    std::ostringstream os;
    path.write_csv(os);
    emit(cfg, os.str());
  } else {
    ordered_json j = make_report(cfg);
    j["verdicts"]["tau_anchored"] = path.tau_anchored();
    j["verdicts"]["x_anchored"] = path.x_anchored();
    j["evidence"]["samples"] = path.samples().size();
    j["evidence"]["tau_start"] = json_number(path.samples().front().tau);
    j["evidence"]["tau_end"] = json_number(path.samples().back().tau);
    emit(cfg, dump(j));
  }
  return 0;
}

int run_conjugate(const RunConfig& cfg) {
  if (!(cfg.t_start < cfg.t2)) throw ConfigError("conjugate scan needs t_start < t2");
  const ScaleFactorModel model = build_model(cfg);
  RunConfig eff = cfg;
  eff.t_end = std::max(cfg.t_end, cfg.t2);
  const GeodesicSpec spec =
      GeodesicSpec::canonical(cfg.timelike ? NormClass::Timelike : NormClass::Null, cfg.C,
                              cfg.t_start, eff.t_end);
  const GeodesicPath path = integrate_geodesic(model, spec, ode_options(cfg));
  const FrameField frame = transport_frame(path, ode_options(cfg));
  const std::vector<double> grid =
      jacobi_sample_grid(path.t0(), cfg.t_start, cfg.t2, 128.0);
  const JacobiRun run = integrate_jacobi_tensor(path, frame, cfg.t2, ode_options(cfg), grid);

  if (cfg.format == "csv") {
    if (cfg.out.empty()) throw ConfigError("the csv trace needs --out");
    std::ostringstream os;
    run.write_csv(os);
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + cfg.out);
    f << os.str();
  }

  try {
    const ConjugatePointReport rep = detect_conjugate(run, path);
    ordered_json j = report_conjugate(eff, rep, run);
    std::cout << dump(j);
    return 0;
  } catch (const InconclusiveTrend& e) {
    std::cout << dump(report_conjugate_inconclusive(eff, e.what()));
    return cfg.strict ? 2 : 0;
  }
}

int run_reproduce(const RunConfig& cfg) {
  const std::vector<RadiationCheck> checks = reproduce_radiation(cfg.t2, cfg.tolerance);
  emit(cfg, dump(report_radiation(cfg, checks)));
  for (const RadiationCheck& c : checks)
    if (!c.pass) return 3;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conjugate points along timelike and null geodesics approaching FLRW "
               "singularities"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config");

  RunConfig cfg;
  auto* family = app.add_option("--family", cfg.family, "power-law | log-corrected")
                     ->check(CLI::IsMember({"power-law", "log-corrected"}));
  auto* expr = app.add_option("--scale-factor", cfg.expression, "custom a(t) expression");
  auto* epsopt = app.add_option("--epsilon", cfg.epsilon, "family exponent parameter");
  app.add_option("--kappa", cfg.kappa, "spatial curvature sign (scalar combinations only)");
  app.add_option("--C", cfg.C, "conserved momentum magnitude");
  app.add_option("--t0", cfg.t0, "singularity time of a custom model");
  auto* t1opt = app.add_option("--t1", cfg.t1, "upper integration limit of the conditions");
  app.add_option("--t2", cfg.t2, "conjugate-point base time");
  app.add_option("--t-start", cfg.t_start, "first path sample time");
  app.add_option("--t-end", cfg.t_end, "last path sample time");
  auto* tl = app.add_flag("--timelike", "timelike normalization (default)");
  auto* nl = app.add_flag("--null", "null normalization");
  app.add_option("--levels", cfg.levels, "shrinking levels K for the condition integrals");
  app.add_option("--shrink", cfg.shrink, "shrink ratio r of the level sequence");
  app.add_option("--tolerance", cfg.tolerance, "ODE relative tolerance");
  app.add_option("--out", cfg.out, "output path (default stdout)");
  auto* fmt = app.add_option("--format", cfg.format, "json | csv")
                  ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--strict", cfg.strict, "exit 2 on inconclusive verdicts");
  app.add_option("--epsilon-grid", cfg.epsilon_grid, "classification grid over epsilon")
      ->delimiter(',');
  app.add_option("--kappa-grid", cfg.kappa_grid, "classification grid over kappa")
      ->delimiter(',');

  CLI::App* c_classify = app.add_subcommand("classify", "applicability of the theorem");
  CLI::App* c_conditions =
      app.add_subcommand("conditions", "evaluate the two integral conditions");
  CLI::App* c_geodesic = app.add_subcommand("geodesic", "integrate a geodesic path");
  CLI::App* c_conjugate = app.add_subcommand("conjugate", "scan for conjugate points");
  CLI::App* c_reproduce =
      app.add_subcommand("reproduce-radiation", "run the radiation-fluid worked example");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*nl && *tl) throw ConfigError("--timelike and --null are mutually exclusive");
    cfg.timelike = !*nl;

    if (expr->count() > 0) {
      if (family->count() > 0)
        throw ConfigError("--family and --scale-factor are mutually exclusive");
      cfg.family = "custom";
    }
    if (cfg.family != "custom" && epsopt->count() == 0 && cfg.epsilon_grid.empty() &&
        !*c_reproduce)
      throw ConfigError("--epsilon is required for the built-in families");
    if (t1opt->count() == 0)
      cfg.t1 = cfg.family == "log-corrected" ? 0.5 : 1.0;
    if (!(cfg.t1 > cfg.t0)) throw ConfigError("t1 must exceed t0");
    if (fmt->count() == 0 && *c_geodesic) cfg.format = "csv";
    // Resolved config embeds only the requested cap (0 = hardware), so the
    // emitted JSON does not vary with the host's core count.
    cfg.threads = 0;
    if (const char* env = std::getenv("FLRWC_THREADS")) cfg.threads = std::atoi(env);

    if (*c_classify) {
      cfg.subcommand = "classify";
      return run_classify(cfg);
    }
    if (*c_conditions) {
      cfg.subcommand = "conditions";
      return run_conditions(cfg);
    }
    if (*c_geodesic) {
      cfg.subcommand = "geodesic";
      return run_geodesic(cfg);
    }
    if (*c_conjugate) {
      cfg.subcommand = "conjugate";
      return run_conjugate(cfg);
    }
    cfg.subcommand = "reproduce-radiation";
    return run_reproduce(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const expr::SyntaxError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const expr::UnknownIdentifier& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const expr::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const UnsupportedChart& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const StepFailure& e) {
    std::cerr << "integrator failure: " << e.what() << "\n";
    return 3;
  } catch (const QuadratureFailure& e) {
    std::cerr << "integrator failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
}
