// Report emission: resolved run configuration, deterministic JSON documents
// with the fixed key order {"config", "verdicts", "evidence", "checks"}, and
// the CSV grid emitter. Floats serialize as shortest round-trip decimals;
// non-finite values never reach JSON, divergent quantities carry a
// {"diverges": "+inf"|"-inf"} tag instead.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "flrwc/conditions.hpp"
#include "flrwc/jacobi.hpp"

namespace flrwc {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

// Everything a run needs, after merging config file, defaults, and flags.
struct RunConfig {
  std::string subcommand;
  std::string family = "power-law";  // power-law | log-corrected | custom
  std::string expression;            // custom scale factor a(t)
  double epsilon = 2.0;
  double kappa = 0.0;
  double C = 1.0;
  double t0 = 0.0;  // custom models only; built-ins pin their own
  double t1 = -1.0;  // -1: family default (1 power-law, 0.5 log-corrected)
  double t2 = 1.0;
  double t_start = 1e-6;
  double t_end = 10.0;
  bool timelike = true;
  int levels = 14;
  double shrink = 4.0;
  double tolerance = 1e-10;  // ODE relative tolerance
  std::string out;           // empty: stdout
  std::string format = "json";
  bool strict = false;
  std::vector<double> epsilon_grid, kappa_grid;
  int threads = 0;  // requested worker cap; 0 defers to the hardware
};

// Finite v as a JSON number; +/-inf as the divergence tag. NaN is a logic
// error upstream and throws.
ordered_json json_number(double v);

ordered_json config_json(const RunConfig& cfg);

// Skeleton {"config": ..., "verdicts": {}, "evidence": {}, "checks": {}}.
ordered_json make_report(const RunConfig& cfg);

ordered_json report_classification(const RunConfig& cfg, const ClassificationVerdict& v);
ordered_json report_conditions(const RunConfig& cfg, const ConditionReport& rep);
ordered_json report_conjugate(const RunConfig& cfg, const ConjugatePointReport& rep,
                              const JacobiRun& run);
// The InconclusiveTrend outcome still produces a document.
ordered_json report_conjugate_inconclusive(const RunConfig& cfg, const std::string& what);

// "family,epsilon,kappa,C,verdict25,verdict26,applicable,source", one row per
// verdict, 17 significant digits.
std::string classification_grid_csv(std::span<const ClassificationVerdict> grid);

// One named threshold check of the worked-example reproduction.
struct RadiationCheck {
  std::string name;
  double value = 0;
  double threshold = 0;
  bool pass = false;
};

// Runs the radiation-fluid worked example (power law epsilon=2, kappa=0,
// C=1, timelike) end to end: geodesic vs closed-form tau, the transverse
// Jacobi component vs its closed form, frame orthonormality drift, the
// Raychaudhuri residual, and the det A singular trend. `tolerance` is the
// ODE relative tolerance; thresholds do not move with it.
std::vector<RadiationCheck> reproduce_radiation(double t2, double tolerance);

ordered_json report_radiation(const RunConfig& cfg, std::span<const RadiationCheck> checks);

}  // namespace flrwc
