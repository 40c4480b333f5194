#include "flrwc/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flrwc/numerics.hpp"
#include "flrwc/quadrature.hpp"

namespace flrwc {

namespace {

void validate_inputs(const TheoremInputs& in) {
  if (!(in.C > 0.0)) throw std::invalid_argument("theorem inputs require C > 0");
  if (in.quad.levels < 8) throw std::invalid_argument("at least 8 shrinking levels required");
  if (!(in.quad.shrink > 1.0)) throw std::invalid_argument("shrink ratio must exceed 1");
}

// Level edges t_k = t0 + (t1-t0) r^{-k}, k = 0..K, returned ascending
// (index i holds t_{K-i}).
std::vector<double> level_edges(double t0, double t1, int K, double r) {
  std::vector<double> e(static_cast<std::size_t>(K) + 1);
  for (int j = 0; j <= K; ++j)
    e[static_cast<std::size_t>(K - j)] = t0 + (t1 - t0) * std::pow(r, -j);
  e.back() = t1;
  return e;
}

// Splits each interval at its geometric midpoint in t - t0. One GL16 panel
// per ratio-r interval is already near machine precision for power-type
// integrands; halving buys margin for the log-corrected family.
std::vector<double> subdivide(double t0, std::span<const double> edges) {
  std::vector<double> out;
  out.reserve(edges.size() * 2);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    out.push_back(edges[i]);
    out.push_back(t0 + std::sqrt((edges[i] - t0) * (edges[i + 1] - t0)));
  }
  out.push_back(edges.back());
  return out;
}

// Integral of max(f, 0) over [lo, hi]: bisect the sign changes seen on a
// geometric scan grid, then integrate f over the subintervals with positive
// midpoints.
template <class F>
double positive_part_integral(F&& f, double t0, double lo, double hi) {
  constexpr int kScan = 32;
  std::array<double, kScan + 1> x, v;
  const double wl = lo - t0, wh = hi - t0;
  for (int i = 0; i <= kScan; ++i) {
    x[static_cast<std::size_t>(i)] = t0 + wl * std::pow(wh / wl, double(i) / kScan);
    v[static_cast<std::size_t>(i)] = f(x[static_cast<std::size_t>(i)]);
  }
  x[0] = lo;
  x[kScan] = hi;

  std::vector<double> cuts{lo};
  for (int i = 0; i < kScan; ++i) {
    const std::size_t ui = static_cast<std::size_t>(i);
    if (v[ui] == 0.0 || v[ui] * v[ui + 1] >= 0.0) continue;
    cuts.push_back(bisect(f, x[ui], x[ui + 1], 1e-14));
  }
  cuts.push_back(hi);

  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    const double mid = t0 + std::sqrt((cuts[i] - t0) * (cuts[i + 1] - t0));
    if (f(mid) > 0.0) total += gl16_with_estimate(f, cuts[i], cuts[i + 1], nullptr);
  }
  return total;
}

struct IncrementAnalysis {
  bool enough = false;
  bool all_tiny = false;
  bool decaying = false;
  bool growing = false;  // fixed sign with ratios >= 0.99
  int sign = 0;
};

// Last 6 increments of the level sequence. Geometric decay of |D| means the
// sequence converges; fixed-sign increments with ratios pinned at or above 1
// mean log- or power-type divergence (log divergence gives exactly constant
// increments under geometric shrinking).
IncrementAnalysis analyze_increments(std::span<const double> v) {
  IncrementAnalysis a;
  if (v.size() < 7) return a;
  a.enough = true;
  double maxv = 0;
  for (double x : v) maxv = std::max(maxv, std::abs(x));
  const double floor = 1e-12 * std::max(1.0, maxv);

  std::array<double, 6> D{};
  const std::size_t n = v.size();
  for (int i = 0; i < 6; ++i)
    D[static_cast<std::size_t>(i)] = v[n - 6 + static_cast<std::size_t>(i)] -
                                     v[n - 7 + static_cast<std::size_t>(i)];

  a.all_tiny = true;
  for (double d : D) a.all_tiny = a.all_tiny && std::abs(d) <= floor;
  if (a.all_tiny) return a;

  bool decaying = true, growing = true, samesign = true;
  for (int i = 0; i + 1 < 6; ++i) {
    const double lo_ = D[static_cast<std::size_t>(i)], hi_ = D[static_cast<std::size_t>(i) + 1];
    const double alo = std::abs(lo_), ahi = std::abs(hi_);
    // Increments that have both sunk to the noise floor count as decayed; the
    // growth test runs on raw ratios so that steep divergences whose early
    // increments are small relative to the last are still recognized.
    const bool both_tiny = alo <= floor && ahi <= floor;
    const double ratio = alo > 0 ? ahi / alo : (ahi > 0 ? 1e300 : 0.0);
    decaying = decaying && (both_tiny || ratio <= 0.9);
    growing = growing && ratio >= 0.99;
    samesign = samesign && lo_ * hi_ > 0.0;
  }
  a.decaying = decaying;
  a.growing = growing && samesign;
  a.sign = D.back() > 0 ? 1 : -1;
  return a;
}

Verdict25 verdict25_from(const IncrementAnalysis& a, std::span<const double> v, double* limit) {
  if (!a.enough) return Verdict25::Inconclusive;
  if (a.all_tiny) {
    if (limit) *limit = v.back();
    return Verdict25::ConvergesFinite;
  }
  if (a.decaying) {
    if (limit) *limit = richardson_limit(v);
    return Verdict25::ConvergesFinite;
  }
  if (a.growing)
    return a.sign < 0 ? Verdict25::DivergesToMinusInfinity : Verdict25::DivergesToPlusInfinity;
  return Verdict25::Inconclusive;
}

}  // namespace

double f_of_t(const TheoremInputs& in, double t) {
  const ScaleFactorModel& m = in.model;
  return 3.0 * m.a_ddot(t) + (2.0 * in.C / m.a(t)) * m.curvature_bracket(t);
}

double fplus_of_t(const TheoremInputs& in, double t) { return std::max(f_of_t(in, t), 0.0); }

double fminus_of_t(const TheoremInputs& in, double t) { return std::max(-f_of_t(in, t), 0.0); }

double powerlaw_condition25_closed(double epsilon, double kappa, double t1, double t) {
  if (std::abs(epsilon - 1.0) < 1e-12 || std::abs(epsilon - 3.0) < 1e-12)
    throw std::invalid_argument("closed form is singular at epsilon = 1 and 3");
  const double p = 1.0 / epsilon;
  const double alpha = 1.0 / ((1.0 + epsilon) * std::pow(t1, p + 1.0)) -
                       (epsilon / (epsilon - 3.0)) * kappa / std::pow(t1, 3.0 * p - 1.0);
  const double term1 =
      (alpha * epsilon / (1.0 + epsilon)) * (std::pow(t1, p + 1.0) - std::pow(t, p + 1.0));
  const double term2 = -(1.0 / (1.0 + epsilon)) * std::log(t1 / t);
  const double ck = kappa * epsilon * epsilon / ((epsilon - 3.0) * (2.0 * epsilon - 2.0));
  const double term3 = ck * (std::pow(t1, 2.0 - 2.0 * p) - std::pow(t, 2.0 - 2.0 * p));
  return term1 + term2 + term3;
}

double condition25_integral(const TheoremInputs& in, double t) {
  validate_inputs(in);
  const ScaleFactorModel& m = in.model;
  const double t0 = m.t0(), t1 = m.t1();
  if (!(t0 < t && t < t1)) throw std::invalid_argument("condition integral needs t0 < t < t1");

  const double r = in.quad.shrink;
  std::vector<double> edges{t};
  for (int j = 0;; ++j) {
    const double e = t0 + (t1 - t0) * std::pow(r, -j);
    if (!(e > t)) break;
    edges.push_back(e);
  }
  std::sort(edges.begin(), edges.end());
  const std::vector<double> sub = subdivide(t0, edges);

  const auto inner_fn = [&](double x) { return m.curvature_bracket(x) / m.a(x); };
  const TailTable inner(inner_fn, sub);
  const auto outer_fn = [&](double x) { return m.a(x) * inner.from(x); };

  double err = 0;
  const double I = integrate_edges(outer_fn, sub, &err);
  if (err > in.quad.rel_tol * std::max(1.0, std::abs(I)))
    throw QuadratureFailure("condition-25 quadrature error estimate " + fmt17(err) +
                            " exceeds tolerance");
  return I;
}

ConditionReport decide_conditions(const TheoremInputs& in) {
  validate_inputs(in);
  const ScaleFactorModel& m = in.model;
  const double t0 = m.t0(), t1 = m.t1();
  const int K = in.quad.levels;
  const double r = in.quad.shrink;

  const std::vector<double> edges = level_edges(t0, t1, K, r);  // ascending, edges[0] = t_K
  const std::vector<double> sub = subdivide(t0, edges);

  const auto inner_fn = [&](double x) { return m.curvature_bracket(x) / m.a(x); };
  const auto alt_fn = [&](double x) {
    const double a = m.a(x), ad = m.a_dot(x);
    return (ad * ad - m.kappa()) / (a * a * a);
  };
  const TailTable inner(inner_fn, sub);
  const TailTable inner_alt(alt_fn, sub);
  const auto f_fn = [&](double x) { return f_of_t(in, x); };

  // Per-level contributions over [t_k, t_{k-1}] = [edges[K-k], edges[K-k+1]].
  std::vector<double> P25(static_cast<std::size_t>(K) + 1, 0.0);
  std::vector<double> Palt(static_cast<std::size_t>(K) + 1, 0.0);
  std::vector<double> Pf(static_cast<std::size_t>(K) + 1, 0.0);
  double err25 = 0;
  for (int k = 1; k <= K; ++k) {
    const double lo = edges[static_cast<std::size_t>(K - k)];
    const double hi = edges[static_cast<std::size_t>(K - k + 1)];
    const double mid = t0 + std::sqrt((lo - t0) * (hi - t0));
    double e1 = 0, e2 = 0;
    const auto outer25 = [&](double x) { return m.a(x) * inner.from(x); };
    const auto outer_alt = [&](double x) { return m.a(x) * inner_alt.from(x); };
    P25[static_cast<std::size_t>(k)] = gl16_with_estimate(outer25, lo, mid, &e1) +
                                       gl16_with_estimate(outer25, mid, hi, &e2);
    err25 += e1 + e2;
    Palt[static_cast<std::size_t>(k)] =
        gl16_with_estimate(outer_alt, lo, mid, nullptr) +
        gl16_with_estimate(outer_alt, mid, hi, nullptr);
    Pf[static_cast<std::size_t>(k)] = positive_part_integral(f_fn, t0, lo, hi);
  }

  ConditionReport rep;
  rep.t_values.resize(static_cast<std::size_t>(K) + 1);
  rep.I_values.assign(static_cast<std::size_t>(K) + 1, 0.0);
  rep.Fplus_values.assign(static_cast<std::size_t>(K) + 1, 0.0);
  std::vector<double> alt_values(static_cast<std::size_t>(K) + 1, 0.0);
  for (int k = 0; k <= K; ++k) {
    const std::size_t uk = static_cast<std::size_t>(k);
    rep.t_values[uk] = edges[static_cast<std::size_t>(K - k)];
    if (k > 0) {
      rep.I_values[uk] = rep.I_values[uk - 1] + P25[uk];
      rep.Fplus_values[uk] = rep.Fplus_values[uk - 1] + Pf[uk];
      alt_values[uk] = alt_values[uk - 1] + Palt[uk];
    }
  }

  double imax = 0;
  for (double v : rep.I_values) imax = std::max(imax, std::abs(v));
  if (err25 > in.quad.rel_tol * std::max(1.0, imax))
    throw QuadratureFailure("condition-25 quadrature error estimate " + fmt17(err25) +
                            " exceeds tolerance");

  // Prefer the power-law closed form where it exists; the numeric values must
  // agree with it or something is deeply wrong.
  if (m.family() == Family::PowerLaw && std::abs(m.epsilon() - 1.0) > 1e-12 &&
      std::abs(m.epsilon() - 3.0) > 1e-12) {
    for (int k = 0; k <= K; ++k) {
      const std::size_t uk = static_cast<std::size_t>(k);
      const double closed =
          powerlaw_condition25_closed(m.epsilon(), m.kappa(), t1, rep.t_values[uk]);
      if (std::abs(closed - rep.I_values[uk]) > 1e-5 * std::max(1.0, std::abs(closed)))
        throw QuadratureFailure("numeric condition-25 integral disagrees with the power-law "
                                "closed form at level " + std::to_string(k));
      rep.I_values[uk] = closed;
    }
    rep.source25 = VerdictSource::ClosedForm;
  }

  double limit = 0;
  const IncrementAnalysis a25 = analyze_increments(rep.I_values);
  rep.verdict25 = verdict25_from(a25, rep.I_values, &limit);
  if (rep.verdict25 == Verdict25::ConvergesFinite) rep.I_limit = limit;

  rep.alt_check = verdict25_from(analyze_increments(alt_values), alt_values, nullptr);

  // Condition 26. Shortcut: f strictly negative on the deepest 4 levels means
  // f+ has stopped contributing.
  bool all_negative = true;
  for (int k = K - 3; k <= K && all_negative; ++k) {
    const double lo = edges[static_cast<std::size_t>(K - k)];
    const double hi = edges[static_cast<std::size_t>(K - k + 1)];
    const double wl = lo - t0, wh = hi - t0;
    for (int i = 0; i <= 8 && all_negative; ++i) {
      const double x = t0 + wl * std::pow(wh / wl, double(i) / 8.0);
      all_negative = f_of_t(in, x) < 0.0;
    }
  }
  rep.f_negative_shortcut = all_negative;

  const IncrementAnalysis a26 = analyze_increments(rep.Fplus_values);
  const double alpha_raw = richardson_limit(rep.Fplus_values);
  if (all_negative || a26.all_tiny || a26.decaying) {
    if (alpha_raw >= -1e-10) {
      rep.verdict26 = Verdict26::FiniteNonnegativeLimit;
      rep.alpha_estimate = std::max(0.0, alpha_raw);
    }
  } else if (a26.growing && a26.sign > 0) {
    rep.verdict26 = Verdict26::Diverges;
  }

  rep.applicable = rep.verdict25 == Verdict25::DivergesToMinusInfinity &&
                   rep.verdict26 == Verdict26::FiniteNonnegativeLimit;
  return rep;
}

ClassificationVerdict classify(Family family, double epsilon, double kappa, double C) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("classification requires epsilon > 0");
  if (family == Family::Custom)
    throw std::invalid_argument("custom models classify via the model overload");

  ClassificationVerdict v;
  v.family = family;
  v.epsilon = epsilon;
  v.kappa = kappa;
  v.C = C;
  v.source = VerdictSource::PaperTable;

  const auto applies = [&v]() {
    v.decision = Decision::TheoremApplies;
    v.verdict25 = Verdict25::DivergesToMinusInfinity;
    v.verdict26 = Verdict26::FiniteNonnegativeLimit;
  };
  const auto fails25_plus = [&v]() {
    v.decision = Decision::TheoremFailsCondition25;
    v.verdict25 = Verdict25::DivergesToPlusInfinity;
    v.verdict26 = Verdict26::Diverges;
  };

  if (family == Family::PowerLaw) {
    if (epsilon > 1.0 || kappa == 0.0 || (epsilon < 1.0 && kappa > 0.0) ||
        (epsilon == 1.0 && kappa > -1.0)) {
      applies();
    } else if (epsilon == 1.0 && kappa == -1.0) {
      // Milne: flat spacetime, the condition integral converges to 0.
      v.decision = Decision::TheoremFailsCondition25;
      v.verdict25 = Verdict25::ConvergesFinite;
      v.verdict26 = Verdict26::FiniteNonnegativeLimit;
    } else {
      fails25_plus();
    }
    return v;
  }
  // Log-corrected list: epsilon >= 1 unconditionally, else kappa >= 0.
  if (epsilon >= 1.0 || kappa >= 0.0)
    applies();
  else
    fails25_plus();
  return v;
}

ClassificationVerdict classify(const ScaleFactorModel& model, double C, QuadratureControls quad) {
  if (model.family() != Family::Custom)
    return classify(model.family(), model.epsilon(), model.kappa(), C);

  TheoremInputs in{model, C, quad};
  const ConditionReport rep = decide_conditions(in);
  ClassificationVerdict v;
  v.family = Family::Custom;
  v.epsilon = 0;
  v.kappa = model.kappa();
  v.C = C;
  v.source = VerdictSource::Numeric;
  v.verdict25 = rep.verdict25;
  v.verdict26 = rep.verdict26;
  if (rep.verdict25 == Verdict25::Inconclusive || rep.verdict26 == Verdict26::Inconclusive)
    v.decision = Decision::OutsidePaperAnalysis;
  else if (rep.verdict25 != Verdict25::DivergesToMinusInfinity)
    v.decision = Decision::TheoremFailsCondition25;
  else if (rep.verdict26 != Verdict26::FiniteNonnegativeLimit)
    v.decision = Decision::TheoremFailsCondition26;
  else
    v.decision = Decision::TheoremApplies;
  return v;
}

std::vector<ResidualSample> raychaudhuri_residual(const JacobiRun& run, const GeodesicPath& path,
                                                  double t_lo, double t_hi,
                                                  int theta_sq_divisor) {
  const ScaleFactorModel& m = path.model();
  const double C = path.C();
  const NormClass cls = path.spec().normclass;
  const double n = theta_sq_divisor > 0 ? theta_sq_divisor : run.n;

  std::vector<const JacobiTensorState*> use;
  for (const JacobiTensorState& s : run.states)
    if (s.B_valid && s.t >= t_lo && s.t <= t_hi) use.push_back(&s);
  if (use.size() < 7)
    throw WindowTooSmall("fewer than 7 usable samples in the residual window");

  std::vector<ResidualSample> out;
  out.reserve(use.size());
  for (std::size_t i = 0; i < use.size(); ++i) {
    std::size_t s0 = i >= 2 ? i - 2 : 0;
    if (s0 + 5 > use.size()) s0 = use.size() - 5;
    std::array<double, 5> ts{}, th{};
    for (std::size_t j = 0; j < 5; ++j) {
      ts[j] = use[s0 + j]->tau;
      th[j] = use[s0 + j]->theta;
    }
    const std::vector<double> w = fd_weights(use[i]->tau, ts, 1);
    double thdot = 0;
    for (std::size_t j = 0; j < 5; ++j) thdot += w[j] * th[j];

    const double ric = -minus_ricci_uu(m, use[i]->t, C, cls);
    const double sig2 = use[i]->sigma_norm * use[i]->sigma_norm;
    const double th2n = use[i]->theta * use[i]->theta / n;
    const double raw = thdot + th2n + sig2 + ric;
    const double denom = std::max({1.0, std::abs(thdot), std::abs(ric), sig2, th2n});
    out.push_back({use[i]->t, use[i]->tau, std::abs(raw) / denom});
  }
  return out;
}

const char* to_string(Verdict25 v) {
  switch (v) {
    case Verdict25::DivergesToMinusInfinity: return "DivergesToMinusInfinity";
    case Verdict25::DivergesToPlusInfinity: return "DivergesToPlusInfinity";
    case Verdict25::ConvergesFinite: return "ConvergesFinite";
    case Verdict25::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* to_string(Verdict26 v) {
  switch (v) {
    case Verdict26::FiniteNonnegativeLimit: return "FiniteNonnegativeLimit";
    case Verdict26::Diverges: return "Diverges";
    case Verdict26::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* to_string(Decision d) {
  switch (d) {
    case Decision::TheoremApplies: return "TheoremApplies";
    case Decision::TheoremFailsCondition25: return "TheoremFailsCondition25";
    case Decision::TheoremFailsCondition26: return "TheoremFailsCondition26";
    case Decision::OutsidePaperAnalysis: return "OutsidePaperAnalysis";
  }
  return "?";
}

const char* to_string(VerdictSource s) {
  switch (s) {
    case VerdictSource::PaperTable: return "PaperTable";
    case VerdictSource::ClosedForm: return "ClosedForm";
    case VerdictSource::Numeric: return "Numeric";
  }
  return "?";
}

}  // namespace flrwc
