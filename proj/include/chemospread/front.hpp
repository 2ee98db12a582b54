#pragma once

// Decay-vs-persistence classification in the comoving frame, bisection for
// the spreading speed and the critical chemotaxis sensitivity, and
// level-set front tracking on fixed-frame snapshot series.
//
// Verdicts combine instantaneous thresholds with trend evidence over the
// dwell window (the last part of the run). The trend terms are needed
// because marginal frame speeds |c - 2 sqrt(a)| ~ 0.01 leave transients at
// T = 500 that no instantaneous threshold separates: a persisting front
// first recedes (logarithmic-in-t delay) before reclaiming the window,
// while a decaying state can still hold an O(1) remnant plateau near the
// upstream wall. Sustained front retreat or exponential collapse of the
// maximum certifies decay; a held center or a held plateau with no retreat
// certifies persistence. Calibrated margins to the thresholds are >= 1.6x
// on both sides at h = 0.1 and h = 0.05 for the reproduced experiments.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chemospread/fit.hpp"
#include "chemospread/model.hpp"
#include "chemospread/snapshot.hpp"
#include "chemospread/stepper.hpp"

namespace chemospread {

enum class Verdict { Decayed, Persisted, Undetermined };

/** Which rule produced the verdict. */
enum class VerdictBasis {
  EarlyExit,      // max u fell below eps_exit mid-run
  MaxBelowEps,    // final max u < eps_decay
  RetreatTrend,   // sustained front retreat over the dwell window
  CollapseTrend,  // sustained exponential decline of max u
  CenterHeld,     // center window above delta_persist through the dwell window
  PlateauHeld,    // final max u > delta_persist and no retreat
  None
};

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Decayed: return "Decayed";
    case Verdict::Persisted: return "Persisted";
    default: return "Undetermined";
  }
}

inline const char* to_string(VerdictBasis b) {
  switch (b) {
    case VerdictBasis::EarlyExit: return "EarlyExit";
    case VerdictBasis::MaxBelowEps: return "MaxBelowEps";
    case VerdictBasis::RetreatTrend: return "RetreatTrend";
    case VerdictBasis::CollapseTrend: return "CollapseTrend";
    case VerdictBasis::CenterHeld: return "CenterHeld";
    case VerdictBasis::PlateauHeld: return "PlateauHeld";
    default: return "None";
  }
}

struct ClassifyOptions {
  double eps_exit = 1e-8;       // early-exit level for max u
  double eps_decay = 1e-4;      // final max u below this => Decayed
  double delta_persist = 0.1;   // persistence level
  double center_window = 2.0;   // half-width W of the center window
  double dwell_fraction = 0.2;  // dwell window = last fraction of T
  long check_stride = 50;       // steps between condition checks

  // Trend calibration (see header comment).
  double drift_threshold = -0.012;    // front-toe drift certifying retreat
  double collapse_threshold = -3e-3;  // d(log max u)/dt certifying collapse
  double toe_level_fraction = 1e-3;   // toe level as fraction of (a/b)^(1/sigma)
};

struct Outcome {
  Verdict verdict = Verdict::Undetermined;
  VerdictBasis basis = VerdictBasis::None;
  double final_max_u = 0.0;
  double center_min_u = 0.0;  // min of u over |x| <= W at final time
  double decision_time = 0.0;
  double front_drift = std::numeric_limits<double>::quiet_NaN();
  double logmax_slope = std::numeric_limits<double>::quiet_NaN();
  RunStats stats;
  long steps_done = 0;
};

namespace detail {

struct CheckPoint {
  double t, max_u, center_min, toe_x;
  bool has_toe;
};

inline double center_min(const FieldState& s, const GridSpec& g, double W) {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= g.M; ++i)
    if (std::abs(g.x(i)) <= W) m = std::min(m, s.u[i]);
  return m;
}

inline std::pair<bool, double> toe_position(const FieldState& s, const GridSpec& g,
                                            double level) {
  for (int i = g.M; i >= 0; --i)
    if (s.u[i] >= level) return {true, g.x(i)};
  return {false, 0.0};
}

}  // namespace detail

/**
 * Runs the comoving simulation and classifies the end state. Early exit
 * only on the decay side (max u < eps_exit); persistence requires its
 * condition to hold at every check inside the dwell window, which ends at
 * the horizon. BlowUpError propagates.
 */
inline Outcome classify(const ModelParams& p, const GridSpec& g,
                        const InitialData& init,
                        const ClassifyOptions& opt = {},
                        const std::vector<Observer>& observers = {}) {
  {
    auto rep = validate(p, g);
    if (!rep.ok()) throw std::invalid_argument("classify: " + rep.errors.front());
  }
  const double toe_level = opt.toe_level_fraction * p.carrying_capacity();

  std::vector<detail::CheckPoint> checks;
  checks.reserve(static_cast<std::size_t>(g.steps() / std::max<long>(1, opt.check_stride)) + 2);

  Outcome out;
  RunOptions ro;
  ro.check_stride = opt.check_stride;
  ro.stats = &out.stats;
  ro.stop = [&](const FieldState& s) {
    detail::CheckPoint cp;
    cp.t = s.t;
    cp.max_u = s.max_u();
    cp.center_min = detail::center_min(s, g, opt.center_window);
    auto toe = detail::toe_position(s, g, toe_level);
    cp.has_toe = toe.first;
    cp.toe_x = toe.second;
    checks.push_back(cp);
    return cp.max_u < opt.eps_exit;
  };

  FieldState fin = run(sample_initial(init, g), p, g, observers, ro);
  out.steps_done = fin.step_index;
  out.decision_time = fin.t;
  out.final_max_u = fin.max_u();
  out.center_min_u = detail::center_min(fin, g, opt.center_window);

  if (out.final_max_u < opt.eps_exit && fin.step_index < g.steps()) {
    out.verdict = Verdict::Decayed;
    out.basis = VerdictBasis::EarlyExit;
    return out;
  }

  const double dwell_start = fin.t - opt.dwell_fraction * g.T - 1e-12;
  std::vector<double> wt, wmax, wtoe, wlog;
  bool toe_everywhere = true, center_held = true;
  for (const auto& cp : checks) {
    if (cp.t < dwell_start) continue;
    wt.push_back(cp.t);
    wmax.push_back(cp.max_u);
    wlog.push_back(std::log(std::max(cp.max_u, 1e-300)));
    if (cp.has_toe)
      wtoe.push_back(cp.toe_x);
    else
      toe_everywhere = false;
    if (!(cp.center_min > opt.delta_persist)) center_held = false;
  }
  const bool window_usable = wt.size() >= 2;

  if (window_usable && center_held && out.center_min_u > opt.delta_persist) {
    out.verdict = Verdict::Persisted;
    out.basis = VerdictBasis::CenterHeld;
    return out;
  }
  if (out.final_max_u < opt.eps_decay) {
    out.verdict = Verdict::Decayed;
    out.basis = VerdictBasis::MaxBelowEps;
    return out;
  }
  if (!window_usable) return out;  // Undetermined: nothing to fit

  if (toe_everywhere && wtoe.size() == wt.size())
    out.front_drift = linear_fit(wt, wtoe).slope;
  out.logmax_slope = linear_fit(wt, wlog).slope;

  if (std::isfinite(out.front_drift) && out.front_drift < opt.drift_threshold) {
    out.verdict = Verdict::Decayed;
    out.basis = VerdictBasis::RetreatTrend;
    return out;
  }
  if (std::isfinite(out.logmax_slope) && out.logmax_slope < opt.collapse_threshold) {
    out.verdict = Verdict::Decayed;
    out.basis = VerdictBasis::CollapseTrend;
    return out;
  }
  if (out.final_max_u > opt.delta_persist) {
    out.verdict = Verdict::Persisted;
    out.basis = VerdictBasis::PlateauHeld;
    return out;
  }
  return out;  // Undetermined
}

/** Bisection failed its endpoint preconditions. */
struct BracketError : std::runtime_error {
  std::optional<Outcome> lo_outcome, hi_outcome;
  explicit BracketError(const std::string& msg,
                        std::optional<Outcome> lo = std::nullopt,
                        std::optional<Outcome> hi = std::nullopt)
      : std::runtime_error(msg), lo_outcome(std::move(lo)), hi_outcome(std::move(hi)) {}
};

struct BisectOptions {
  ClassifyOptions cls;
  double long_T = 1000.0;        // horizon for marginal probes
  double marginal_width = 0.1;   // bracket width at which probes switch to long_T
};

struct SpeedEstimate {
  double lower = 0.0;   // largest c classified Persisted
  double upper = 0.0;   // smallest c classified Decayed
  double tolerance = 0.0;
  bool undetermined_seen = false;
  std::vector<std::pair<double, Outcome>> probes;
};

namespace detail {
/** Probe horizon rule: marginal probes (narrow bracket) run longer. */
inline GridSpec probe_grid(const GridSpec& g, double width, const BisectOptions& o) {
  GridSpec pg = g;
  if (width <= o.marginal_width && o.long_T > g.T) pg.T = o.long_T;
  return pg;
}
}  // namespace detail

/**
 * Bisects the frame speed between a Persisted probe at c_lo and a Decayed
 * probe at c_hi. Undetermined probes shrink the bracket toward the decayed
 * side (the certified-persisted lower bound never inflates).
 */
inline SpeedEstimate bisect_speed(ModelParams base, const GridSpec& g,
                                  const InitialData& init, double c_lo,
                                  double c_hi, double tol,
                                  const BisectOptions& opt = {}) {
  if (!(c_lo < c_hi)) throw BracketError("bisect_speed: empty bracket");
  if (!(tol > 0.0)) throw BracketError("bisect_speed: tolerance must be positive");

  SpeedEstimate est;
  est.tolerance = tol;
  auto probe = [&](double c, double width) {
    ModelParams p = base;
    p.c = c;
    Outcome o = classify(p, detail::probe_grid(g, width, opt), init, opt.cls);
    est.probes.emplace_back(c, o);
    return o;
  };
  const double inf = std::numeric_limits<double>::infinity();
  Outcome lo_o = probe(c_lo, inf);
  Outcome hi_o = probe(c_hi, inf);
  if (lo_o.verdict != Verdict::Persisted || hi_o.verdict != Verdict::Decayed)
    throw BracketError(
        std::string("bisect_speed: endpoints invalid (lo ") + to_string(lo_o.verdict) +
            ", hi " + to_string(hi_o.verdict) + ")",
        lo_o, hi_o);

  double lo = c_lo, hi = c_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    Outcome o = probe(mid, hi - lo);
    if (o.verdict == Verdict::Persisted) {
      lo = mid;
    } else {
      if (o.verdict == Verdict::Undetermined) est.undetermined_seen = true;
      hi = mid;
    }
  }
  est.lower = lo;
  est.upper = hi;
  return est;
}

struct ChiBracket {
  double lower = 0.0;  // largest chi classified Decayed
  double upper = 0.0;  // smallest chi classified Persisted
  double tolerance = 0.0;
  bool undetermined_seen = false;
  std::vector<std::pair<double, Outcome>> probes;
};

/**
 * Bisects the chemotaxis sensitivity at fixed frame speed c_probe between
 * a Decayed probe at chi_lo and a Persisted probe at chi_hi.
 */
inline ChiBracket bisect_chi_star(ModelParams base, const GridSpec& g,
                                  const InitialData& init, double c_probe,
                                  double chi_lo, double chi_hi, double tol,
                                  const BisectOptions& opt = {}) {
  if (!(chi_lo < chi_hi)) throw BracketError("bisect_chi_star: empty bracket");
  if (!(tol > 0.0)) throw BracketError("bisect_chi_star: tolerance must be positive");

  ChiBracket est;
  est.tolerance = tol;
  auto probe = [&](double chi, double width) {
    ModelParams p = base;
    p.chi = chi;
    p.c = c_probe;
    Outcome o = classify(p, detail::probe_grid(g, width, opt), init, opt.cls);
    est.probes.emplace_back(chi, o);
    return o;
  };
  const double inf = std::numeric_limits<double>::infinity();
  Outcome lo_o = probe(chi_lo, inf);
  Outcome hi_o = probe(chi_hi, inf);
  if (lo_o.verdict != Verdict::Decayed || hi_o.verdict != Verdict::Persisted)
    throw BracketError(
        std::string("bisect_chi_star: endpoints invalid (lo ") + to_string(lo_o.verdict) +
            ", hi " + to_string(hi_o.verdict) + ")",
        lo_o, hi_o);

  double lo = chi_lo, hi = chi_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    Outcome o = probe(mid, hi - lo);
    if (o.verdict == Verdict::Persisted) {
      hi = mid;
    } else {
      if (o.verdict == Verdict::Undetermined) est.undetermined_seen = true;
      lo = mid;
    }
  }
  est.lower = lo;
  est.upper = hi;
  return est;
}

/** Front position left the trusted region (too close to the cut-off). */
struct FrontAtBoundary : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FrontTrack {
  std::vector<double> times;      // snapshot times with a detected front
  std::vector<double> positions;  // x_f(t), largest x with u >= theta
  double speed = std::numeric_limits<double>::quiet_NaN();
  double decay_rate = std::numeric_limits<double>::quiet_NaN();
};

/**
 * Level-set front positions by linear interpolation, fitted speed over
 * [T/2, T], and the tail decay rate (slope of log u over nodes with
 * u in [1e-8, 1e-2] ahead of the front) at the final snapshot.
 */
inline FrontTrack track_front(const SnapshotSeries& s, double theta_front) {
  if (s.empty()) throw std::runtime_error("track_front: empty series");
  FrontTrack tr;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto& u = s.u[k];
    int idx = -1;
    for (int i = s.M; i >= 0; --i)
      if (u[i] >= theta_front) {
        idx = i;
        break;
      }
    if (idx < 0) continue;
    double xf;
    if (idx == s.M) {
      xf = s.L;
    } else {
      xf = s.x(idx) + s.h() * (u[idx] - theta_front) / (u[idx] - u[idx + 1]);
    }
    tr.times.push_back(s.times[k]);
    tr.positions.push_back(xf);
  }

  const double t_last = s.t_last();
  std::vector<double> ft, fx;
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    if (tr.times[k] < 0.5 * t_last) continue;
    if (tr.positions[k] > s.L - 2.0)
      throw FrontAtBoundary("track_front: front within 2 of the cut-off at t = " +
                            std::to_string(tr.times[k]));
    ft.push_back(tr.times[k]);
    fx.push_back(tr.positions[k]);
  }
  if (ft.size() < 2)
    throw std::runtime_error("track_front: fewer than two front positions in the fit window");
  tr.speed = linear_fit(ft, fx).slope;

  const auto& uf = s.u.back();
  const double x_front = fx.back();
  std::vector<double> tx, tl;
  for (int i = 0; i <= s.M; ++i) {
    if (s.x(i) <= x_front) continue;
    if (uf[i] >= 1e-8 && uf[i] <= 1e-2) {
      tx.push_back(s.x(i));
      tl.push_back(std::log(uf[i]));
    }
  }
  if (tx.size() >= 2) tr.decay_rate = -linear_fit(tx, tl).slope;
  return tr;
}

}  // namespace chemospread
