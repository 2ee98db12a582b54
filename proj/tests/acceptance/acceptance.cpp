// Acceptance suite: each criterion prints one PASS/FAIL line and the
// supporting measurements. Run as `acceptance <n>` for criterion n, or
// `acceptance all`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "chemospread/front.hpp"
#include "chemospread/model.hpp"
#include "chemospread/snapshot.hpp"
#include "chemospread/stepper.hpp"
#include "chemospread/sweep.hpp"
#include "chemospread/verify.hpp"

using namespace chemospread;

namespace {

struct Criterion {
  int id;
  bool ok = true;
  std::ostringstream detail;

  explicit Criterion(int criterion_id) : id(criterion_id) {}

  void expect(bool cond, const std::string& what) {
    detail << "    " << (cond ? "ok  " : "BAD ") << what << "\n";
    ok = ok && cond;
  }
  void note(const std::string& what) { detail << "    " << what << "\n"; }
  bool finish(const std::string& title) {
    std::printf("[criterion %d] %s - %s\n%s", id, ok ? "PASS" : "FAIL",
                title.c_str(), detail.str().c_str());
    std::fflush(stdout);
    return ok;
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

SweepPlan reference_matrix_plan() {
  SweepPlan plan;
  plan.chi = {-10.0, -1.0, 1.0, 10.0};
  plan.c = {1.0, 1.99, 2.01, 3.0};
  return plan;
}

const std::map<std::pair<double, double>, std::string>& expected_matrix() {
  static const std::map<std::pair<double, double>, std::string> m = [] {
    std::map<std::pair<double, double>, std::string> e;
    for (double chi : {-10.0, -1.0, 1.0, 10.0}) {
      e[{chi, 1.0}] = "Persisted";
      e[{chi, 1.99}] = "Persisted";
      e[{chi, 2.01}] = chi == 10.0 ? "Persisted" : "Decayed";
      e[{chi, 3.0}] = "Decayed";
    }
    return e;
  }();
  return m;
}

// ---- criterion 1: reference-matrix reproduction -------------------------------

bool criterion_1() {
  Criterion cr{1};
  const auto t0 = std::chrono::steady_clock::now();
  auto records = execute(reference_matrix_plan(), 8);
  const double matrix_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& r : records) {
    const auto& want = expected_matrix().at({r.chi, r.c});
    cr.expect(r.verdict == want,
              "(chi=" + fmt(r.chi) + ", c=" + fmt(r.c) + ") -> " + r.verdict +
                  " [" + r.basis + "], expected " + want +
                  "  (final_max_u=" + fmt(r.final_max_u) +
                  ", center_min_u=" + fmt(r.center_min_u) + ")");
  }
  cr.expect(matrix_s < 180.0,
            "full matrix at 8 workers took " + fmt(matrix_s) + " s < 3 min");
  {
    // per-cell bound measured uncontended, on the most expensive cell
    // (persisted, full 250k-step horizon)
    ModelParams p;
    p.chi = 10.0;
    p.c = 2.01;
    const auto c0 = std::chrono::steady_clock::now();
    classify(p, GridSpec{}, InitialData::paper_bump());
    const double cell_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - c0).count();
    cr.expect(cell_s < 10.0, "one full-horizon cell on one core took " +
                                 fmt(cell_s) + " s < 10 s");
  }
  cr.note("phase table (rows chi, cols c):\n" +
          phase_table(records, "chi", "c").to_text());
  return cr.finish("reference-matrix verdicts at defaults (T=500)");
}

// ---- criterion 2: KPP speed by bisection -----------------------------------

bool criterion_2() {
  Criterion cr{2};
  ModelParams p;
  GridSpec g;
  auto est = bisect_speed(p, g, InitialData::paper_bump(), 1.5, 3.0, 0.05);
  cr.expect(est.upper - est.lower <= 0.05 + 1e-12,
            "a=1 bracket width " + fmt(est.upper - est.lower) + " <= 0.05");
  cr.expect(est.lower <= 2.0 && 2.0 <= est.upper,
            "a=1 bracket [" + fmt(est.lower) + ", " + fmt(est.upper) +
                "] contains 2.0");

  ModelParams p4;
  p4.a = 4.0;
  auto est4 = bisect_speed(p4, g, InitialData::paper_bump(), 3.0, 5.0, 0.05);
  cr.expect(est4.upper - est4.lower <= 0.05 + 1e-12,
            "a=4 bracket width " + fmt(est4.upper - est4.lower) + " <= 0.05");
  cr.expect(est4.lower <= 4.0 && 4.0 <= est4.upper,
            "a=4 bracket [" + fmt(est4.lower) + ", " + fmt(est4.upper) +
                "] contains 4.0");
  return cr.finish("find-speed brackets 2 sqrt(a) for a = 1 and a = 4");
}

// ---- criterion 3: chi* phase transition ------------------------------------

bool criterion_3() {
  Criterion cr{3};
  ModelParams p;
  GridSpec g;
  const auto init = InitialData::paper_bump();

  auto bracket_under = [&](const ClassifyOptions& copt) -> std::string {
    BisectOptions bo;
    bo.cls = copt;
    try {
      auto est = bisect_chi_star(p, g, init, 2.01, 1.0, 2.5, 0.1, bo);
      return "[" + fmt(est.lower) + ", " + fmt(est.upper) + "]";
    } catch (const BracketError& e) {
      return std::string("BracketInvalid (") + e.what() + ")";
    }
  };

  auto base = bisect_chi_star(p, g, init, 2.01, 1.0, 2.5, 0.1);
  cr.note("measured bracket at defaults: [" + fmt(base.lower) + ", " +
          fmt(base.upper) + "]");
  for (const auto& [chi, o] : base.probes)
    cr.note("  probe chi=" + fmt(chi) + " -> " + to_string(o.verdict) + " [" +
            to_string(o.basis) + "] drift=" + fmt(o.front_drift) +
            " logmax_slope=" + fmt(o.logmax_slope));

  cr.expect(base.lower > 1.2 && base.upper < 2.2,
            "bracket inside (1.2, 2.2) [the t=500 visual-read bracket is "
            "(1.5, 1.9)]");

  // sensitivity: halving delta_persist
  ClassifyOptions half;
  half.delta_persist = 0.05;
  cr.note("sensitivity, delta_persist halved to 0.05: " + bracket_under(half));

  // sensitivity: the trend threshold the verdict actually keys on
  for (double thr : {-0.009, -0.015}) {
    ClassifyOptions copt;
    copt.drift_threshold = thr;
    cr.note("sensitivity, drift_threshold " + fmt(thr) + ": " +
            bracket_under(copt));
  }

  cr.note("analysis: at c = 2.01 the t = 500 state varies smoothly in chi; the");
  cr.note("earlier (1.5, 1.9) reading reflects profiles that still look positive");
  cr.note("at t = 500 but drain to extinction by t ~ 1700-2300 (chi <= 2.5).");
  cr.note("The trend-honest transition at this grid sits above 2.2, so this");
  cr.note("criterion fails as specified; see the probe log above.");
  return cr.finish("chi* bracket inside (1.2, 2.2) at c_probe = 2.01");
}

// ---- criterion 4: envelope decay rate and front speed ----------------------

GridSpec wide_grid() {
  GridSpec g;
  g.L = 120.0;
  g.M = 2400;
  g.T = 50.0;
  return g;
}

bool criterion_4() {
  Criterion cr{4};
  ModelParams p;  // chi = 0, c = 0
  GridSpec g = wide_grid();
  SnapshotRecorder rec(g);
  run(sample_initial(InitialData::paper_bump(), g), p, g, {rec.observer()});
  auto tr = track_front(rec.series(), p.a / (2.0 * p.b));
  cr.expect(tr.speed >= 1.85 && tr.speed <= 2.0,
            "front speed fit " + fmt(tr.speed) + " in [1.85, 2.0]");
  cr.expect(tr.decay_rate >= 0.9 && tr.decay_rate <= 1.1,
            "tail decay rate " + fmt(tr.decay_rate) + " in [0.9, 1.1] vs sqrt(a) = 1");
  return cr.finish("fixed-frame KPP front speed and envelope decay rate");
}

// ---- criterion 5: eigenvalue probe ------------------------------------------

bool criterion_5() {
  Criterion cr{5};
  for (double c : {0.0, 1.0, 1.5}) {
    auto probe = eigen_probe(c, 0.5, 1.0);
    const double gap = std::abs(probe.lambda_discrete - probe.lambda_closed);
    cr.expect(gap <= 1e-4, "c=" + fmt(c) + ": |discrete - closed| = " + fmt(gap) +
                               " <= 1e-4 at h = l0/400");
    auto fine = eigen_probe(c, 0.5, 1.0, 1, probe.l0 / 800.0);
    const double gap2 = std::abs(fine.lambda_discrete - fine.lambda_closed);
    const double ratio = gap / gap2;
    cr.expect(ratio >= 3.5 && ratio <= 4.5,
              "c=" + fmt(c) + ": halving h reduces the gap by " + fmt(ratio) +
                  " (in [3.5, 4.5])");
  }
  return cr.finish("closed-form vs discrete principal eigenvalue");
}

// ---- criterion 6: equilibrium behind persisted fronts ----------------------

bool criterion_6() {
  Criterion cr{6};
  GridSpec g;
  const auto init = InitialData::paper_bump();
  const std::vector<std::pair<double, double>> persisted = {
      {-10.0, 1.0}, {-1.0, 1.0}, {1.0, 1.0},  {10.0, 1.0},  {-10.0, 1.99},
      {-1.0, 1.99}, {1.0, 1.99}, {10.0, 1.99}, {10.0, 2.01}};
  for (auto [chi, c] : persisted) {
    ModelParams p;
    p.chi = chi;
    p.c = c;
    SnapshotRecorder rec(g);
    auto o = classify(p, g, init, {}, {rec.observer()});
    if (o.verdict != Verdict::Persisted) {
      cr.expect(false, "(chi=" + fmt(chi) + ", c=" + fmt(c) +
                           ") unexpectedly " + to_string(o.verdict));
      continue;
    }
    auto rep = check_equilibrium(rec.series(), p, init.v0_max());
    std::string line = "(chi=" + fmt(chi) + ", c=" + fmt(c) + ") equilibrium: " +
                       to_string(rep.status);
    for (const auto& [k, v] : rep.measured) line += "  " + k + "=" + fmt(v);
    if (!rep.note.empty()) line += "  (" + rep.note + ")";
    cr.expect(rep.status == CheckStatus::Pass, line);
  }
  cr.note("analysis: the c = 1 row equilibrates cleanly (|u-1| <= 1e-4, v <= 1e-30).");
  cr.note("At c close to 2 sqrt(a) the persisted state in the cut-off domain is a");
  cr.note("standing front parked near x = +L whose shoulder reaches the center");
  cr.note("(chi=10: |u-1| ~ 0.06-0.09), and the frame origin of the plateau-");
  cr.note("persisted c = 1.99 runs lies ahead of the front entirely, so the 0.02");
  cr.note("tolerance is unattainable at L = 20; failures above are structural.");
  return cr.finish("check_equilibrium over every criterion-1 Persisted cell");
}

// ---- criterion 7: property suites -------------------------------------------

bool criterion_7() {
  Criterion cr{7};

  {  // scheme fixed points, exact
    ModelParams p;
    GridSpec g;
    g.M = 100;
    g.L = 5.0;
    FieldState s;
    s.u.assign(g.nodes(), 0.0);
    s.v.assign(g.nodes(), 1.0);
    StepWorkspace ws;
    bool exact = true;
    for (int n = 0; n < 1000; ++n) {
      step(s, p, g, ws);
      for (int i = 0; i <= g.M; ++i)
        exact = exact && s.u[i] == 0.0 && s.v[i] == 1.0;
    }
    cr.expect(exact, "u=0, v=1 is an exact fixed point over 1000 steps");
  }

  {  // logistic-ODE domination at chi = 0
    ModelParams p;
    GridSpec g;
    g.M = 200;
    g.T = 10.0;
    auto s = sample_initial(InitialData::paper_bump(), g);
    StepWorkspace ws;
    double z = s.max_u();
    bool dominated = true;
    for (long n = 0; n < g.steps(); ++n) {
      step(s, p, g, ws);
      z = z + g.dt * z * (p.a - p.b * z);
      dominated = dominated && s.max_u() <= z + 1e-8;
    }
    cr.expect(dominated, "max u dominated by the forward-Euler logistic solution");
  }

  auto records8 = execute(reference_matrix_plan(), 8);
  {  // positivity / boundedness across the matrix
    bool pos = true, bound = true;
    for (const auto& r : records8) {
      pos = pos && r.min_u >= -1e-10 && r.min_v >= -1e-10;
      bound = bound && r.max_v <= 1.0 + 1e-10;
    }
    cr.expect(pos, "u, v >= -1e-10 over every step of the full matrix");
    cr.expect(bound, "v <= 1 + 1e-10 over every step of the full matrix");
  }

  {  // parallel determinism
    auto records1 = execute(reference_matrix_plan(), 1);
    auto canon = [](std::vector<RunRecord> rs) {
      std::string out;
      for (auto r : rs) {
        r.wall_ms = 0.0;
        out += record_csv_row(r) + "\n";
      }
      return out;
    };
    cr.expect(canon(records1) == canon(records8),
              "record sets byte-identical for 1 and 8 workers (wall time aside)");
  }

  {  // refinement robustness: h = 0.05, dt = 0.0005
    SweepPlan fine = reference_matrix_plan();
    fine.grid.M = 800;
    fine.grid.dt = 0.0005;
    auto fine_records = execute(fine, 8);
    for (const auto& r : fine_records) {
      const auto& want = expected_matrix().at({r.chi, r.c});
      cr.expect(r.verdict == want, "refined (chi=" + fmt(r.chi) + ", c=" +
                                       fmt(r.c) + ") -> " + r.verdict + " [" +
                                       r.basis + "], expected " + want);
    }
  }
  return cr.finish("fixed points, bounds, domination, determinism, refinement");
}

// ---- criterion 8: heat baseline ---------------------------------------------

bool criterion_8() {
  Criterion cr{8};
  {  // v0 = 1 invariance over the full 250k-step horizon
    GridSpec g;
    std::vector<double> v0(g.nodes(), 1.0);
    auto base = run_heat(v0, 1.0, g);
    double dev = 0.0;
    for (const auto& row : base.V)
      for (double v : row) dev = std::max(dev, std::abs(v - 1.0));
    cr.expect(dev <= 1e-12, "run_heat keeps v0 = 1 within " + fmt(dev) +
                                " (<= 1e-12) for 250k steps");
  }
  {  // v -> V ahead of the front on the chi = 0 run
    ModelParams p;
    GridSpec g = wide_grid();
    SnapshotRecorder rec(g);
    RunOptions opt;
    opt.snapshot_stride = default_snapshot_stride(g.steps());
    run(sample_initial(InitialData::paper_bump(), g), p, g, {rec.observer()}, opt);
    auto baseline = run_heat(std::vector<double>(g.nodes(), 1.0), p.tau, g,
                             opt.snapshot_stride);
    auto rep = check_v_ahead(rec.series(), baseline, 2.2);
    double gamma = 0.0;
    for (const auto& [k, v] : rep.measured)
      if (k == "gamma_fit") gamma = v;
    cr.expect(rep.status == CheckStatus::Pass && gamma > 0.0,
              "check_v_ahead passes with gamma_fit = " + fmt(gamma) + " > 0");
  }
  return cr.finish("heat baseline invariance and v -> V ahead of the front");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  if (argc < 2 || std::string(argv[1]) == "all") {
    which = {1, 2, 3, 4, 5, 6, 7, 8};
  } else {
    which.push_back(std::atoi(argv[1]));
  }
  int failures = 0;
  for (int id : which) {
    bool ok = false;
    switch (id) {
      case 1: ok = criterion_1(); break;
      case 2: ok = criterion_2(); break;
      case 3: ok = criterion_3(); break;
      case 4: ok = criterion_4(); break;
      case 5: ok = criterion_5(); break;
      case 6: ok = criterion_6(); break;
      case 7: ok = criterion_7(); break;
      case 8: ok = criterion_8(); break;
      default:
        std::fprintf(stderr, "unknown criterion %d\n", id);
        return 2;
    }
    if (!ok) ++failures;
  }
  return failures;
}
