// chemospread: 1-D comoving-frame chemotaxis-consumption simulator.
//
// Subcommands: simulate, find-speed, find-chi-star, sweep, verify, eigen.
// Exit codes: 0 success, 2 config error, 3 numerical blow-up, 4 bracket
// invalid (stable contract for scripting).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chemospread/config.hpp"
#include "chemospread/front.hpp"
#include "chemospread/model.hpp"
#include "chemospread/snapshot.hpp"
#include "chemospread/stepper.hpp"
#include "chemospread/sweep.hpp"
#include "chemospread/verify.hpp"

namespace fs = std::filesystem;
using namespace chemospread;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBlowUp = 3;
constexpr int kExitBracket = 4;

struct CommonFlags {
  Config cfg;
  std::string config_path;
  long stride = 0;
  double tol = 0.05;
  int workers = 0;

  // remembers which flags the user actually set, so file < flag precedence
  CLI::Option *o_a = nullptr, *o_b = nullptr, *o_chi = nullptr, *o_tau = nullptr,
              *o_sigma = nullptr, *o_c = nullptr, *o_L = nullptr, *o_M = nullptr,
              *o_T = nullptr, *o_dt = nullptr, *o_init = nullptr, *o_out = nullptr;
  double a = 1, b = 1, chi = 0, tau = 1, sigma = 1, c = 0, L = 20, T = 500,
         dt = 0.002;
  int M = 400;
  std::string init = "paperbump", out;

  void attach(CLI::App* app) {
    o_a = app->add_option("--a", a, "growth rate a (> 0)");
    o_b = app->add_option("--b", b, "self-limitation b (> 0)");
    o_chi = app->add_option("--chi", chi, "chemotaxis sensitivity (signed)");
    o_tau = app->add_option("--tau", tau, "chemical time constant (> 0)");
    o_sigma = app->add_option("--sigma", sigma, "logistic exponent (> 0)");
    o_c = app->add_option("--c", c, "comoving frame speed");
    o_L = app->add_option("--L", L, "half-domain length");
    o_M = app->add_option("--M", M, "number of space subintervals (even)");
    o_T = app->add_option("--T", T, "final time");
    o_dt = app->add_option("--dt", dt, "time step");
    o_init = app->add_option("--init", init, "initial profile (paperbump)");
    o_out = app->add_option("--out", out, "output directory");
    app->add_option("--config", config_path, "key=value config file (flags override)");
    app->add_option("--stride", stride, "snapshot stride in steps (0 = ~200 snapshots)");
    app->add_option("--tol", tol, "bisection tolerance");
    app->add_option("--workers", workers,
                    "sweep worker threads (default: CHEMOSPREAD_WORKERS or cores)");
  }

  // config file first, then explicit flags on top
  void resolve() {
    cfg = Config{};
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    if (o_a->count()) cfg.params.a = a;
    if (o_b->count()) cfg.params.b = b;
    if (o_chi->count()) cfg.params.chi = chi;
    if (o_tau->count()) cfg.params.tau = tau;
    if (o_sigma->count()) cfg.params.sigma = sigma;
    if (o_c->count()) cfg.params.c = c;
    if (o_L->count()) cfg.grid.L = L;
    if (o_M->count()) cfg.grid.M = M;
    if (o_T->count()) cfg.grid.T = T;
    if (o_dt->count()) cfg.grid.dt = dt;
    if (o_init->count()) cfg.init = init;
    if (o_out->count()) cfg.out = out;
  }

  int resolved_workers() const {
    if (workers > 0) return workers;
    if (const char* env = std::getenv("CHEMOSPREAD_WORKERS")) {
      const int w = std::atoi(env);
      if (w > 0) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
  }
};

fs::path ensure_out_dir(const Config& cfg, const std::string& fallback) {
  fs::path dir = cfg.out.empty() ? fs::path(fallback) : fs::path(cfg.out);
  fs::create_directories(dir);
  return dir;
}

void echo_config(const Config& cfg, const fs::path& dir) {
  std::ofstream os(dir / "config.txt");
  os << emit_config(cfg);
}

int fail_config(const std::string& msg) {
  std::cerr << "config error: " << msg << "\n";
  return kExitConfig;
}

int require_valid(const Config& cfg, const InitialData& init) {
  auto rep = validate(cfg.params, cfg.grid, &init);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  if (!rep.ok()) return fail_config(rep.errors.front());
  return kExitOk;
}

json outcome_json(const Outcome& o, const Config& cfg) {
  json j;
  j["verdict"] = to_string(o.verdict);
  j["basis"] = to_string(o.basis);
  j["final_max_u"] = o.final_max_u;
  j["center_min_u"] = o.center_min_u;
  j["decision_time"] = o.decision_time;
  j["front_drift"] = o.front_drift;
  j["logmax_slope"] = o.logmax_slope;
  j["steps_done"] = o.steps_done;
  j["diagnostics"] = {{"min_u", o.stats.min_u},
                      {"max_u", o.stats.max_u},
                      {"min_v", o.stats.min_v},
                      {"max_v", o.stats.max_v}};
  j["params"] = {{"a", cfg.params.a},     {"b", cfg.params.b},
                 {"chi", cfg.params.chi}, {"tau", cfg.params.tau},
                 {"sigma", cfg.params.sigma}, {"c", cfg.params.c}};
  j["grid"] = {{"L", cfg.grid.L}, {"M", cfg.grid.M}, {"T", cfg.grid.T},
               {"dt", cfg.grid.dt}};
  return j;
}

int cmd_simulate(CommonFlags& f) {
  f.resolve();
  InitialData init = f.cfg.initial_data();
  if (int rc = require_valid(f.cfg, init)) return rc;
  const fs::path dir = ensure_out_dir(f.cfg, "simulate_out");
  echo_config(f.cfg, dir);

  std::ofstream csv(dir / "snapshots.csv");
  SnapshotCsvWriter writer(csv, f.cfg.grid);
  RunStats stats;
  RunOptions opt;
  opt.snapshot_stride = f.stride;
  opt.stats = &stats;
  json summary;
  try {
    auto fin = run(sample_initial(init, f.cfg.grid), f.cfg.params, f.cfg.grid,
                   {writer.observer()}, opt);
    summary["status"] = "completed";
    summary["steps"] = fin.step_index;
    summary["t_end"] = fin.t;
    summary["final_max_u"] = fin.max_u();
    summary["diagnostics"] = {{"min_u", stats.min_u},
                              {"max_u", stats.max_u},
                              {"min_v", stats.min_v},
                              {"max_v", stats.max_v}};
  } catch (const BlowUpError& e) {
    summary["status"] = "blow_up";
    summary["step"] = e.step_index;
    summary["t"] = e.t;
    std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
    std::cerr << e.what() << "\n";
    return kExitBlowUp;
  }
  summary["params"] = {{"a", f.cfg.params.a},     {"b", f.cfg.params.b},
                       {"chi", f.cfg.params.chi}, {"tau", f.cfg.params.tau},
                       {"sigma", f.cfg.params.sigma}, {"c", f.cfg.params.c}};
  summary["grid"] = {{"L", f.cfg.grid.L}, {"M", f.cfg.grid.M},
                     {"T", f.cfg.grid.T}, {"dt", f.cfg.grid.dt}};
  summary["out"] = dir.string();
  std::ofstream(dir / "summary.json") << summary.dump(2) << "\n";
  std::cout << "wrote " << (dir / "snapshots.csv").string() << "\n";
  return kExitOk;
}

int cmd_find_speed(CommonFlags& f, double c_lo, double c_hi) {
  f.resolve();
  InitialData init = f.cfg.initial_data();
  if (int rc = require_valid(f.cfg, init)) return rc;
  const fs::path dir = ensure_out_dir(f.cfg, "find_speed_out");
  echo_config(f.cfg, dir);
  try {
    auto est = bisect_speed(f.cfg.params, f.cfg.grid, init, c_lo, c_hi, f.tol);
    json j;
    j["lower"] = est.lower;
    j["upper"] = est.upper;
    j["tolerance"] = est.tolerance;
    j["undetermined_seen"] = est.undetermined_seen;
    for (const auto& [c, o] : est.probes) {
      Config pc = f.cfg;
      pc.params.c = c;
      j["probes"].push_back(outcome_json(o, pc));
    }
    std::ofstream(dir / "speed.json") << j.dump(2) << "\n";
    std::cout << "spreading speed bracket: [" << est.lower << ", " << est.upper
              << "]\n";
    return kExitOk;
  } catch (const BracketError& e) {
    std::cerr << e.what() << "\n";
    return kExitBracket;
  }
}

int cmd_find_chi_star(CommonFlags& f, double c_probe, double chi_lo, double chi_hi) {
  f.resolve();
  InitialData init = f.cfg.initial_data();
  if (int rc = require_valid(f.cfg, init)) return rc;
  const fs::path dir = ensure_out_dir(f.cfg, "find_chi_star_out");
  echo_config(f.cfg, dir);
  try {
    auto est = bisect_chi_star(f.cfg.params, f.cfg.grid, init, c_probe, chi_lo,
                               chi_hi, f.tol);
    json j;
    j["c_probe"] = c_probe;
    j["lower"] = est.lower;
    j["upper"] = est.upper;
    j["tolerance"] = est.tolerance;
    j["undetermined_seen"] = est.undetermined_seen;
    for (const auto& [chi, o] : est.probes) {
      Config pc = f.cfg;
      pc.params.chi = chi;
      pc.params.c = c_probe;
      j["probes"].push_back(outcome_json(o, pc));
    }
    std::ofstream(dir / "chi_star.json") << j.dump(2) << "\n";
    std::cout << "chi* bracket at c = " << c_probe << ": [" << est.lower << ", "
              << est.upper << "]\n";
    return kExitOk;
  } catch (const BracketError& e) {
    std::cerr << e.what() << "\n";
    return kExitBracket;
  }
}

int cmd_sweep(CommonFlags& f, std::vector<double>& chis, std::vector<double>& cs,
              std::vector<double>& taus, std::vector<double>& sigmas,
              bool full_snapshots) {
  f.resolve();
  SweepPlan plan;
  plan.base = f.cfg.params;
  plan.grid = f.cfg.grid;
  plan.init = f.cfg.initial_data();
  if (!chis.empty()) plan.chi = chis;
  if (!cs.empty()) plan.c = cs;
  if (!taus.empty()) plan.tau = taus;
  if (!sigmas.empty()) plan.sigma = sigmas;
  plan.mode = full_snapshots ? SweepPlan::Mode::FullSnapshots
                             : SweepPlan::Mode::Classify;
  const fs::path dir = ensure_out_dir(f.cfg, "sweep_out");
  echo_config(f.cfg, dir);
  RecordSink sink(dir);
  auto records = execute(plan, f.resolved_workers(), &sink);
  if (plan.chi.size() > 1 && plan.c.size() > 1) {
    auto table = phase_table(records, "chi", "c");
    std::ofstream(dir / "phase.txt") << table.to_text();
    std::cout << table.to_text();
  }
  std::cout << records.size() << " records in " << (dir / "records.csv").string()
            << "\n";
  return kExitOk;
}

int cmd_verify(CommonFlags& f, const std::string& run_dir, double c_upper) {
  // theorem checks are pure functions of the stored snapshots
  Config stored;
  try {
    stored = load_config((fs::path(run_dir) / "config.txt").string());
  } catch (const ConfigError& e) {
    return fail_config(e.what());
  }
  std::ifstream csv(fs::path(run_dir) / "snapshots.csv");
  if (!csv) return fail_config("missing snapshots.csv in " + run_dir);
  SnapshotSeries series = read_snapshot_csv(csv);
  if (series.empty()) return fail_config("empty snapshot series");

  const double a = stored.params.a;
  const double cdd = c_upper > 0.0 ? c_upper : stored.params.kpp_speed() + 0.2;
  json j;
  j["run"] = run_dir;
  j["c_upper"] = cdd;
  bool all_applicable_pass = true;
  auto add = [&](const TheoremReport& rep) {
    json r;
    r["name"] = rep.name;
    r["status"] = to_string(rep.status);
    for (const auto& [k, v] : rep.measured) r["measured"][k] = v;
    for (const auto& [k, v] : rep.tolerances) r["tolerances"][k] = v;
    if (rep.witness)
      r["witness"] = {{"t", rep.witness->t}, {"x", rep.witness->x},
                      {"value", rep.witness->value}};
    if (!rep.note.empty()) r["note"] = rep.note;
    j["checks"].push_back(r);
    if (rep.status == CheckStatus::Fail) all_applicable_pass = false;
    std::cout << rep.name << ": " << to_string(rep.status)
              << (rep.note.empty() ? "" : "  (" + rep.note + ")") << "\n";
  };

  add(check_equilibrium(series, stored.params, 1.0));
  add(check_envelope(series, a, cdd));
  if (stored.params.c == 0.0) {
    try {
      add(check_lower_bound(series, stored.params, 0.95 * stored.params.kpp_speed()));
    } catch (const DomainTooSmall& e) {
      std::cout << "lower_bound: skipped (" << e.what() << ")\n";
      j["checks"].push_back({{"name", "lower_bound"}, {"status", "not_applicable"},
                             {"note", e.what()}});
    }
    // heat baseline recomputed from the stored first snapshot at the stored
    // sampling times (same discretization, deterministic)
    GridSpec bg;
    bg.L = series.L;
    bg.M = series.M;
    bg.T = series.t_last();
    bg.dt = series.size() >= 2 && series.steps[1] > 0
                ? series.times[1] / series.steps[1]
                : 0.002;
    const long stride = series.size() >= 2 ? series.steps[1] : 1;
    try {
      auto baseline = run_heat(series.v.front(), stored.params.tau, bg, stride);
      add(check_v_ahead(series, baseline, cdd));
    } catch (const std::exception& e) {
      std::cout << "v_ahead: skipped (" << e.what() << ")\n";
      j["checks"].push_back({{"name", "v_ahead"}, {"status", "not_applicable"},
                             {"note", e.what()}});
    }
  } else {
    std::cout << "lower_bound, v_ahead: skipped (comoving run, c != 0)\n";
  }
  try {
    const double c_emp = harnack_monitor(series, 2.0, 0.0, 1.0);
    j["harnack_C_emp"] = c_emp;
    std::cout << "harnack monitor: C_emp = " << c_emp << " (reported, not asserted)\n";
  } catch (const NoData&) {
    std::cout << "harnack monitor: no data (all denominators vanish)\n";
  }

  j["all_applicable_pass"] = all_applicable_pass;
  const fs::path out = f.cfg.out.empty() ? fs::path(run_dir) : fs::path(f.cfg.out);
  fs::create_directories(out);
  std::ofstream(out / "verify.json") << j.dump(2) << "\n";
  std::cout << "overall: " << (all_applicable_pass ? "pass" : "fail") << "\n";
  return kExitOk;
}

int cmd_eigen(double c, double delta0, double a, int N, double h_eig,
              const std::string& out) {
  try {
    auto probe = eigen_probe(c, delta0, a, N, h_eig);
    json j;
    j["c"] = probe.c;
    j["delta0"] = probe.delta0;
    j["a"] = probe.a;
    j["N"] = probe.N;
    j["a_bar"] = probe.a_bar;
    j["l0"] = probe.l0;
    j["R0"] = probe.R0;
    j["h_eig"] = probe.h_eig;
    j["lambda_closed"] = probe.lambda_closed;
    j["lambda_discrete"] = probe.lambda_discrete;
    j["gap"] = std::abs(probe.lambda_discrete - probe.lambda_closed);
    j["iterations"] = probe.iterations;
    std::cout << "lambda_closed = " << probe.lambda_closed
              << ", lambda_discrete = " << probe.lambda_discrete
              << " (gap " << std::abs(probe.lambda_discrete - probe.lambda_closed)
              << ")\n";
    if (!out.empty()) {
      fs::create_directories(out);
      std::ofstream(fs::path(out) / "eigen.json") << j.dump(2) << "\n";
    }
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    return fail_config(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-D comoving-frame chemotaxis-consumption simulator"};
  app.require_subcommand(1);
  CommonFlags f_sim, f_speed, f_chi, f_sweep, f_verify;

  auto* sim = app.add_subcommand("simulate", "run one simulation, write snapshot CSV");
  f_sim.attach(sim);

  auto* speed = app.add_subcommand("find-speed", "bisect the spreading speed over c");
  double c_lo = 1.5, c_hi = 3.0;
  speed->add_option("--c-lo", c_lo, "persisted endpoint (default 1.5)");
  speed->add_option("--c-hi", c_hi, "decayed endpoint (default 3.0)");
  f_speed.attach(speed);

  auto* chis = app.add_subcommand("find-chi-star", "bisect the critical chi at fixed c");
  double c_probe = 2.01, chi_lo = 1.0, chi_hi = 2.5;
  chis->add_option("--c-probe", c_probe, "frame speed for the probes (default 2.01)");
  chis->add_option("--chi-lo", chi_lo, "decayed endpoint (default 1.0)");
  chis->add_option("--chi-hi", chi_hi, "persisted endpoint (default 2.5)");
  f_chi.attach(chis);

  auto* sweep = app.add_subcommand("sweep", "classify a (chi, c, tau, sigma) matrix");
  std::vector<double> chis_v, cs_v, taus_v, sigmas_v;
  bool full_snapshots = false;
  sweep->add_option("--chis", chis_v, "chi axis values")->delimiter(',');
  sweep->add_option("--cs", cs_v, "c axis values")->delimiter(',');
  sweep->add_option("--taus", taus_v, "tau axis values")->delimiter(',');
  sweep->add_option("--sigmas", sigmas_v, "sigma axis values")->delimiter(',');
  sweep->add_flag("--full-snapshots", full_snapshots,
                  "store per-run snapshot CSVs under <out>/runs/");
  f_sweep.attach(sweep);

  auto* verify = app.add_subcommand("verify", "run theorem checks on stored snapshots");
  std::string run_dir;
  double c_upper = 0.0;
  verify->add_option("--run", run_dir, "directory written by simulate")->required();
  verify->add_option("--c-upper", c_upper,
                     "speed c'' for the envelope/v-ahead region (default 2 sqrt(a) + 0.2)");
  f_verify.attach(verify);

  auto* eigen = app.add_subcommand("eigen", "closed-form vs discrete eigenvalue probe");
  double ec = 0.0, delta0 = 0.5, ea = 1.0, h_eig = 0.0;
  int N = 1;
  std::string eigen_out;
  eigen->add_option("--c", ec, "frame speed (default 0)");
  eigen->add_option("--delta0", delta0, "margin parameter (default 0.5)");
  eigen->add_option("--a", ea, "growth rate (default 1)");
  eigen->add_option("--N", N, "dimension entering the closed form (default 1)");
  eigen->add_option("--h-eig", h_eig, "eigen grid step (default l0/400)");
  eigen->add_option("--out", eigen_out, "directory for eigen.json (optional)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitConfig : kExitOk;
  }

  try {
    if (sim->parsed()) return cmd_simulate(f_sim);
    if (speed->parsed()) return cmd_find_speed(f_speed, c_lo, c_hi);
    if (chis->parsed()) return cmd_find_chi_star(f_chi, c_probe, chi_lo, chi_hi);
    if (sweep->parsed())
      return cmd_sweep(f_sweep, chis_v, cs_v, taus_v, sigmas_v, full_snapshots);
    if (verify->parsed()) return cmd_verify(f_verify, run_dir, c_upper);
    if (eigen->parsed()) return cmd_eigen(ec, delta0, ea, N, h_eig, eigen_out);
  } catch (const ConfigError& e) {
    return fail_config(e.what());
  } catch (const BlowUpError& e) {
    std::cerr << e.what() << "\n";
    return kExitBlowUp;
  } catch (const BracketError& e) {
    std::cerr << e.what() << "\n";
    return kExitBracket;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
