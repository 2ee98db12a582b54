#pragma once

// Parallel experiment-matrix runner over (chi, c, tau, sigma), with
// append-only CSV persistence, a JSONL provenance sidecar, dedup/resume by
// run id, and phase-diagram tables.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "chemospread/front.hpp"
#include "chemospread/model.hpp"
#include "chemospread/snapshot.hpp"

namespace chemospread {

struct SweepPlan {
  enum class Mode { Classify, FullSnapshots };
  std::vector<double> chi{0.0};
  std::vector<double> c{0.0};
  std::vector<double> tau{1.0};
  std::vector<double> sigma{1.0};
  ModelParams base;
  GridSpec grid;
  InitialData init = InitialData::paper_bump();
  Mode mode = Mode::Classify;
};

/** One simulation's provenance + verdict row. */
struct RunRecord {
  std::string run_id;
  double chi = 0, c = 0, tau = 1, sigma = 1, a = 1, b = 1, L = 20;
  int M = 400;
  double T = 500, dt = 0.002;
  std::string verdict;  // Persisted | Decayed | Undetermined | BlowUp | Skipped
  std::string basis;
  double final_max_u = std::numeric_limits<double>::quiet_NaN();
  double center_min_u = std::numeric_limits<double>::quiet_NaN();
  double decision_time = std::numeric_limits<double>::quiet_NaN();
  double front_drift = std::numeric_limits<double>::quiet_NaN();
  double logmax_slope = std::numeric_limits<double>::quiet_NaN();
  double min_u = std::numeric_limits<double>::quiet_NaN();
  double max_u = std::numeric_limits<double>::quiet_NaN();
  double min_v = std::numeric_limits<double>::quiet_NaN();
  double max_v = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = 0.0;
  std::string skip_reason;

  std::tuple<double, double, double, double> sort_key() const {
    return {chi, c, tau, sigma};
  }
};

inline constexpr const char* kRecordCsvHeader =
    "run_id,chi,c,tau,sigma,a,b,L,M,T,dt,verdict,final_max_u,center_min_u,"
    "decision_time,min_u,max_u,min_v,max_v,wall_ms";

namespace detail {

inline std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

/** Stable dedup key: hash of all numeric inputs at full precision. */
inline std::string run_id_for(const ModelParams& p, const GridSpec& g,
                              const InitialData& init) {
  using detail::g17;
  std::string s = "a=" + g17(p.a) + ";b=" + g17(p.b) + ";chi=" + g17(p.chi) +
                  ";tau=" + g17(p.tau) + ";sigma=" + g17(p.sigma) +
                  ";c=" + g17(p.c) + ";L=" + g17(g.L) + ";M=" + std::to_string(g.M) +
                  ";T=" + g17(g.T) + ";dt=" + g17(g.dt) + ";init=" +
                  (init.kind() == InitialData::Kind::PaperBump ? "paperbump" : "custom");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(detail::fnv1a64(s)));
  return buf;
}

inline std::string record_csv_row(const RunRecord& r) {
  using detail::g17;
  std::ostringstream os;
  os << r.run_id << ',' << g17(r.chi) << ',' << g17(r.c) << ',' << g17(r.tau)
     << ',' << g17(r.sigma) << ',' << g17(r.a) << ',' << g17(r.b) << ','
     << g17(r.L) << ',' << r.M << ',' << g17(r.T) << ',' << g17(r.dt) << ','
     << r.verdict << ',' << g17(r.final_max_u) << ',' << g17(r.center_min_u)
     << ',' << g17(r.decision_time) << ',' << g17(r.min_u) << ',' << g17(r.max_u)
     << ',' << g17(r.min_v) << ',' << g17(r.max_v) << ',' << g17(r.wall_ms);
  return os.str();
}

inline nlohmann::json record_json(const RunRecord& r) {
  nlohmann::json j;
  j["run_id"] = r.run_id;
  j["params"] = {{"a", r.a},     {"b", r.b},   {"chi", r.chi},
                 {"tau", r.tau}, {"sigma", r.sigma}, {"c", r.c}};
  j["grid"] = {{"L", r.L}, {"M", r.M}, {"T", r.T}, {"dt", r.dt}};
  j["verdict"] = r.verdict;
  j["basis"] = r.basis;
  j["final_max_u"] = r.final_max_u;
  j["center_min_u"] = r.center_min_u;
  j["decision_time"] = r.decision_time;
  j["front_drift"] = r.front_drift;
  j["logmax_slope"] = r.logmax_slope;
  j["diagnostics"] = {{"min_u", r.min_u}, {"max_u", r.max_u},
                      {"min_v", r.min_v}, {"max_v", r.max_v}};
  j["wall_ms"] = r.wall_ms;
  if (!r.skip_reason.empty()) j["skip_reason"] = r.skip_reason;
  return j;
}

/**
 * Append-only record store: records.csv (the pinned column set) plus
 * records.jsonl with full provenance, one object per run. Existing rows
 * are loaded on open so interrupted sweeps resume without recomputation.
 */
class RecordSink {
 public:
  explicit RecordSink(const std::filesystem::path& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
    load_existing();
    const bool fresh = existing_.empty();
    csv_.open(dir_ / "records.csv", std::ios::app);
    jsonl_.open(dir_ / "records.jsonl", std::ios::app);
    if (!csv_ || !jsonl_)
      throw std::runtime_error("RecordSink: cannot open record files in " + dir_.string());
    if (fresh) csv_ << kRecordCsvHeader << '\n';
  }

  bool contains(const std::string& run_id) const {
    for (const auto& r : existing_)
      if (r.run_id == run_id) return true;
    return false;
  }

  const std::vector<RunRecord>& existing() const { return existing_; }

  void append(const RunRecord& r) {
    std::lock_guard<std::mutex> lock(mu_);
    csv_ << record_csv_row(r) << '\n';
    csv_.flush();
    jsonl_ << record_json(r).dump() << '\n';
    jsonl_.flush();
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  void load_existing() {
    std::ifstream in(dir_ / "records.jsonl");
    if (!in) return;
    // NaN serializes as null, so numeric fields need a null-tolerant read
    auto num = [](const nlohmann::json& j, const char* key) {
      return j.contains(key) && j[key].is_number() ? j[key].get<double>()
                                                   : std::nan("");
    };
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto j = nlohmann::json::parse(line);
      RunRecord r;
      r.run_id = j.at("run_id").get<std::string>();
      r.a = j["params"]["a"];
      r.b = j["params"]["b"];
      r.chi = j["params"]["chi"];
      r.tau = j["params"]["tau"];
      r.sigma = j["params"]["sigma"];
      r.c = j["params"]["c"];
      r.L = j["grid"]["L"];
      r.M = j["grid"]["M"];
      r.T = j["grid"]["T"];
      r.dt = j["grid"]["dt"];
      r.verdict = j.value("verdict", "Undetermined");
      r.basis = j.value("basis", "None");
      r.final_max_u = num(j, "final_max_u");
      r.center_min_u = num(j, "center_min_u");
      r.decision_time = num(j, "decision_time");
      r.front_drift = num(j, "front_drift");
      r.logmax_slope = num(j, "logmax_slope");
      if (j.contains("diagnostics")) {
        r.min_u = num(j["diagnostics"], "min_u");
        r.max_u = num(j["diagnostics"], "max_u");
        r.min_v = num(j["diagnostics"], "min_v");
        r.max_v = num(j["diagnostics"], "max_v");
      }
      r.wall_ms = num(j, "wall_ms");
      r.skip_reason = j.value("skip_reason", "");
      existing_.push_back(std::move(r));
    }
  }

  std::filesystem::path dir_;
  std::vector<RunRecord> existing_;
  std::ofstream csv_, jsonl_;
  std::mutex mu_;
};

namespace detail {

inline RunRecord classify_cell(const ModelParams& p, const GridSpec& g,
                               const InitialData& init, const ClassifyOptions& copt,
                               SweepPlan::Mode mode, const std::filesystem::path* snap_dir) {
  RunRecord r;
  r.run_id = run_id_for(p, g, init);
  r.chi = p.chi;
  r.c = p.c;
  r.tau = p.tau;
  r.sigma = p.sigma;
  r.a = p.a;
  r.b = p.b;
  r.L = g.L;
  r.M = g.M;
  r.T = g.T;
  r.dt = g.dt;

  auto rep = validate(p, g, &init);
  if (!rep.ok()) {
    r.verdict = "Skipped";
    r.skip_reason = rep.errors.front();
    return r;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::vector<Observer> obs;
    SnapshotRecorder rec(g);
    if (mode == SweepPlan::Mode::FullSnapshots && snap_dir) obs.push_back(rec.observer());
    Outcome o = classify(p, g, init, copt, obs);
    r.verdict = to_string(o.verdict);
    r.basis = to_string(o.basis);
    r.final_max_u = o.final_max_u;
    r.center_min_u = o.center_min_u;
    r.decision_time = o.decision_time;
    r.front_drift = o.front_drift;
    r.logmax_slope = o.logmax_slope;
    r.min_u = o.stats.min_u;
    r.max_u = o.stats.max_u;
    r.min_v = o.stats.min_v;
    r.max_v = o.stats.max_v;
    if (mode == SweepPlan::Mode::FullSnapshots && snap_dir) {
      std::filesystem::create_directories(*snap_dir);
      std::ofstream os(*snap_dir / (r.run_id + ".csv"));
      write_snapshot_csv(os, rec.series());
    }
  } catch (const BlowUpError& e) {
    r.verdict = "BlowUp";
    r.decision_time = e.t;
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

}  // namespace detail

/**
 * Classifies every combination of the plan's axes. Work is pulled from a
 * shared atomic counter by `workers` threads; each simulation is
 * single-threaded and independent, so the record set (wall time aside) is
 * identical for any worker count. Previously persisted run ids are reused,
 * never recomputed. A BlowUp is recorded per-run and never aborts the sweep.
 * Records are returned sorted by (chi, c, tau, sigma).
 */
inline std::vector<RunRecord> execute(const SweepPlan& plan, int workers,
                                      RecordSink* sink = nullptr,
                                      const ClassifyOptions& copt = {}) {
  if (plan.chi.empty() || plan.c.empty() || plan.tau.empty() || plan.sigma.empty())
    throw std::invalid_argument("sweep: every axis needs at least one value");

  struct Cell {
    ModelParams p;
    std::string id;
  };
  std::vector<Cell> cells;
  for (double chi : plan.chi)
    for (double c : plan.c)
      for (double tau : plan.tau)
        for (double sigma : plan.sigma) {
          ModelParams p = plan.base;
          p.chi = chi;
          p.c = c;
          p.tau = tau;
          p.sigma = sigma;
          cells.push_back({p, run_id_for(p, plan.grid, plan.init)});
        }

  std::vector<RunRecord> records(cells.size());
  std::vector<char> fresh(cells.size(), 0);
  std::filesystem::path snap_dir = sink ? sink->dir() / "runs" : std::filesystem::path();

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      if (sink && sink->contains(cells[i].id)) {
        for (const auto& r : sink->existing())
          if (r.run_id == cells[i].id) {
            records[i] = r;
            break;
          }
        continue;
      }
      records[i] = detail::classify_cell(cells[i].p, plan.grid, plan.init, copt,
                                         plan.mode, sink ? &snap_dir : nullptr);
      fresh[i] = 1;
    }
  };

  workers = std::max(1, workers);
  if (workers == 1 || cells.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int nthreads = std::min<std::size_t>(workers, cells.size());
    pool.reserve(nthreads);
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (sink)
    for (std::size_t i = 0; i < records.size(); ++i)
      if (fresh[i]) sink->append(records[i]);

  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) {
              return a.sort_key() < b.sort_key();
            });
  return records;
}

/** Verdict-symbol matrix over two named axes; missing cells marked '.'. */
struct PhaseTable {
  std::string row_axis, col_axis;
  std::vector<double> rows, cols;
  std::vector<std::string> cells;  // row-major

  const std::string& at(std::size_t r, std::size_t c) const {
    return cells[r * cols.size() + c];
  }

  std::string to_text() const {
    std::ostringstream os;
    os << row_axis << "\\" << col_axis;
    for (double c : cols) os << '\t' << c;
    os << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
      os << rows[r];
      for (std::size_t c = 0; c < cols.size(); ++c) os << '\t' << at(r, c);
      os << '\n';
    }
    return os.str();
  }
};

inline PhaseTable phase_table(const std::vector<RunRecord>& records,
                              const std::string& row_axis,
                              const std::string& col_axis) {
  auto field = [](const RunRecord& r, const std::string& axis) {
    if (axis == "chi") return r.chi;
    if (axis == "c") return r.c;
    if (axis == "tau") return r.tau;
    if (axis == "sigma") return r.sigma;
    throw std::invalid_argument("phase_table: unknown axis " + axis);
  };
  auto symbol = [](const std::string& verdict) -> std::string {
    if (verdict == "Persisted") return "P";
    if (verdict == "Decayed") return "D";
    if (verdict == "Undetermined") return "U";
    if (verdict == "BlowUp") return "B";
    if (verdict == "Skipped") return "S";
    return "?";
  };

  PhaseTable t;
  t.row_axis = row_axis;
  t.col_axis = col_axis;
  for (const auto& r : records) {
    t.rows.push_back(field(r, row_axis));
    t.cols.push_back(field(r, col_axis));
  }
  auto uniq = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(t.rows);
  uniq(t.cols);
  t.cells.assign(t.rows.size() * t.cols.size(), ".");
  for (const auto& r : records) {
    const auto ri = std::lower_bound(t.rows.begin(), t.rows.end(),
                                     field(r, row_axis)) - t.rows.begin();
    const auto ci = std::lower_bound(t.cols.begin(), t.cols.end(),
                                     field(r, col_axis)) - t.cols.begin();
    t.cells[ri * t.cols.size() + ci] = symbol(r.verdict);
  }
  return t;
}

}  // namespace chemospread
