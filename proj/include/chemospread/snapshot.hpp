#pragma once

// Snapshot storage and the CSV stream format `step,t,x,u,v`
// (one row per node per observed step, written incrementally).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemospread/model.hpp"
#include "chemospread/stepper.hpp"

namespace chemospread {

/** In-memory time series of field snapshots on one grid. */
struct SnapshotSeries {
  double L = 0.0;
  int M = 0;
  std::vector<long> steps;
  std::vector<double> times;
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> v;

  int nodes() const { return M + 1; }
  double h() const { return 2.0 * L / M; }
  double x(int i) const { return -L + i * h(); }
  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  double t_last() const { return times.back(); }

  void add(const FieldState& s) {
    steps.push_back(s.step_index);
    times.push_back(s.t);
    u.push_back(s.u);
    v.push_back(s.v);
  }
};

/** Observer that accumulates snapshots in memory. */
class SnapshotRecorder {
 public:
  explicit SnapshotRecorder(const GridSpec& g) {
    series_.L = g.L;
    series_.M = g.M;
  }
  Observer observer() {
    return [this](const FieldState& s) { series_.add(s); };
  }
  const SnapshotSeries& series() const { return series_; }
  SnapshotSeries take() { return std::move(series_); }

 private:
  SnapshotSeries series_;
};

namespace detail {
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}
}  // namespace detail

inline void write_snapshot_csv(std::ostream& os, const SnapshotSeries& s) {
  os << "step,t,x,u,v\n";
  for (std::size_t k = 0; k < s.size(); ++k)
    for (int i = 0; i < s.nodes(); ++i)
      os << s.steps[k] << ',' << detail::format_double(s.times[k]) << ','
         << detail::format_double(s.x(i)) << ','
         << detail::format_double(s.u[k][i]) << ','
         << detail::format_double(s.v[k][i]) << '\n';
}

/** Observer that appends rows to an open CSV stream as the run progresses. */
class SnapshotCsvWriter {
 public:
  SnapshotCsvWriter(std::ostream& os, const GridSpec& g) : os_(os), grid_(g) {
    os_ << "step,t,x,u,v\n";
  }
  Observer observer() {
    return [this](const FieldState& s) {
      for (int i = 0; i < grid_.nodes(); ++i)
        os_ << s.step_index << ',' << detail::format_double(s.t) << ','
            << detail::format_double(grid_.x(i)) << ','
            << detail::format_double(s.u[i]) << ','
            << detail::format_double(s.v[i]) << '\n';
    };
  }

 private:
  std::ostream& os_;
  GridSpec grid_;
};

/** Parses a `step,t,x,u,v` stream back into a series. */
inline SnapshotSeries read_snapshot_csv(std::istream& is) {
  SnapshotSeries s;
  std::string line;
  if (!std::getline(is, line) || line.rfind("step,t,x,u,v", 0) != 0)
    throw std::runtime_error("snapshot CSV: missing step,t,x,u,v header");

  long cur_step = -1;
  std::vector<double> xs, us, vs;
  auto flush = [&]() {
    if (cur_step < 0) return;
    if (s.M == 0) {
      s.M = static_cast<int>(xs.size()) - 1;
      s.L = -xs.front();
    } else if (static_cast<int>(xs.size()) != s.M + 1) {
      throw std::runtime_error("snapshot CSV: inconsistent node count");
    }
    s.steps.push_back(cur_step);
    s.u.push_back(us);
    s.v.push_back(vs);
    us.clear();
    vs.clear();
    xs.clear();
  };

  double cur_t = 0.0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    long stp;
    double t, x, uu, vv;
    if (std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf", &stp, &t, &x, &uu, &vv) != 5)
      throw std::runtime_error("snapshot CSV: bad row: " + line);
    if (stp != cur_step) {
      flush();
      if (cur_step >= 0) s.times.push_back(cur_t);
      cur_step = stp;
    }
    cur_t = t;
    xs.push_back(x);
    us.push_back(uu);
    vs.push_back(vv);
  }
  flush();
  if (cur_step >= 0) s.times.push_back(cur_t);
  if (s.times.size() != s.u.size())
    throw std::runtime_error("snapshot CSV: malformed stream");
  return s;
}

}  // namespace chemospread
