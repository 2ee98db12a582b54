#pragma once

// Explicit finite-difference stepping for the comoving cut-off system:
// forward time, centered space, exactly as the update formulas read
//
//   u(j+1,i) = u(j,i)*[1 + a*dt - 2*dt/h^2 - (chi*dt/h^2)*(v(j,i-1) - 2v(j,i) + v(j,i+1))]
//            + u(j,i-1)*[dt/h^2 - (dt/2h)*(c - chi*(v(j,i+1)-v(j,i-1))/(2h))]
//            + u(j,i+1)*[dt/h^2 + (dt/2h)*(c - chi*(v(j,i+1)-v(j,i-1))/(2h))]
//            - b*dt*u(j,i)^(1+sigma)
//   v(j+1,i) = v(j,i)*(1 - (dt/tau)*u(j,i) - 2*dt/(tau h^2))
//            + v(j,i-1)*(dt/(tau h^2) - c*dt/(2h))
//            + v(j,i+1)*(dt/(tau h^2) + c*dt/(2h))
//
// for interior nodes, then u[0] = u[M] = 0 and the Neumann copies
// v[0] = v[1], v[M] = v[M-1] on the freshly updated row.
//
// No upwinding or flux limiting: central differences as printed, with a
// BlowUpError as the failure mode when the advective CFL is violated.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemospread/model.hpp"

namespace chemospread {

/** Non-finite value produced by the scheme (instability). */
struct BlowUpError : std::runtime_error {
  long step_index;
  double t;
  BlowUpError(long step, double time)
      : std::runtime_error("numerical blow-up at step " + std::to_string(step) +
                           ", t = " + std::to_string(time)),
        step_index(step), t(time) {}
};

/** Scratch arrays reused across steps; contents meaningless between calls. */
struct StepWorkspace {
  std::vector<double> next_u, next_v;
  void fit(std::size_t n) {
    next_u.resize(n);
    next_v.resize(n);
  }
};

/** Extrema of u and v over every step of a run. */
struct RunStats {
  double min_u = std::numeric_limits<double>::infinity();
  double max_u = -std::numeric_limits<double>::infinity();
  double min_v = std::numeric_limits<double>::infinity();
  double max_v = -std::numeric_limits<double>::infinity();

  void absorb(const std::vector<double>& u, const std::vector<double>& v) {
    for (double x : u) {
      min_u = std::fmin(min_u, x);
      max_u = std::fmax(max_u, x);
    }
    for (double x : v) {
      min_v = std::fmin(min_v, x);
      max_v = std::fmax(max_v, x);
    }
  }
};

namespace detail {

struct StepCoeffs {
  double a_dt, b_dt, dt_h2, dt_2h, chi_dt_h2, chi_inv2h, c;
  double dt_tau, dt_tau_h2, c_dt_2h;
  double sigma;
  bool sigma_is_one;

  static StepCoeffs from(const ModelParams& p, const GridSpec& g) {
    StepCoeffs k;
    const double h = g.h(), dt = g.dt;
    k.a_dt = p.a * dt;
    k.b_dt = p.b * dt;
    k.dt_h2 = dt / (h * h);
    k.dt_2h = dt / (2.0 * h);
    k.chi_dt_h2 = p.chi * dt / (h * h);
    k.chi_inv2h = p.chi / (2.0 * h);
    k.c = p.c;
    k.dt_tau = dt / p.tau;
    k.dt_tau_h2 = dt / (p.tau * h * h);
    k.c_dt_2h = p.c * dt / (2.0 * h);
    k.sigma = p.sigma;
    k.sigma_is_one = (p.sigma == 1.0);
    return k;
  }
};

template <bool Sigma1>
inline void advance_row(const double* u, const double* v, double* nu, double* nv,
                        int M, const StepCoeffs& k) {
  for (int i = 1; i < M; ++i) {
    const double um = u[i - 1], uc = u[i], up = u[i + 1];
    const double vm = v[i - 1], vc = v[i], vp = v[i + 1];
    const double lap_v = vm - 2.0 * vc + vp;
    const double adv = k.c - k.chi_inv2h * (vp - vm);
    double react;
    if constexpr (Sigma1) {
      react = k.b_dt * uc * uc;
    } else {
      // clamp only inside the power: fractional powers of roundoff-negative
      // values are NaN; the linear terms stay untouched
      react = k.b_dt * uc * std::pow(std::max(uc, 0.0), k.sigma);
    }
    nu[i] = uc * (1.0 + k.a_dt - 2.0 * k.dt_h2 - k.chi_dt_h2 * lap_v) +
            um * (k.dt_h2 - k.dt_2h * adv) + up * (k.dt_h2 + k.dt_2h * adv) -
            react;
    nv[i] = vc * (1.0 - k.dt_tau * uc - 2.0 * k.dt_tau_h2) +
            vm * (k.dt_tau_h2 - k.c_dt_2h) + vp * (k.dt_tau_h2 + k.c_dt_2h);
  }
  nu[0] = 0.0;
  nu[M] = 0.0;
  nv[0] = nv[1];
  nv[M] = nv[M - 1];
}

/** True if any entry is NaN, infinite, or absurdly large. */
inline bool row_bad(const double* nu, const double* nv, int n) {
  bool bad = false;
  for (int i = 0; i < n; ++i) {
    bad |= !(std::fabs(nu[i]) <= 1e300);
    bad |= !(std::fabs(nv[i]) <= 1e300);
  }
  return bad;
}

}  // namespace detail

/**
 * Advances the state by one time step in place (buffers swap with the
 * workspace). Throws BlowUpError when the new row is non-finite.
 */
inline void step(FieldState& s, const ModelParams& p, const GridSpec& g,
                 StepWorkspace& ws, RunStats* stats = nullptr) {
  const int M = g.M;
  ws.fit(s.u.size());
  const auto k = detail::StepCoeffs::from(p, g);
  if (k.sigma_is_one)
    detail::advance_row<true>(s.u.data(), s.v.data(), ws.next_u.data(),
                              ws.next_v.data(), M, k);
  else
    detail::advance_row<false>(s.u.data(), s.v.data(), ws.next_u.data(),
                               ws.next_v.data(), M, k);
  s.u.swap(ws.next_u);
  s.v.swap(ws.next_v);
  ++s.step_index;
  s.t = s.step_index * g.dt;
  if (detail::row_bad(s.u.data(), s.v.data(), M + 1))
    throw BlowUpError(s.step_index, s.t);
  if (stats) stats->absorb(s.u, s.v);
}

/** Read-only snapshot callback. */
using Observer = std::function<void(const FieldState&)>;

struct RunOptions {
  long snapshot_stride = 0;  // 0: pick a stride giving ~200 snapshots
  long check_stride = 50;    // cadence of the stop-condition evaluation
  std::function<bool(const FieldState&)> stop;  // return true to end the run
  RunStats* stats = nullptr;
};

inline long default_snapshot_stride(long nsteps) {
  return std::max<long>(1, nsteps / 200);
}

/**
 * Applies step() ceil(T/dt) times, invoking every observer on the initial
 * state, every `snapshot_stride` steps, and on the final state. The optional
 * stop condition is evaluated every `check_stride` steps. Deterministic:
 * identical inputs produce bit-identical trajectories.
 */
inline FieldState run(FieldState state, const ModelParams& p, const GridSpec& g,
                      const std::vector<Observer>& observers = {},
                      const RunOptions& opt = {}) {
  const long nsteps = g.steps();
  const long stride =
      opt.snapshot_stride > 0 ? opt.snapshot_stride : default_snapshot_stride(nsteps);
  StepWorkspace ws;
  auto notify = [&](const FieldState& s) {
    for (const auto& ob : observers) ob(s);
  };
  notify(state);
  long last_notified = 0;
  for (long n = 1; n <= nsteps; ++n) {
    step(state, p, g, ws, opt.stats);
    if (n % stride == 0) {
      notify(state);
      last_notified = n;
    }
    if (opt.stop && n % opt.check_stride == 0 && opt.stop(state)) break;
  }
  if (state.step_index != last_notified) notify(state);
  return state;
}

/** Heat-equation baseline tau V_t = V_xx, Neumann at both ends. */
struct HeatBaseline {
  std::vector<double> times;
  std::vector<std::vector<double>> V;
};

/**
 * Evolves v0 by the v-scheme with u = 0 and c = 0 (so V and the main run
 * share the same discretization error). Requires dt/h^2 < tau/2, the
 * stability bound for diffusion coefficient 1/tau. Snapshots recorded at
 * t = 0, every `snapshot_stride` steps, and at the end, matching run().
 */
inline HeatBaseline run_heat(const std::vector<double>& v0, double tau,
                             const GridSpec& g, long snapshot_stride = 0) {
  if (v0.size() != static_cast<std::size_t>(g.nodes()))
    throw std::invalid_argument("run_heat: v0 size does not match grid");
  if (!(g.diffusive_ratio() < tau / 2.0))
    throw std::invalid_argument("run_heat: dt/h^2 must be < tau/2");
  const int M = g.M;
  const long nsteps = g.steps();
  const long stride =
      snapshot_stride > 0 ? snapshot_stride : default_snapshot_stride(nsteps);
  const double gam = g.dt / (tau * g.h() * g.h());

  std::vector<double> V = v0;
  V[0] = V[1];
  V[M] = V[M - 1];
  std::vector<double> W(V.size());

  HeatBaseline out;
  out.times.push_back(0.0);
  out.V.push_back(V);
  for (long n = 1; n <= nsteps; ++n) {
    for (int i = 1; i < M; ++i)
      W[i] = V[i] * (1.0 - 2.0 * gam) + V[i - 1] * gam + V[i + 1] * gam;
    W[0] = W[1];
    W[M] = W[M - 1];
    V.swap(W);
    if (detail::row_bad(V.data(), V.data(), M + 1))
      throw BlowUpError(n, n * g.dt);
    if (n % stride == 0 || n == nsteps) {
      out.times.push_back(n * g.dt);
      out.V.push_back(V);
    }
  }
  return out;
}

}  // namespace chemospread
