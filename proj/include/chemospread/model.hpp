#pragma once

// Core configuration and state types for the comoving-frame
// chemotaxis-consumption simulator:
//
//   u_t = u_xx + c u_x - chi*(u v_x)_x + u*(a - b*u^sigma)
//   tau v_t = v_xx + c tau v_x - u v
//
// on (-L, L) with u = 0 (Dirichlet) and v_x = 0 (Neumann) at both ends.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemospread {

/** All PDE coefficients plus the comoving frame speed c. */
struct ModelParams {
  double a = 1.0;      // growth rate (> 0)
  double b = 1.0;      // self-limitation (> 0)
  double chi = 0.0;    // chemotaxis sensitivity (signed)
  double tau = 1.0;    // chemical time constant (> 0)
  double sigma = 1.0;  // logistic exponent (> 0)
  double c = 0.0;      // frame speed (signed)

  /** Fisher-KPP spreading speed 2*sqrt(a); derived, never stored. */
  double kpp_speed() const { return 2.0 * std::sqrt(a); }

  /** Stable population level (a/b)^(1/sigma). */
  double carrying_capacity() const {
    return sigma == 1.0 ? a / b : std::pow(a / b, 1.0 / sigma);
  }
};

/** Uniform space-time lattice on [-L, L] x [0, T]: M subintervals, step dt. */
struct GridSpec {
  double L = 20.0;
  int M = 400;       // number of space subintervals (>= 4, even)
  double T = 500.0;
  double dt = 0.002;

  double h() const { return 2.0 * L / M; }
  int nodes() const { return M + 1; }
  double x(int i) const { return -L + i * h(); }

  /** Number of time steps, ceil(T/dt) with a roundoff guard. */
  long steps() const {
    if (T <= 0.0) return 0;
    return static_cast<long>(std::ceil(T / dt - 1e-9));
  }

  double diffusive_ratio() const { return dt / (h() * h()); }
};

/** Initial profiles (u0, v0) with their stated bounds. */
class InitialData {
 public:
  enum class Kind { PaperBump, Custom };

  /** u0(x) = exp(1/(x^2-1)) on (-1,1), 0 elsewhere; v0(x) = 1. */
  static InitialData paper_bump() { return InitialData(); }

  static InitialData custom(std::function<double(double)> u0,
                            std::function<double(double)> v0,
                            double support_radius, double v0_max) {
    InitialData d;
    d.kind_ = Kind::Custom;
    d.u0_ = std::move(u0);
    d.v0_ = std::move(v0);
    d.support_radius_ = support_radius;
    d.v0_max_ = v0_max;
    return d;
  }

  Kind kind() const { return kind_; }
  double support_radius() const { return support_radius_; }
  double v0_max() const { return v0_max_; }

  double u0(double x) const {
    if (kind_ == Kind::PaperBump) {
      // The bump underflows to 0 well before |x| = 1; the guard keeps
      // exp(1/(x^2-1)) from overflowing at |x| slightly above 1.
      if (std::abs(x) >= 1.0 - 1e-12) return 0.0;
      return std::exp(1.0 / (x * x - 1.0));
    }
    return u0_(x);
  }

  double v0(double x) const {
    if (kind_ == Kind::PaperBump) return 1.0;
    return v0_(x);
  }

 private:
  InitialData() = default;
  Kind kind_ = Kind::PaperBump;
  std::function<double(double)> u0_, v0_;
  double support_radius_ = 1.0;
  double v0_max_ = 1.0;
};

/** Discrete state: node values of (u, v) at one time level. */
struct FieldState {
  long step_index = 0;
  double t = 0.0;
  std::vector<double> u;  // M+1 values, u[0] = u[M] = 0
  std::vector<double> v;  // M+1 values, v[0] = v[1], v[M] = v[M-1]

  double max_u() const {
    double m = 0.0;
    for (double x : u) m = x > m ? x : m;
    return m;
  }
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

namespace detail {
inline std::string fmt_ratio(const char* what, double value, double bound) {
  std::ostringstream os;
  os << what << " = " << value << " (bound " << bound << ")";
  return os.str();
}
}  // namespace detail

/**
 * Checks the hard stability bound dt/h^2 < 0.5 and coefficient signs;
 * soft warnings for the advective ratio and for u0 support close to the
 * cut-off boundary. Pure: never throws, callers decide.
 *
 * gradient_guard is the assumed bound on |v_x| entering the advective
 * CFL estimate (|c|*max(1,tau) + |chi|*guard)*dt/h.
 */
inline ValidationReport validate(const ModelParams& p, const GridSpec& g,
                                 const InitialData* init = nullptr,
                                 double gradient_guard = 1.0) {
  ValidationReport r;
  auto bad = [&](bool cond, const std::string& msg) {
    if (cond) r.errors.push_back(msg);
  };
  bad(!(p.a > 0.0) || !std::isfinite(p.a), "a must be positive and finite");
  bad(!(p.b > 0.0) || !std::isfinite(p.b), "b must be positive and finite");
  bad(!(p.tau > 0.0) || !std::isfinite(p.tau), "tau must be positive and finite");
  bad(!(p.sigma > 0.0) || !std::isfinite(p.sigma), "sigma must be positive and finite");
  bad(!std::isfinite(p.chi), "chi must be finite");
  bad(!std::isfinite(p.c), "c must be finite");
  bad(!(g.L > 0.0) || !std::isfinite(g.L), "L must be positive and finite");
  bad(!(g.dt > 0.0) || !std::isfinite(g.dt), "dt must be positive and finite");
  bad(g.T < 0.0 || !std::isfinite(g.T), "T must be nonnegative and finite");
  bad(g.M < 4, "M must be at least 4");
  bad(g.M % 2 != 0, "M must be even");
  if (!r.errors.empty()) return r;

  // dt/h^2 < 0.5 with h = 2L/M, evaluated as dt*M^2 < 2*L^2 so that the
  // printed boundary configuration (h = 0.1, dt = 0.005) lands exactly on
  // the bound instead of a roundoff hair below it
  if (!(g.dt * g.M * g.M < 2.0 * g.L * g.L))
    r.errors.push_back(
        detail::fmt_ratio("diffusive ratio dt/h^2", g.diffusive_ratio(), 0.5));

  const double adv =
      (std::abs(p.c) * std::max(1.0, p.tau) + std::abs(p.chi) * gradient_guard) *
      g.dt / g.h();
  if (adv >= 1.0)
    r.warnings.push_back(detail::fmt_ratio("advective ratio", adv, 1.0));

  if (init && g.L - init->support_radius() < 2.0)
    r.warnings.push_back("u0 support within 2 of the cut-off boundary");
  return r;
}

/** Raised when a custom initial profile samples to NaN or out of bounds. */
struct InvalidInitialData : std::runtime_error {
  int index;
  InvalidInitialData(const std::string& msg, int idx)
      : std::runtime_error(msg), index(idx) {}
};

/** Samples (u0, v0) on the grid nodes and enforces the boundary rows. */
inline FieldState sample_initial(const InitialData& init, const GridSpec& g) {
  FieldState s;
  const int n = g.nodes();
  s.u.resize(n);
  s.v.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = g.x(i);
    const double u = init.u0(x);
    const double v = init.v0(x);
    if (!std::isfinite(u) || u < 0.0)
      throw InvalidInitialData("u0 sample invalid at node " + std::to_string(i), i);
    if (!std::isfinite(v) || v < 0.0 || v > init.v0_max())
      throw InvalidInitialData("v0 sample out of [0, v0_max] at node " + std::to_string(i), i);
    s.u[i] = u;
    s.v[i] = v;
  }
  s.u[0] = 0.0;
  s.u[n - 1] = 0.0;
  s.v[0] = s.v[1];
  s.v[n - 1] = s.v[n - 2];
  return s;
}

}  // namespace chemospread
