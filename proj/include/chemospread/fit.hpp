#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace chemospread {

struct LinearFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
  bool valid() const { return n >= 2 && std::isfinite(slope); }
};

/** Ordinary least-squares line through (x[i], y[i]). */
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  LinearFit f;
  f.n = std::min(x.size(), y.size());
  if (f.n < 2) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < f.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= f.n;
  my /= f.n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < f.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx > 0.0) {
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
  }
  return f;
}

}  // namespace chemospread
