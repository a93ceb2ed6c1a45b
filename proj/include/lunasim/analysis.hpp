#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lunasim {

/// Least-squares slope of log10(series[t-1]) against log10(t) for t in
/// [lo, hi] (1-based, clipped to the series). Non-positive values are skipped.
inline double slope_estimate(const std::vector<double>& series, long lo, long hi) {
  if (lo < 1) lo = 1;
  if (hi > static_cast<long>(series.size())) hi = static_cast<long>(series.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long n = 0;
  for (long t = lo; t <= hi; ++t) {
    const double v = series[static_cast<std::size_t>(t - 1)];
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    const double x = std::log10(static_cast<double>(t));
    const double y = std::log10(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 10) throw std::invalid_argument("slope_estimate: fewer than 10 usable points in the window");
  const double nn = static_cast<double>(n);
  const double den = sxx - sx * sx / nn;
  if (!(den > 0.0)) throw std::invalid_argument("slope_estimate: degenerate window");
  return (sxy - sx * sy / nn) / den;
}

/// Default window [T/10, T].
inline double slope_estimate(const std::vector<double>& series) {
  const auto T = static_cast<long>(series.size());
  return slope_estimate(series, std::max(1L, T / 10), T);
}

/// Slope of log10(y) against log10(x) over paired points, for end-of-horizon
/// regrets across several horizons.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need at least two pairs");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("loglog_slope: values must be positive");
    const double a = std::log10(x[i]);
    const double b = std::log10(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  const double n = static_cast<double>(x.size());
  return (sxy - sx * sy / n) / (sxx - sx * sx / n);
}

}  // namespace lunasim
