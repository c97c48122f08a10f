#pragma once

// Least-squares fits of exponential decay, used by the rate audits.

#include <vector>

namespace auf {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = slope x + intercept. Throws InvalidArgument with < 2 points.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct RateFit {
  /// Slope of log(value) against x.
  double rate = 0.0;
  double intercept = 0.0;
  /// Reference slope, normally log q.
  double target = 0.0;
  /// |rate - target| / |target|.
  double relative_error = 0.0;
  /// Smallest C with value <= C base^x at every point.
  double envelope = 0.0;
  std::size_t points = 0;
};

/// Fits log(values) against x, skipping values <= floor; the envelope uses base^x.
RateFit fit_rate(const std::vector<double>& x, const std::vector<double>& values, double base, double floor = 1e-300);

/// Largest values[i] base^{-x[i]} divided by the same quantity at the first point. A result <= 1
/// means the envelope C base^x with C fixed by the first point covers every later point.
double envelope_ratio(const std::vector<double>& x, const std::vector<double>& values, double base);

}  // namespace auf
