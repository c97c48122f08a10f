#include "auf/fit.hpp"

#include <algorithm>
#include <cmath>

#include "auf/error.hpp"

namespace auf {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) fail(ErrorKind::InvalidArgument, "fit_line: size mismatch");
  if (x.size() < 2) fail(ErrorKind::InvalidArgument, "fit_line needs at least two points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) fail(ErrorKind::InvalidArgument, "fit_line: all x equal");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = x.size();
  return f;
}

RateFit fit_rate(const std::vector<double>& x, const std::vector<double>& values, double base, double floor) {
  std::vector<double> xs;
  std::vector<double> ls;
  RateFit out;
  out.target = std::log(base);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(values[i] > floor)) continue;
    xs.push_back(x[i]);
    ls.push_back(std::log(values[i]));
    out.envelope = std::max(out.envelope, values[i] / std::pow(base, x[i]));
  }
  const LineFit f = fit_line(xs, ls);
  out.rate = f.slope;
  out.intercept = f.intercept;
  out.points = f.points;
  out.relative_error = std::abs(out.rate - out.target) / std::abs(out.target);
  return out;
}

double envelope_ratio(const std::vector<double>& x, const std::vector<double>& values, double base) {
  if (x.size() != values.size() || x.empty()) fail(ErrorKind::InvalidArgument, "envelope needs matching nonempty data");
  if (!(values[0] > 0.0)) fail(ErrorKind::InvalidArgument, "envelope anchor must be positive");
  const double c = values[0] / std::pow(base, x[0]);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, values[i] / std::pow(base, x[i]) / c);
  return worst;
}

}  // namespace auf
