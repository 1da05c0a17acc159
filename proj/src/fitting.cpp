#include "solitonforge/fitting.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "solitonforge/errors.hpp"

namespace solitonforge {

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw SolverError(ErrorKind::InvalidArgument, "line fit needs >= 2 paired samples");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw SolverError(ErrorKind::FitFailure, "degenerate abscissae in line fit");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = x.size();
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

DecayFit fit_exponential_decay(std::span<const double> t, std::span<const double> y,
                               ValueWindow values) {
  if (t.size() != y.size()) {
    throw SolverError(ErrorKind::InvalidArgument, "decay fit needs paired samples");
  }
  std::vector<double> ts, logs;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double v = y[i];
    if (!(v > 0.0) || !std::isfinite(v)) continue;
    if (v < values.lo) continue;
    if (values.hi > values.lo && v > values.hi) continue;
    ts.push_back(t[i]);
    logs.push_back(std::log(v));
  }
  if (ts.size() < 3) {
    std::ostringstream msg;
    msg << "only " << ts.size() << " samples inside the fit window";
    throw SolverError(ErrorKind::WindowEmpty, msg.str());
  }
  const LinearFit line = fit_line(ts, logs);
  DecayFit fit;
  fit.rate = -line.slope;
  fit.prefactor = std::exp(line.intercept);
  fit.r_squared = line.r_squared;
  fit.window_lo = ts.front();
  fit.window_hi = ts.back();
  fit.points = ts.size();
  return fit;
}

}  // namespace solitonforge
