#pragma once

#include <cstddef>
#include <span>

namespace solitonforge {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = slope * x + intercept.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// y(t) ~ prefactor * exp(-rate * t).
struct DecayFit {
  double rate = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t points = 0;
};

struct ValueWindow {
  double lo = 0.0;
  double hi = 0.0;  // hi <= lo means unbounded above
};

/// Least-squares fit of log y against t over the samples whose value lies in
/// `values` (y > 0 always required). Throws WindowEmpty with fewer than
/// three usable samples.
DecayFit fit_exponential_decay(std::span<const double> t, std::span<const double> y,
                               ValueWindow values = {});

}  // namespace solitonforge
