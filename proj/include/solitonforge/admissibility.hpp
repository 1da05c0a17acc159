#pragma once

// Parameter conditions for gluing: relative velocities, the
// integrability/speed assumption for infinite trains, the velocity-spread
// bound and the exponent selection for combined nonlinearities.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "solitonforge/waveforms.hpp"

namespace solitonforge {

struct RelativeVelocity {
  double v_star = 0.0;      // min_{j != k} |v_j - v_k|
  double omega_star = 0.0;  // min_j omega_j
  /// False when two velocities coincide; gluing does not apply.
  bool distinct = false;
};

RelativeVelocity min_relative_velocity(std::span<const double> velocities,
                                       std::span<const double> omegas);
RelativeVelocity min_relative_velocity(const TrainSpec& spec);

/// omega_j = ratio^j, v_j = ratio^(-j) vbar for j >= 1.
struct GeometricTrain {
  double ratio = 0.5;
  double vbar = 32.0;
  double gamma = 0.0;

  double omega(int j) const;
  double velocity(int j) const;
};

struct TrainAdmissibilityOptions {
  int partial_sum_terms = 200;
  /// Pairs j, k <= this bound are enumerated for the speed infimum.
  int pair_terms = 20;
  /// When set, the series tail beyond the truncation J must fall below it.
  std::optional<double> tail_threshold;
  int truncation = 0;
};

struct TrainAdmissibilityReport {
  bool pass = false;
  double r1 = 0.0;
  double exponent = 0.0;  // 1/alpha - d/(2 r1)
  std::vector<double> partial_sums;  // A_J for J = 1..partial_sum_terms
  double tail_bound = 0.0;           // geometric bound on the sum beyond the last term
  double limit = 0.0;                // closed-form sum
  double truncation_tail = 0.0;      // sum over j > truncation
  double speed_enumerated = 0.0;     // inf over enumerated pairs of sqrt(min omega) |dv|
  double speed_closed_form = 0.0;
  std::string message;
};

/// Checks d alpha / 2 < r1 < alpha + 2, sums A_omega = sum_j omega_j^(1/alpha - d/(2 r1))
/// and computes v_star = inf_{j != k} sqrt(min(omega_j, omega_k)) |v_j - v_k|.
/// Throws R1OutOfRange, DivergentSeries or (when a threshold is set) TailTooLarge.
TrainAdmissibilityReport check_train_admissibility(const NonlinearitySpec& spec,
                                                   const GeometricTrain& generator, double r1,
                                                   const TrainAdmissibilityOptions& options = {});

struct VelocitySpreadReport {
  bool pass = false;
  double v_bar = 0.0;  // max |v_k|
  double v_star = 0.0;
  double bound = 0.0;  // M v_star^M
};

/// v_bar <= M v_star^M.
VelocitySpreadReport check_velocity_spread(std::span<const double> velocities, double M);

struct ExponentChoice {
  double r1 = 0.0;
  double r2 = 0.0;
  double b1 = 0.0;  // r1 - 1 - r1 / r2
  double b2 = 0.0;  // r2 - 1 - r2 / r1
};

/// Chooses (r1, r2) with 0 <= r1 - 2 <= beta1 <= beta2 <= r2 - 2 < alpha_max and
/// r1 beta2 <= r1 r2 - r1 - r2 <= r2 beta1. Throws Infeasible naming
/// the violated admissibility inequality.
ExponentChoice select_exponents(double beta1, double beta2, int dim);

/// Residuals of the exponent conditions; all entries are <= 0 when satisfied.
std::vector<double> exponent_condition_slack(const ExponentChoice& choice, double beta1,
                                             double beta2, int dim);

TrainSpec make_truncated_train(const NonlinearitySpec& spec, const GeometricTrain& generator,
                               int J, std::shared_ptr<const BoundStateProfile> base_profile);

}  // namespace solitonforge
