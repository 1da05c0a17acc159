#pragma once

// Stationary profiles: bound states of -phi'' + omega phi - f(phi) = 0 and
// half-kinks connecting 0 to a plateau.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "solitonforge/nonlinearity.hpp"

namespace solitonforge {

/// Real samples on the uniform grid x_i = -extent + i dx, i = 0..2M.
struct SampledProfile {
  double dx = 0.0;
  double extent = 0.0;
  std::vector<double> values;
  std::vector<double> derivatives;

  std::size_t size() const noexcept { return values.size(); }
  double x(std::size_t i) const noexcept { return -extent + static_cast<double>(i) * dx; }
  /// Index of x = 0.
  std::size_t center() const noexcept { return values.size() / 2; }
};

class CubicInterpolant;

/// phi(x) = ((alpha+2) omega / 2)^(1/alpha) sech^(2/alpha)(alpha sqrt(omega) x / 2).
struct PowerGroundState {
  double alpha;
  double omega;

  double value(double x) const;
  double derivative(double x) const;
  double amplitude() const;
};

class BoundStateProfile {
 public:
  BoundStateProfile(double omega, SampledProfile samples,
                    std::optional<PowerGroundState> closed_form = std::nullopt);

  double omega() const noexcept { return omega_; }
  const SampledProfile& samples() const noexcept { return samples_; }
  const std::optional<PowerGroundState>& closed_form() const noexcept { return closed_form_; }

  /// Closed form when available, cubic spline of the samples otherwise; zero
  /// outside the sampled extent.
  double value(double x) const;
  double derivative(double x) const;
  double amplitude() const { return value(0.0); }

  double fitted_decay = 0.0;
  double residual = 0.0;
  std::string method;

 private:
  double omega_;
  SampledProfile samples_;
  std::optional<PowerGroundState> closed_form_;
  std::shared_ptr<const CubicInterpolant> spline_;
};

enum class KinkOrientation { ZeroAtMinusInfinity, ZeroAtPlusInfinity };

class KinkProfile {
 public:
  KinkProfile(double omega1, double zeta1, double left_limit, double right_limit,
              KinkOrientation orientation, SampledProfile samples);

  double omega1() const noexcept { return omega1_; }
  /// Plateau value (for the Gross-Pitaevskii special case, the modulus limit 1).
  double zeta1() const noexcept { return zeta1_; }
  double left_limit() const noexcept { return left_limit_; }
  double right_limit() const noexcept { return right_limit_; }
  KinkOrientation orientation() const noexcept { return orientation_; }
  const SampledProfile& samples() const noexcept { return samples_; }

  /// Spline of the samples, continued by the limits outside the extent.
  double value(double x) const;
  double derivative(double x) const;

  /// Same kink reflected x -> -x.
  KinkProfile mirrored() const;

  double fitted_decay_left = 0.0;
  double fitted_decay_right = 0.0;
  /// Constant E of 1/2 phi'^2 - (omega1/2) phi^2 + F(phi) = E; zero for kinks
  /// reaching 0, 1/4 for the Gross-Pitaevskii tanh kink.
  double first_integral_constant = 0.0;
  bool gross_pitaevskii = false;

 private:
  double omega1_, zeta1_, left_limit_, right_limit_;
  KinkOrientation orientation_;
  SampledProfile samples_;
  std::shared_ptr<const CubicInterpolant> spline_;
};

struct ProfileGridOptions {
  double extent = 0.0;  // 0 selects X with exp(-sqrt(omega) X) < 1e-12
  double dx = 0.01;
};

/// Closed-form ground state of the d = 1 power nonlinearity.
BoundStateProfile ground_state_closed_form(const NonlinearitySpec& spec, double omega,
                                           ProfileGridOptions grid = {});

struct ShootingOptions {
  ProfileGridOptions grid;
  double tail_tolerance = 1e-10;   // |phi(X)| must fall below this
  double ode_tolerance = 1e-12;
  double bracket_ceiling = 0.0;    // 0 selects 10 * zeta(omega)
  int bracket_samples = 400;
};

/// Even positive solution by bisection on phi(0).
BoundStateProfile shoot_bound_state(const NonlinearitySpec& spec, double omega,
                                    const ShootingOptions& options = {});

struct ZetaResult {
  double zeta = 0.0;  // 0 means no root below the ceiling
  double scan_ceiling = 0.0;
  bool tangential = false;  // double root
};

/// Smallest positive root of F(z) - (omega/2) z^2.
ZetaResult zeta(const NonlinearitySpec& spec, double omega, double ceiling = 100.0);

/// First s on a logarithmic scan with G(s) > omega s.
std::optional<double> focusing_point(const NonlinearitySpec& spec, double omega,
                                     const LogSampleRange& range = {});

struct KinkFrequency {
  double omega1 = 0.0;
  double zeta1 = 0.0;
  double residual = 0.0;                // |f(zeta1) - omega1 zeta1|
  double linear_gap_zero = 0.0;         // f'(0) - omega1
  double linear_gap_plateau = 0.0;      // f'(zeta1) - omega1
  bool plateau_decay_condition = false; // f'(zeta1) - omega1 < 0
  bool closed_form_special_case = false;
};

/// Frequency at which F(z) = omega z^2 / 2 and f(z) = omega z hold together
/// at the smallest positive root. Gross-Pitaevskii returns omega1 = 0.
KinkFrequency find_kink_frequency(const NonlinearitySpec& spec,
                                  std::pair<double, double> bracket = {-1.0, 1.0},
                                  double ceiling = 100.0);

struct KinkOptions {
  double extent = 60.0;
  double dx = 0.01;
  double ode_tolerance = 1e-13;
  double radicand_tolerance = 1e-12;
  /// phi(0) = lower + anchor_fraction (upper - lower).
  double anchor_fraction = 0.5;
};

/// Monotone kink from the first-order first-integral equation
/// phi' = sqrt(omega1 phi^2 - 2 F(phi) + 2E).
KinkProfile kink_profile(const NonlinearitySpec& spec, double omega1, const KinkOptions& options = {});

/// max |1/2 phi'^2 - (omega1/2) phi^2 + F(phi) - E| with phi' from an
/// eighth-order central difference of the samples.
double first_integral_residual(const KinkProfile& kink, const NonlinearitySpec& spec);

/// max |-phi'' + omega phi - f(phi)| with a sixth-order second-difference stencil.
double ode_residual(const SampledProfile& samples, double omega, const NonlinearitySpec& spec);

enum class TailReference { Zero, Plateau };

/// Least-squares slope of log|phi - reference| against |x| over the samples
/// with x in [x_lo, x_hi]. Throws WindowTooNoisy when R^2 < 0.99.
double fit_tail_decay(std::span<const double> x, std::span<const double> values,
                      std::pair<double, double> window, double reference = 0.0);

/// S = 1/2 ||phi'||^2 + omega/2 ||phi||^2 - 1/2 int G(phi^2), trapezoidal.
double action(const BoundStateProfile& profile, const NonlinearitySpec& spec);

}  // namespace solitonforge
