#include "solitonforge/profiles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "solitonforge/errors.hpp"
#include "solitonforge/fitting.hpp"

namespace solitonforge {

namespace odeint = boost::numeric::odeint;

class CubicInterpolant {
 public:
  explicit CubicInterpolant(const SampledProfile& s)
      : spline_(s.values.data(), s.values.size(), -s.extent, s.dx), lo_(-s.extent),
        hi_(s.x(s.size() - 1)) {}

  bool contains(double x) const noexcept { return x >= lo_ && x <= hi_; }
  double value(double x) const { return spline_(x); }
  double derivative(double x) const { return spline_.prime(x); }

 private:
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
  double lo_, hi_;
};

namespace {

using State = std::array<double, 2>;

double sech(double y) {
  const double e = std::exp(-std::abs(y));
  return 2.0 * e / (1.0 + e * e);
}

void check_samples(const SampledProfile& s) {
  if (s.values.size() < 8 || s.values.size() % 2 == 0 || !(s.dx > 0.0)) {
    throw SolverError(ErrorKind::InvalidArgument,
                      "profile samples need an odd count >= 9 on a positive spacing");
  }
  if (!s.derivatives.empty() && s.derivatives.size() != s.values.size()) {
    throw SolverError(ErrorKind::InvalidArgument, "derivative samples do not match values");
  }
}

std::size_t half_points(double extent, double dx) {
  return static_cast<std::size_t>(std::ceil(extent / dx - 1e-9));
}

double default_extent(const NonlinearitySpec& spec, double omega) {
  const double kappa2 = omega - eval_df_real(spec, 0.0);
  const double kappa = kappa2 > 0.0 ? std::sqrt(kappa2) : std::sqrt(std::abs(omega));
  return std::log(1e12) / kappa;
}

// Fits the decay of |values - reference| on one side of the grid over the
// samples whose level lies in [lo, hi]. Returns 0 when too few samples.
double fit_tail_band(const SampledProfile& s, bool right_side, double reference, double lo,
                     double hi) {
  std::vector<double> xs, ys;
  const std::size_t c = s.center();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (right_side ? i <= c : i >= c) continue;
    const double level = std::abs(s.values[i] - reference);
    if (level < lo || level > hi) continue;
    xs.push_back(std::abs(s.x(i)));
    ys.push_back(std::log(level));
  }
  if (xs.size() < 3) return 0.0;
  return -fit_line(xs, ys).slope;
}

template <class Rhs>
std::vector<State> integrate_on_grid(Rhs rhs, State start, std::size_t points, double dx,
                                     double tolerance) {
  std::vector<double> times(points);
  for (std::size_t i = 0; i < points; ++i) times[i] = static_cast<double>(i) * dx;
  std::vector<State> out;
  out.reserve(points);
  auto stepper = odeint::make_controlled(tolerance, tolerance, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_times(stepper, rhs, start, times.begin(), times.end(), dx,
                          [&out](const State& st, double) { out.push_back(st); });
  return out;
}

enum class Shot { Undershoot, Overshoot, Decayed };

struct ShotEnded {};

}  // namespace

double PowerGroundState::amplitude() const {
  return std::pow((alpha + 2.0) * omega / 2.0, 1.0 / alpha);
}

double PowerGroundState::value(double x) const {
  const double b = 0.5 * alpha * std::sqrt(omega);
  return amplitude() * std::pow(sech(b * x), 2.0 / alpha);
}

double PowerGroundState::derivative(double x) const {
  const double b = 0.5 * alpha * std::sqrt(omega);
  const double p = 2.0 / alpha;
  return -amplitude() * p * b * std::pow(sech(b * x), p) * std::tanh(b * x);
}

BoundStateProfile::BoundStateProfile(double omega, SampledProfile samples,
                                     std::optional<PowerGroundState> closed_form)
    : omega_(omega), samples_(std::move(samples)), closed_form_(closed_form) {
  check_samples(samples_);
  spline_ = std::make_shared<const CubicInterpolant>(samples_);
}

double BoundStateProfile::value(double x) const {
  if (closed_form_) return closed_form_->value(x);
  if (!spline_->contains(x)) return 0.0;
  return spline_->value(x);
}

double BoundStateProfile::derivative(double x) const {
  if (closed_form_) return closed_form_->derivative(x);
  if (!spline_->contains(x)) return 0.0;
  return spline_->derivative(x);
}

KinkProfile::KinkProfile(double omega1, double zeta1, double left_limit, double right_limit,
                         KinkOrientation orientation, SampledProfile samples)
    : omega1_(omega1), zeta1_(zeta1), left_limit_(left_limit), right_limit_(right_limit),
      orientation_(orientation), samples_(std::move(samples)) {
  check_samples(samples_);
  spline_ = std::make_shared<const CubicInterpolant>(samples_);
}

double KinkProfile::value(double x) const {
  if (x < -samples_.extent) return left_limit_;
  if (!spline_->contains(x)) return right_limit_;
  return spline_->value(x);
}

double KinkProfile::derivative(double x) const {
  if (!spline_->contains(x)) return 0.0;
  return spline_->derivative(x);
}

KinkProfile KinkProfile::mirrored() const {
  SampledProfile s = samples_;
  std::reverse(s.values.begin(), s.values.end());
  std::reverse(s.derivatives.begin(), s.derivatives.end());
  for (auto& d : s.derivatives) d = -d;
  const auto flipped = orientation_ == KinkOrientation::ZeroAtMinusInfinity
                           ? KinkOrientation::ZeroAtPlusInfinity
                           : KinkOrientation::ZeroAtMinusInfinity;
  KinkProfile out(omega1_, zeta1_, right_limit_, left_limit_, flipped, std::move(s));
  out.fitted_decay_left = fitted_decay_right;
  out.fitted_decay_right = fitted_decay_left;
  out.first_integral_constant = first_integral_constant;
  out.gross_pitaevskii = gross_pitaevskii;
  return out;
}

double ode_residual(const SampledProfile& s, double omega, const NonlinearitySpec& spec) {
  static constexpr std::array<double, 7> c = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18,
                                              3.0 / 2,  -3.0 / 20, 1.0 / 90};
  const double inv = 1.0 / (s.dx * s.dx);
  double worst = 0.0;
  for (std::size_t i = 3; i + 3 < s.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < 7; ++k) d2 += c[k] * s.values[i + k - 3];
    d2 *= inv;
    const double phi = s.values[i];
    worst = std::max(worst, std::abs(-d2 + omega * phi - eval_f_real(spec, phi)));
  }
  return worst;
}

BoundStateProfile ground_state_closed_form(const NonlinearitySpec& spec, double omega,
                                           ProfileGridOptions grid) {
  if (!spec.is_power() || spec.dim() != 1) {
    throw SolverError(ErrorKind::InvalidArgument,
                      "closed-form ground state needs a d = 1 power nonlinearity");
  }
  if (!(omega > 0.0)) throw SolverError(ErrorKind::InvalidArgument, "omega must be positive");
  const PowerGroundState form{spec.alpha(), omega};
  const double extent = grid.extent > 0.0 ? grid.extent : default_extent(spec, omega);
  const std::size_t m = half_points(extent, grid.dx);
  SampledProfile s;
  s.dx = grid.dx;
  s.extent = static_cast<double>(m) * grid.dx;
  s.values.resize(2 * m + 1);
  s.derivatives.resize(2 * m + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.values[i] = form.value(s.x(i));
    s.derivatives[i] = form.derivative(s.x(i));
  }
  BoundStateProfile p(omega, std::move(s), form);
  p.method = "closed_form";
  p.residual = ode_residual(p.samples(), omega, spec);
  const double a = form.amplitude();
  p.fitted_decay = fit_tail_band(p.samples(), true, 0.0, 1e-11 * a, 1e-4 * a);
  return p;
}

std::optional<double> focusing_point(const NonlinearitySpec& spec, double omega,
                                     const LogSampleRange& range) {
  for (double s : range.samples()) {
    if (primitive_G(spec, s) > omega * s) return s;
  }
  return std::nullopt;
}

BoundStateProfile shoot_bound_state(const NonlinearitySpec& spec, double omega,
                                    const ShootingOptions& options) {
  if (spec.dim() != 1) throw SolverError(ErrorKind::InvalidArgument, "shooting is d = 1 only");
  if (!focusing_point(spec, omega)) {
    std::ostringstream msg;
    msg << "no s0 with G(s0) > omega s0 for omega = " << omega;
    throw SolverError(ErrorKind::NoGroundState, msg.str());
  }

  const double extent =
      options.grid.extent > 0.0 ? options.grid.extent : default_extent(spec, omega);
  const double dx = options.grid.dx;
  const std::size_t m = half_points(extent, dx);
  const double x_end = static_cast<double>(m) * dx;
  const double tol = options.ode_tolerance;

  const auto rhs = [&spec, omega](const State& st, State& d, double) {
    d[0] = st[1];
    d[1] = omega * st[0] - eval_f_real(spec, st[0]);
  };

  const auto classify = [&](double a) {
    State st{a, 0.0};
    double x = 0.0, h = 1e-3;
    auto stepper = odeint::make_controlled(1e-8 * tol * a, tol, odeint::runge_kutta_dopri5<State>());
    // Run past X: near the threshold the separating event lies deep in the tail.
    const double x_stop = 4.0 * x_end;
    while (x < x_stop) {
      h = std::min(h, x_stop - x);
      if (stepper.try_step(rhs, st, x, h) != odeint::success) continue;
      if (st[0] < 0.0) return Shot::Overshoot;
      if (st[1] > 0.0 || st[0] > 1e6 * a) return Shot::Undershoot;
    }
    return Shot::Decayed;
  };

  double ceiling = options.bracket_ceiling;
  if (ceiling <= 0.0) {
    const auto z = zeta(spec, omega);
    ceiling = 10.0 * (z.zeta > 0.0 ? z.zeta : 1.0);
  }

  // First undershoot -> overshoot transition in increasing phi(0).
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  double previous_a = 0.0;
  Shot previous = Shot::Undershoot;
  for (int i = 1; i <= options.bracket_samples; ++i) {
    const double a = ceiling * i / options.bracket_samples;
    const Shot shot = classify(a);
    if (shot == Shot::Decayed) {
      lo = hi = a;
      bracketed = true;
      break;
    }
    if (previous == Shot::Undershoot && shot == Shot::Overshoot && previous_a > 0.0) {
      lo = previous_a;
      hi = a;
      bracketed = true;
      break;
    }
    previous = shot;
    previous_a = a;
  }
  if (!bracketed) {
    std::ostringstream msg;
    msg << "no undershoot/overshoot bracket for phi(0) in (0, " << ceiling << "]";
    throw SolverError(ErrorKind::NoGroundState, msg.str());
  }
  // Bisection and the final trajectories share one stepping sequence (the
  // grid), so roundoff cannot flip the classification between them.
  std::vector<double> times(4 * m + 1);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i) * dx;
  const auto grid_run = [&](double a, std::vector<State>* record) {
    auto stepper =
        odeint::make_controlled(1e-8 * tol * a, tol, odeint::runge_kutta_dopri5<State>());
    State st{a, 0.0};
    Shot shot = Shot::Decayed;
    try {
      odeint::integrate_times(stepper, rhs, st, times.begin(), times.end(), dx,
                              [&](const State& s, double) {
                                if (s[0] < 0.0) shot = Shot::Overshoot;
                                else if (s[1] > 0.0 || s[0] > 1e6 * a) shot = Shot::Undershoot;
                                if (shot != Shot::Decayed) throw ShotEnded{};
                                if (record && record->size() <= m) record->push_back(s);
                              });
    } catch (const ShotEnded&) {
    }
    return shot;
  };
  for (int it = 0; it < 200 && hi > lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const Shot shot = grid_run(mid, nullptr);
    if (shot == Shot::Overshoot) {
      hi = mid;
    } else if (shot == Shot::Undershoot) {
      lo = mid;
    } else {
      lo = hi = mid;
    }
  }

  std::vector<State> under, over;
  grid_run(lo, &under);
  grid_run(hi, &over);
  const std::size_t common = std::min(under.size(), over.size());
  // Keep the segment where the two ends agree to a relative 1e-7.
  std::size_t cut = 0;
  while (cut + 1 < common && std::abs(under[cut + 1][0] - over[cut + 1][0]) <=
                                 1e-7 * std::min(under[cut + 1][0], over[cut + 1][0])) {
    ++cut;
  }
  if (cut < 2) {
    throw SolverError(ErrorKind::NoGroundState, "shooting trajectories separate immediately");
  }

  std::vector<double> half(m + 1), half_d(m + 1);
  for (std::size_t i = 0; i <= cut; ++i) {
    half[i] = 0.5 * (under[i][0] + over[i][0]);
    half_d[i] = 0.5 * (under[i][1] + over[i][1]);
  }
  half_d[0] = 0.0;
  // Beyond the reliable segment continue with the linear tail.
  const double kappa2 = omega - eval_df_real(spec, 0.0);
  const double kappa = kappa2 > 0.0 ? std::sqrt(kappa2) : -half_d[cut] / half[cut];
  const double x_cut = static_cast<double>(cut) * dx;
  for (std::size_t i = cut + 1; i <= m; ++i) {
    const double x = static_cast<double>(i) * dx;
    half[i] = half[cut] * std::exp(-kappa * (x - x_cut));
    half_d[i] = -kappa * half[i];
  }

  if (half[m] > options.tail_tolerance) {
    std::ostringstream msg;
    msg << "profile is " << half[m] << " at X = " << x_end << " (tolerance "
        << options.tail_tolerance << ")";
    throw SolverError(ErrorKind::UnderResolved, msg.str());
  }

  SampledProfile s;
  s.dx = dx;
  s.extent = x_end;
  s.values.resize(2 * m + 1);
  s.derivatives.resize(2 * m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    s.values[m + i] = s.values[m - i] = half[i];
    s.derivatives[m + i] = half_d[i];
    s.derivatives[m - i] = -half_d[i];
  }
  BoundStateProfile p(omega, std::move(s));
  p.method = "shooting";
  p.residual = ode_residual(p.samples(), omega, spec);
  const double a = p.samples().values[m];
  p.fitted_decay = fit_tail_band(p.samples(), true, 0.0, 1e-11 * a, 1e-4 * a);
  return p;
}

ZetaResult zeta(const NonlinearitySpec& spec, double omega, double ceiling) {
  ZetaResult result;
  result.scan_ceiling = ceiling;
  const auto q = [&](double z) { return primitive_F(spec, z) - 0.5 * omega * z * z; };
  const auto dq = [&](double z) { return eval_f_real(spec, z) - omega * z; };
  const double floor = 1e-6;
  const int n = 4000;
  const double l0 = std::log(floor), l1 = std::log(ceiling);
  boost::math::tools::eps_tolerance<double> tol(52);

  double z_prev = floor;
  double q_prev = q(z_prev);
  double dq_prev = dq(z_prev);
  for (int i = 1; i <= n; ++i) {
    const double z = std::exp(l0 + (l1 - l0) * i / n);
    const double qz = q(z);
    const double dqz = dq(z);
    if (q_prev == 0.0 && z_prev > floor) {
      result.zeta = z_prev;
      return result;
    }
    if ((q_prev < 0.0) != (qz < 0.0) && qz != 0.0) {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(q, z_prev, z, q_prev, qz, tol, iters);
      result.zeta = 0.5 * (r.first + r.second);
      return result;
    }
    if (qz == 0.0) {
      result.zeta = z;
      return result;
    }
    // Tangential root: local maximum of q touching zero.
    if (dq_prev > 0.0 && dqz < 0.0 && qz < 0.0) {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(dq, z_prev, z, dq_prev, dqz, tol, iters);
      const double zs = 0.5 * (r.first + r.second);
      const double scale =
          std::max({std::abs(primitive_F(spec, zs)), std::abs(0.5 * omega * zs * zs), 1e-300});
      if (std::abs(q(zs)) <= 1e-13 * scale) {
        result.zeta = zs;
        result.tangential = true;
        return result;
      }
    }
    z_prev = z;
    q_prev = qz;
    dq_prev = dqz;
  }
  return result;
}

KinkFrequency find_kink_frequency(const NonlinearitySpec& spec, std::pair<double, double> bracket,
                                  double ceiling) {
  KinkFrequency out;
  if (spec.kind() == NonlinearityKind::GrossPitaevskii) {
    // Explicit tanh kink with omega = 0 connecting -1 to 1.
    out.omega1 = 0.0;
    out.zeta1 = 1.0;
    out.residual = 0.0;
    out.linear_gap_zero = eval_df_real(spec, 0.0);
    out.linear_gap_plateau = eval_df_real(spec, 1.0);
    out.plateau_decay_condition = out.linear_gap_plateau < 0.0;
    out.closed_form_special_case = true;
    return out;
  }
  const auto [w_lo, w_hi] = bracket;
  if (!(w_lo < w_hi)) throw SolverError(ErrorKind::InvalidArgument, "empty frequency bracket");

  // On the curve omega = f(z)/z the two conditions reduce to
  // p(z) = F(z) - z f(z) / 2 = 0.
  const auto p = [&](double z) { return primitive_F(spec, z) - 0.5 * z * eval_f_real(spec, z); };
  const double floor = 1e-6;
  const int n = 4000;
  const double l0 = std::log(floor), l1 = std::log(ceiling);
  boost::math::tools::eps_tolerance<double> tol(52);

  std::ostringstream rejected;
  double z_prev = floor, p_prev = p(floor);
  for (int i = 1; i <= n; ++i) {
    const double z = std::exp(l0 + (l1 - l0) * i / n);
    const double pz = p(z);
    if ((p_prev < 0.0) != (pz < 0.0)) {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(p, z_prev, z, p_prev, pz, tol, iters);
      const double zr = 0.5 * (r.first + r.second);
      const double w = eval_f_real(spec, zr) / zr;
      if (w > w_lo && w <= w_hi) {
        // The root must be the smallest zero of F - omega z^2 / 2.
        const auto first = zeta(spec, w, ceiling);
        if (first.zeta > 0.0 && std::abs(first.zeta - zr) <= 1e-6 * zr) {
          out.omega1 = w;
          out.zeta1 = zr;
          out.residual = std::abs(eval_f_real(spec, zr) - w * zr);
          out.linear_gap_zero = eval_df_real(spec, 0.0) - w;
          out.linear_gap_plateau = eval_df_real(spec, zr) - w;
          out.plateau_decay_condition = out.linear_gap_plateau < 0.0;
          if (!(out.linear_gap_zero < 0.0)) {
            std::ostringstream msg;
            msg << "f'(0) - omega1 = " << out.linear_gap_zero << " is not negative at omega1 = " << w;
            throw SolverError(ErrorKind::SideConditionFailed, msg.str());
          }
          if (out.residual >= 1e-10) {
            std::ostringstream msg;
            msg << "|f(zeta) - omega1 zeta| = " << out.residual << " exceeds 1e-10";
            throw SolverError(ErrorKind::SideConditionFailed, msg.str());
          }
          return out;
        }
        rejected << " z=" << zr << " (smaller root of F - omega z^2/2 at " << first.zeta << ")";
      } else {
        rejected << " z=" << zr << " (omega=" << w << " outside bracket)";
      }
    }
    z_prev = z;
    p_prev = pz;
  }
  std::ostringstream msg;
  msg << "no admissible simultaneous root for omega in (" << w_lo << ", " << w_hi << "]";
  if (!rejected.str().empty()) msg << "; rejected:" << rejected.str();
  throw SolverError(ErrorKind::NoSignChange, msg.str());
}

KinkProfile kink_profile(const NonlinearitySpec& spec, double omega1, const KinkOptions& options) {
  if (spec.dim() != 1) throw SolverError(ErrorKind::InvalidArgument, "kinks are d = 1 only");
  const bool gp = spec.kind() == NonlinearityKind::GrossPitaevskii;
  double lower = 0.0, upper = 0.0, energy = 0.0, plateau = 0.0;
  if (gp) {
    lower = -1.0;
    upper = 1.0;
    plateau = 1.0;
    energy = primitive_F(spec, 1.0) - 0.5 * omega1;
  } else {
    const auto z = zeta(spec, omega1);
    if (!(z.zeta > 0.0)) {
      std::ostringstream msg;
      msg << "zeta(" << omega1 << ") has no positive root";
      throw SolverError(ErrorKind::SideConditionFailed, msg.str());
    }
    if (!(eval_df_real(spec, 0.0) - omega1 < 0.0)) {
      throw SolverError(ErrorKind::SideConditionFailed, "f'(0) - omega1 must be negative");
    }
    // A simple root turns the orbit back (a bright profile); a kink needs f(zeta) = omega1 zeta.
    const double gap = eval_f_real(spec, z.zeta) - omega1 * z.zeta;
    if (std::abs(gap) > 1e-8 * std::max(std::abs(omega1 * z.zeta), 1e-300)) {
      std::ostringstream msg;
      msg << "f(zeta) - omega1 zeta = " << gap << " at zeta = " << z.zeta << "; omega1 = " << omega1
          << " is not the kink frequency";
      throw SolverError(ErrorKind::SideConditionFailed, msg.str());
    }
    upper = plateau = z.zeta;
  }

  const auto radicand = [&](double phi) {
    return omega1 * phi * phi - 2.0 * primitive_F(spec, phi) + 2.0 * energy;
  };
  const double scale = std::max(std::abs(omega1) * upper * upper, std::abs(primitive_F(spec, upper)));
  for (int i = 1; i < 1000; ++i) {
    const double phi = lower + (upper - lower) * i / 1000.0;
    const double r = radicand(phi);
    if (r < -options.radicand_tolerance * std::max(scale, 1e-300)) {
      std::ostringstream msg;
      msg << "radicand " << r << " < 0 at phi = " << phi << "; omega1 = " << omega1
          << " does not admit a kink";
      throw SolverError(ErrorKind::RadicandNegative, msg.str());
    }
  }

  const auto rhs = [&](const State& st, State& d, double) {
    const double phi = st[0];
    d[1] = 0.0;
    if (phi <= lower || phi >= upper) {
      d[0] = 0.0;
      return;
    }
    d[0] = std::sqrt(std::max(radicand(phi), 0.0));
  };

  const std::size_t m = half_points(options.extent, options.dx);
  const double anchor = lower + options.anchor_fraction * (upper - lower);
  const auto forward = integrate_on_grid(rhs, State{anchor, 0.0}, m + 1, options.dx,
                                         options.ode_tolerance);
  const auto backward = integrate_on_grid(rhs, State{anchor, 0.0}, m + 1, -options.dx,
                                          options.ode_tolerance);

  SampledProfile s;
  s.dx = options.dx;
  s.extent = static_cast<double>(m) * options.dx;
  s.values.resize(2 * m + 1);
  s.derivatives.resize(2 * m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    s.values[m + i] = forward[i][0];
    s.values[m - i] = backward[i][0];
  }
  s.values[m] = anchor;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double phi = s.values[i];
    s.derivatives[i] = (phi <= lower || phi >= upper) ? 0.0 : std::sqrt(std::max(radicand(phi), 0.0));
    if (i > 0 && s.values[i] < s.values[i - 1]) {
      std::ostringstream msg;
      msg << "kink decreases at x = " << s.x(i);
      throw SolverError(ErrorKind::NonMonotone, msg.str());
    }
  }

  KinkProfile kink(omega1, plateau, lower, upper, KinkOrientation::ZeroAtMinusInfinity, std::move(s));
  kink.first_integral_constant = energy;
  kink.gross_pitaevskii = gp;
  const double span = upper - lower;
  kink.fitted_decay_left = fit_tail_band(kink.samples(), false, lower, 1e-10 * span, 1e-4 * span);
  // The plateau approach stalls near sqrt(eps) because the root there is double.
  const double plateau_floor = gp ? 1e-10 : 1e-7;
  kink.fitted_decay_right =
      fit_tail_band(kink.samples(), true, upper, plateau_floor * span, 1e-3 * span);
  if (gp) {
    kink.fitted_decay_left =
        fit_tail_band(kink.samples(), false, lower, plateau_floor * span, 1e-3 * span);
  }
  return kink;
}

double first_integral_residual(const KinkProfile& kink, const NonlinearitySpec& spec) {
  static constexpr std::array<double, 4> c = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
  const auto& s = kink.samples();
  double worst = 0.0;
  for (std::size_t i = 4; i + 4 < s.size(); ++i) {
    double d = 0.0;
    for (std::size_t k = 0; k < 4; ++k) d += c[k] * (s.values[i + k + 1] - s.values[i - k - 1]);
    d /= s.dx;
    const double phi = s.values[i];
    const double value =
        0.5 * d * d - 0.5 * kink.omega1() * phi * phi + primitive_F(spec, phi) - kink.first_integral_constant;
    worst = std::max(worst, std::abs(value));
  }
  return worst;
}

double fit_tail_decay(std::span<const double> x, std::span<const double> values,
                      std::pair<double, double> window, double reference) {
  if (x.size() != values.size()) {
    throw SolverError(ErrorKind::InvalidArgument, "tail fit needs paired samples");
  }
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < window.first || x[i] > window.second) continue;
    const double level = std::abs(values[i] - reference);
    if (!(level > 0.0)) {
      throw SolverError(ErrorKind::InvalidArgument, "tail fit window contains a zero sample");
    }
    xs.push_back(std::abs(x[i]));
    ys.push_back(std::log(level));
  }
  if (xs.size() < 3) throw SolverError(ErrorKind::WindowEmpty, "fewer than three samples in window");
  const LinearFit line = fit_line(xs, ys);
  if (line.r_squared < 0.99) {
    std::ostringstream msg;
    msg << "R^2 = " << line.r_squared << " < 0.99";
    throw SolverError(ErrorKind::WindowTooNoisy, msg.str());
  }
  return -line.slope;
}

double action(const BoundStateProfile& profile, const NonlinearitySpec& spec) {
  const auto& s = profile.samples();
  const bool have_d = !s.derivatives.empty();
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double phi = s.values[i];
    const double d = have_d ? s.derivatives[i] : profile.derivative(s.x(i));
    double term = 0.5 * d * d + 0.5 * profile.omega() * phi * phi -
                  0.5 * primitive_G(spec, phi * phi);
    if (i == 0 || i + 1 == s.size()) term *= 0.5;
    acc += term;
  }
  return acc * s.dx;
}

}  // namespace solitonforge
