#include "solitonforge/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "solitonforge/errors.hpp"

namespace solitonforge {

RelativeVelocity min_relative_velocity(std::span<const double> velocities,
                                       std::span<const double> omegas) {
  if (velocities.size() < 2 || velocities.size() != omegas.size()) {
    throw SolverError(ErrorKind::InvalidArgument,
                      "relative velocity needs at least two components with frequencies");
  }
  RelativeVelocity out;
  out.v_star = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < velocities.size(); ++j) {
    for (std::size_t k = j + 1; k < velocities.size(); ++k) {
      out.v_star = std::min(out.v_star, std::abs(velocities[j] - velocities[k]));
    }
  }
  out.omega_star = *std::min_element(omegas.begin(), omegas.end());
  out.distinct = out.v_star > 0.0;
  return out;
}

RelativeVelocity min_relative_velocity(const TrainSpec& spec) {
  const auto v = spec.velocities();
  const auto w = spec.frequencies();
  return min_relative_velocity(v, w);
}

double GeometricTrain::omega(int j) const { return std::pow(ratio, j); }
double GeometricTrain::velocity(int j) const { return std::pow(ratio, -j) * vbar; }

TrainAdmissibilityReport check_train_admissibility(const NonlinearitySpec& spec,
                                                   const GeometricTrain& generator, double r1,
                                                   const TrainAdmissibilityOptions& options) {
  if (!spec.is_power()) {
    throw SolverError(ErrorKind::InvalidArgument, "soliton trains need a power nonlinearity");
  }
  if (!(generator.ratio > 0.0 && generator.ratio < 1.0)) {
    throw SolverError(ErrorKind::InvalidArgument, "generator ratio must lie in (0, 1)");
  }
  const double alpha = spec.alpha();
  const double d = spec.dim();
  TrainAdmissibilityReport r;
  r.r1 = r1;
  if (!(d * alpha / 2.0 < r1 && r1 < alpha + 2.0)) {
    std::ostringstream msg;
    msg << "r1 = " << r1 << " outside the integrability window d alpha / 2 = " << d * alpha / 2.0
        << " < r1 < alpha + 2 = " << alpha + 2.0;
    throw SolverError(ErrorKind::R1OutOfRange, msg.str());
  }
  r.exponent = 1.0 / alpha - d / (2.0 * r1);
  if (!(r.exponent > 0.0)) {
    std::ostringstream msg;
    msg << "exponent 1/alpha - d/(2 r1) = " << r.exponent << " is not positive";
    throw SolverError(ErrorKind::DivergentSeries, msg.str());
  }
  const double q = std::pow(generator.ratio, r.exponent);
  double sum = 0.0;
  for (int j = 1; j <= options.partial_sum_terms; ++j) {
    sum += std::pow(generator.omega(j), r.exponent);
    r.partial_sums.push_back(sum);
  }
  r.tail_bound = std::pow(q, options.partial_sum_terms + 1) / (1.0 - q);
  r.limit = q / (1.0 - q);
  if (options.truncation > 0) {
    r.truncation_tail = std::pow(q, options.truncation + 1) / (1.0 - q);
    if (options.tail_threshold && r.truncation_tail > *options.tail_threshold) {
      std::ostringstream msg;
      msg << "series tail beyond J = " << options.truncation << " is " << r.truncation_tail
          << " > " << *options.tail_threshold;
      throw SolverError(ErrorKind::TailTooLarge, msg.str());
    }
  }
  r.speed_enumerated = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= options.pair_terms; ++j) {
    for (int k = j + 1; k <= options.pair_terms; ++k) {
      const double w = std::min(generator.omega(j), generator.omega(k));
      r.speed_enumerated = std::min(
          r.speed_enumerated, std::sqrt(w) * std::abs(generator.velocity(k) - generator.velocity(j)));
    }
  }
  // The infimum sits at the adjacent pair (1, 2).
  r.speed_closed_form = (1.0 - generator.ratio) / generator.ratio * std::abs(generator.vbar);
  r.pass = true;
  std::ostringstream msg;
  msg << "A_omega = " << r.limit << ", v_star = " << r.speed_closed_form;
  r.message = msg.str();
  return r;
}

VelocitySpreadReport check_velocity_spread(std::span<const double> velocities, double M) {
  if (velocities.size() < 2) {
    throw SolverError(ErrorKind::InvalidArgument, "velocity spread needs two velocities");
  }
  VelocitySpreadReport r;
  std::vector<double> ones(velocities.size(), 1.0);
  r.v_star = min_relative_velocity(velocities, ones).v_star;
  for (double v : velocities) r.v_bar = std::max(r.v_bar, std::abs(v));
  r.bound = M * std::pow(r.v_star, M);
  r.pass = r.v_bar <= r.bound;
  return r;
}

namespace {

double alpha_max_for(int dim) {
  return dim <= 2 ? std::numeric_limits<double>::infinity() : 4.0 / (dim - 2);
}

}  // namespace

ExponentChoice select_exponents(double beta1, double beta2, int dim) {
  if (dim < 1) throw SolverError(ErrorKind::InvalidArgument, "dimension must be positive");
  const double amax = alpha_max_for(dim);
  if (!(0.0 < beta1 && beta1 <= beta2 && beta2 < amax)) {
    std::ostringstream msg;
    msg << "need 0 < beta1 <= beta2 < alpha_max = " << amax << ", got (" << beta1 << ", " << beta2
        << ")";
    throw SolverError(ErrorKind::InvalidArgument, msg.str());
  }
  if (beta2 < amax / 2.0) {
    if (!(beta2 / (1.0 + beta2) <= beta1)) {
      std::ostringstream msg;
      msg << "violates beta2/(1+beta2) <= beta1: " << beta2 / (1.0 + beta2) << " > " << beta1;
      throw SolverError(ErrorKind::Infeasible, msg.str());
    }
  } else if (!(beta2 / (amax + 1.0 - beta2) < beta1)) {
    std::ostringstream msg;
    msg << "violates beta2/(alpha_max+1-beta2) < beta1: " << beta2 / (amax + 1.0 - beta2)
        << " >= " << beta1;
    throw SolverError(ErrorKind::Infeasible, msg.str());
  }
  // Both exponent curves pass through (beta1, beta2) exactly at this point.
  ExponentChoice c;
  c.r2 = 1.0 + beta2 * (1.0 + beta1) / beta1;
  c.r1 = beta1 / beta2 + 1.0 + beta1;
  c.b1 = c.r1 - 1.0 - c.r1 / c.r2;
  c.b2 = c.r2 - 1.0 - c.r2 / c.r1;
  return c;
}

std::vector<double> exponent_condition_slack(const ExponentChoice& c, double beta1, double beta2,
                                             int dim) {
  const double amax = alpha_max_for(dim);
  const double p = c.r1 * c.r2 - c.r1 - c.r2;
  std::vector<double> s = {
      -(c.r1 - 2.0),
      (c.r1 - 2.0) - beta1,
      beta1 - beta2,
      beta2 - (c.r2 - 2.0),
      c.r1 * beta2 - p,
      p - c.r2 * beta1,
  };
  if (std::isfinite(amax)) s.push_back((c.r2 - 2.0) - amax);
  return s;
}

TrainSpec make_truncated_train(const NonlinearitySpec& spec, const GeometricTrain& generator,
                               int J, std::shared_ptr<const BoundStateProfile> base_profile) {
  if (J < 1) throw SolverError(ErrorKind::InvalidArgument, "truncation J must be at least 1");
  TrainSpec train(spec);
  train.truncation = J;
  for (int j = 1; j <= J; ++j) {
    SolitonParams p;
    p.profile = base_profile;
    p.scaled = true;
    p.omega = generator.omega(j);
    p.v = generator.velocity(j);
    p.gamma = generator.gamma;
    train.solitons.push_back(p);
  }
  return train;
}

}  // namespace solitonforge
