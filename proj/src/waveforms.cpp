#include "solitonforge/waveforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "solitonforge/admissibility.hpp"
#include "solitonforge/errors.hpp"

namespace solitonforge {

struct TrainEvaluator::Component {
  enum class Kind { Soliton, Scaled, Kink, GpKink };
  Kind kind = Kind::Soliton;
  std::shared_ptr<const BoundStateProfile> soliton;
  std::shared_ptr<const KinkProfile> kink;
  double alpha = 2.0;
  bool flip = false;
  double omega = 0.0, gamma = 0.0, x0 = 0.0, v = 0.0;
};

namespace {

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

std::string velocity_list(const std::vector<double>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
  return out.str();
}

}  // namespace

std::size_t TrainSpec::component_count() const noexcept {
  return solitons.size() + (left_kink ? 1 : 0) + (right_kink ? 1 : 0);
}

std::vector<double> TrainSpec::velocities() const {
  std::vector<double> out;
  if (left_kink) out.push_back(left_kink->v);
  for (const auto& s : solitons) out.push_back(s.v);
  if (right_kink) out.push_back(right_kink->v);
  return out;
}

std::vector<double> TrainSpec::frequencies() const {
  std::vector<double> out;
  if (left_kink) out.push_back(left_kink->omega);
  for (const auto& s : solitons) out.push_back(s.omega);
  if (right_kink) out.push_back(right_kink->omega);
  return out;
}

void bind(const TrainSpec& spec, const Grid1D& grid) {
  const auto v = spec.velocities();
  for (double vel : v) {
    if (!grid.is_quantized(vel)) {
      std::ostringstream msg;
      msg << "velocity " << vel << " is not a multiple of 4 pi / L = " << grid.velocity_quantum()
          << " (nearest " << grid.quantize(vel) << ")";
      throw SolverError(ErrorKind::VelocityNotQuantized, msg.str());
    }
  }
  if (spec.has_kinks()) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (!(v[i - 1] < v[i])) {
        throw SolverError(ErrorKind::PreconditionFailed,
                          "kink configurations need strictly increasing velocities, got (" +
                              velocity_list(v) + ")");
      }
    }
  }
}

cplx gp_kink_value(double c, double x) {
  if (!(std::abs(c) < std::sqrt(2.0))) {
    throw SolverError(ErrorKind::InvalidArgument, "GP kink speed must satisfy |c| < sqrt(2)");
  }
  const double k = std::sqrt(2.0 - c * c);
  return {k / std::sqrt(2.0) * std::tanh(0.5 * k * x), c / std::sqrt(2.0)};
}

ComplexField moving_gp_kink(double c, const Grid1D& grid, double t, double x0) {
  ComplexField out(grid, t);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = gp_kink_value(c, grid.x(i) - c * t - x0);
  return out;
}

std::vector<double> collar_window(const Grid1D& grid, double width) {
  std::vector<double> w(grid.size(), 1.0);
  if (width <= 0.0) return w;
  const double half = 0.5 * grid.length();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    w[i] = smooth_step((half - std::abs(grid.x(i))) / width);
  }
  return w;
}

std::vector<double> interior_mask(const Grid1D& grid, double width) {
  std::vector<double> m(grid.size(), 1.0);
  if (width <= 0.0) return m;
  const double half = 0.5 * grid.length();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    m[i] = std::abs(grid.x(i)) <= half - width ? 1.0 : 0.0;
  }
  return m;
}

double default_collar_width(const TrainSpec& spec, const Grid1D& grid) {
  return spec.has_kinks() ? grid.length() / 16.0 : 0.0;
}

TrainEvaluator::TrainEvaluator(TrainSpec spec, Grid1D grid, std::optional<double> collar_width)
    : spec_(std::move(spec)), grid_(grid) {
  bind(spec_, grid_);
  collar_width_ = collar_width ? *collar_width : default_collar_width(spec_, grid_);
  window_ = collar_window(grid_, collar_width_);
  if (collar_width_ > 0.0) mask_ = interior_mask(grid_, collar_width_);

  const auto add_kink = [&](const KinkParams& k, bool left) {
    auto c = std::make_shared<Component>();
    c->omega = k.omega;
    c->gamma = k.gamma;
    c->x0 = k.x0;
    c->v = k.v;
    if (!k.profile) {
      c->kind = Component::Kind::GpKink;
    } else {
      c->kind = Component::Kind::Kink;
      c->kink = k.profile;
      const bool nonzero_right = k.profile->orientation() == KinkOrientation::ZeroAtMinusInfinity;
      c->flip = left == nonzero_right;
    }
    components_.push_back(c);
  };
  if (spec_.left_kink) add_kink(*spec_.left_kink, true);
  for (const auto& s : spec_.solitons) {
    if (!s.profile) throw SolverError(ErrorKind::InvalidArgument, "soliton without a profile");
    auto c = std::make_shared<Component>();
    c->kind = s.scaled ? Component::Kind::Scaled : Component::Kind::Soliton;
    if (s.scaled) c->alpha = spec_.nonlinearity.alpha();
    c->soliton = s.profile;
    c->omega = s.omega;
    c->gamma = s.gamma;
    c->x0 = s.x0;
    c->v = s.v;
    components_.push_back(c);
  }
  if (spec_.right_kink) add_kink(*spec_.right_kink, false);
}

cplx TrainEvaluator::component_value(const Component& c, double x, double t) const {
  double xi = x - c.v * t - c.x0;
  if (c.kind == Component::Kind::GpKink) return gp_kink_value(c.v, xi) * std::polar(1.0, c.gamma);
  double modulus = 0.0;
  switch (c.kind) {
    case Component::Kind::Soliton:
      modulus = c.soliton->value(grid_.wrap(xi));
      break;
    case Component::Kind::Scaled:
      modulus = std::pow(c.omega, 1.0 / c.alpha) * c.soliton->value(std::sqrt(c.omega) * grid_.wrap(xi));
      break;
    case Component::Kind::Kink:
      modulus = c.kink->value(c.flip ? -xi : xi);
      break;
    case Component::Kind::GpKink:
      break;
  }
  const double phase = 0.5 * c.v * x - 0.25 * c.v * c.v * t + c.omega * t + c.gamma;
  return std::polar(modulus, phase);
}

void TrainEvaluator::evaluate(double t, std::span<cplx> w, std::span<cplx> h) const {
  const std::size_t n = grid_.size();
  const bool want_w = !w.empty(), want_h = !h.empty();
  if ((want_w && w.size() != n) || (want_h && h.size() != n)) {
    throw SolverError(ErrorKind::InvalidArgument, "output span does not match the grid");
  }
  const auto& g = spec_.nonlinearity;
  std::vector<cplx> parts(components_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid_.x(i);
    cplx sum = 0.0;
    for (std::size_t j = 0; j < components_.size(); ++j) {
      parts[j] = component_value(*components_[j], x, t);
      sum += parts[j];
    }
    if (want_w) w[i] = window_[i] * sum;
    if (want_h) h[i] = window_[i] * interaction_term(g, parts);
  }
}

ComplexField TrainEvaluator::assemble(double t) const {
  ComplexField out(grid_, t);
  evaluate(t, out.values(), {});
  return out;
}

ComplexField TrainEvaluator::source(double t) const {
  ComplexField out(grid_, t);
  evaluate(t, {}, out.values());
  return out;
}

ComplexField TrainEvaluator::component(std::size_t j, double t) const {
  if (j >= components_.size()) throw SolverError(ErrorKind::InvalidArgument, "component index");
  ComplexField out(grid_, t);
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = component_value(*components_[j], grid_.x(i), t);
  return out;
}

ComplexField soliton_field(const SolitonParams& p, const Grid1D& grid, double t) {
  if (p.scaled) {
    throw SolverError(ErrorKind::InvalidArgument, "scaled solitons need scaled_soliton_field");
  }
  TrainSpec spec(NonlinearitySpec::power(2.0));
  spec.solitons.push_back(p);
  return TrainEvaluator(std::move(spec), grid).component(0, t);
}

ComplexField scaled_soliton_field(const SolitonParams& p, const NonlinearitySpec& nl,
                                  const Grid1D& grid, double t) {
  if (!nl.is_power()) {
    throw SolverError(ErrorKind::InvalidArgument, "scaled solitons need a power nonlinearity");
  }
  SolitonParams q = p;
  q.scaled = true;
  TrainSpec spec(nl);
  spec.solitons.push_back(q);
  return TrainEvaluator(std::move(spec), grid).component(0, t);
}

ComplexField kink_field(const KinkParams& p, const Grid1D& grid, double t) {
  TrainSpec spec(NonlinearitySpec::power(2.0));
  if (p.side == KinkSide::Left) {
    spec.left_kink = p;
  } else {
    spec.right_kink = p;
  }
  return TrainEvaluator(std::move(spec), grid, 0.0).component(0, t);
}

ComplexField assemble(const TrainSpec& spec, const Grid1D& grid, double t) {
  return TrainEvaluator(spec, grid).assemble(t);
}

ComplexField source_term(const TrainSpec& spec, const Grid1D& grid, double t) {
  return TrainEvaluator(spec, grid).source(t);
}

SourceDecayReport fit_source_decay(const TrainEvaluator& evaluator, std::span<const double> times,
                                   ValueWindow window) {
  SourceDecayReport report;
  const auto& spec = evaluator.spec();
  const double alpha = spec.nonlinearity.lebesgue_exponent() - 2.0;
  const double p_dual = (alpha + 2.0) / (alpha + 1.0);
  const Grid1D& grid = evaluator.grid();
  std::vector<cplx> h(grid.size());
  for (double t : times) {
    evaluator.evaluate(t, {}, h);
    const double s = sup_norm(h, evaluator.mask());
    report.times.push_back(t);
    report.sup_norm.push_back(s);
    report.dual_norm.push_back(lp_norm(h, grid.dx(), p_dual, evaluator.mask()));
    if (s == 0.0 && !report.underflow_time) report.underflow_time = t;
  }
  if (spec.component_count() >= 2) {
    const auto rel = min_relative_velocity(spec);
    report.v_star = rel.v_star;
    report.omega_star = rel.omega_star;
  }
  const auto try_fit = [&](const std::vector<double>& y) -> std::optional<DecayFit> {
    try {
      return fit_exponential_decay(report.times, y, window);
    } catch (const SolverError& e) {
      if (e.kind() != ErrorKind::WindowEmpty) throw;
      return std::nullopt;
    }
  };
  report.sup_fit = try_fit(report.sup_norm);
  report.dual_fit = try_fit(report.dual_norm);
  if (!report.sup_fit && !report.underflow_time && !times.empty()) {
    for (std::size_t i = 0; i < report.times.size(); ++i) {
      if (report.sup_norm[i] < window.lo) {
        report.underflow_time = report.times[i];
        break;
      }
    }
  }
  if (report.sup_fit && report.v_star > 0.0 && report.omega_star > 0.0) {
    report.normalized_rate = report.sup_fit->rate / (std::sqrt(report.omega_star) * report.v_star);
  }
  return report;
}

}  // namespace solitonforge
