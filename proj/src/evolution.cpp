#include "solitonforge/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "solitonforge/errors.hpp"
#include "solitonforge/waveforms.hpp"

namespace solitonforge {

std::vector<double> sponge_profile(const Grid1D& grid, const Sponge& sponge) {
  auto sigma = collar_window(grid, sponge.width);
  for (auto& s : sigma) s = sponge.strength * (1.0 - s);
  return sigma;
}

SplitStepper::SplitStepper(const Grid1D& grid, NonlinearitySpec spec)
    : grid_(grid), spec_(std::move(spec)), plan_(fft_plan(grid.size())) {
  k2_ = grid_.wavenumbers();
  for (auto& k : k2_) k *= k;
}

const std::vector<cplx>& SplitStepper::multiplier(double h) {
  if (cached_.empty() || h != cached_h_) {
    cached_.resize(k2_.size());
    for (std::size_t i = 0; i < k2_.size(); ++i) cached_[i] = std::polar(1.0, -k2_[i] * h);
    cached_h_ = h;
  }
  return cached_;
}

void SplitStepper::drift(std::span<cplx> u, double h) {
  if (h == 0.0) return;
  const auto& m = multiplier(h);
  plan_->forward(u);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= m[i];
  plan_->inverse(u);
}

void SplitStepper::kick(std::span<cplx> u, double h) const {
  for (auto& z : u) z *= std::polar(1.0, h * spec_.g(std::norm(z)));
}

void SplitStepper::step(std::span<cplx> u, double h) {
  kick(u, 0.5 * h);
  drift(u, h);
  kick(u, 0.5 * h);
}

ComplexField free_propagate(const ComplexField& field, double dt) {
  ComplexField out = field;
  SplitStepper stepper(field.grid(), NonlinearitySpec::power(2.0));
  stepper.drift(out.values(), dt);
  out.set_time(field.time() + dt);
  return out;
}

Trajectory nls_evolve(const ComplexField& initial, const NonlinearitySpec& spec,
                      const EvolveConfig& config) {
  const double span = config.t1 - config.t0;
  if (config.dt == 0.0 || (span != 0.0 && (span > 0.0) != (config.dt > 0.0))) {
    throw SolverError(ErrorKind::InvalidArgument, "dt must be nonzero and point from t0 to t1");
  }
  if (config.max_step > 0.0 && std::abs(config.dt) > config.max_step) {
    std::ostringstream msg;
    msg << "|dt| = " << std::abs(config.dt) << " exceeds the accuracy bound " << config.max_step;
    throw SolverError(ErrorKind::InvalidArgument, msg.str());
  }
  const Grid1D& grid = initial.grid();
  SplitStepper stepper(grid, spec);
  std::vector<double> sigma;
  if (config.sponge) sigma = sponge_profile(grid, *config.sponge);

  const double steps_real = span / config.dt;
  auto steps = static_cast<std::size_t>(std::floor(steps_real + 1e-9));
  const bool partial = steps_real - static_cast<double>(steps) > 1e-9;
  const std::size_t total = steps + (partial ? 1 : 0);

  Trajectory out;
  ComplexField u = initial;
  u.set_time(config.t0);
  out.push_back(u);
  for (std::size_t n = 1; n <= total; ++n) {
    const bool last = n == total;
    const double t_next = last ? config.t1 : config.t0 + static_cast<double>(n) * config.dt;
    const double h = t_next - u.time();
    stepper.step(u.values(), h);
    if (!sigma.empty()) {
      for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::max(0.0, 1.0 - sigma[i] * std::abs(h));
    }
    u.set_time(t_next);
    if ((n % 64 == 0 || last) && !u.all_finite()) {
      std::ostringstream msg;
      msg << "non-finite field at step " << n << " (t = " << t_next << ")";
      throw SolverError(ErrorKind::NonFinite, msg.str());
    }
    if (last || (config.snapshot_stride > 0 && n % config.snapshot_stride == 0)) out.push_back(u);
  }
  return out;
}

ConservedQuantities conserved(const ComplexField& u, const NonlinearitySpec& spec, NormMask mask) {
  const Grid1D& grid = u.grid();
  const auto du = spectral_derivative(grid, u.values());
  ConservedQuantities q;
  double grad = 0.0, pot = 0.0, mom = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = mask.empty() ? 1.0 : mask[i];
    const double s = std::norm(u[i]);
    mass += w * s;
    grad += w * std::norm(du[i]);
    pot += w * primitive_G(spec, s);
    mom += w * (std::conj(u[i]) * du[i]).imag();
  }
  const double dx = grid.dx();
  q.mass = mass * dx;
  q.energy = 0.5 * grad * dx - 0.5 * pot * dx;
  q.momentum = mom * dx;
  return q;
}

ConservedReport conserved_series(const Trajectory& trajectory, const NonlinearitySpec& spec,
                                 NormMask mask) {
  ConservedReport r;
  for (const auto& u : trajectory) {
    r.t.push_back(u.time());
    r.values.push_back(conserved(u, spec, mask));
  }
  if (r.values.empty()) return r;
  const auto& first = r.values.front();
  const auto rel = [](double a, double b) { return b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a); };
  for (const auto& q : r.values) {
    r.mass_drift = std::max(r.mass_drift, rel(q.mass, first.mass));
    r.energy_drift = std::max(r.energy_drift, rel(q.energy, first.energy));
    r.momentum_drift = std::max(r.momentum_drift, std::abs(q.momentum - first.momentum));
  }
  return r;
}

}  // namespace solitonforge
