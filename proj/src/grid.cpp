#include "solitonforge/grid.hpp"

#include <cmath>
#include <numbers>

#include "solitonforge/errors.hpp"
#include "solitonforge/fft.hpp"

namespace solitonforge {

Grid1D::Grid1D(double length, std::size_t points) : length_(length), points_(points) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw SolverError(ErrorKind::InvalidArgument, "grid length must be positive");
  }
  if (points < 2 || (points & (points - 1)) != 0) {
    throw SolverError(ErrorKind::InvalidArgument, "grid size must be a power of two");
  }
}

double Grid1D::wavenumber(std::size_t i) const noexcept {
  const auto n = static_cast<std::ptrdiff_t>(points_);
  auto m = static_cast<std::ptrdiff_t>(i);
  if (m >= n / 2) m -= n;
  return 2.0 * std::numbers::pi * static_cast<double>(m) / length_;
}

std::vector<double> Grid1D::coordinates() const {
  std::vector<double> out(points_);
  for (std::size_t i = 0; i < points_; ++i) out[i] = x(i);
  return out;
}

std::vector<double> Grid1D::wavenumbers() const {
  std::vector<double> out(points_);
  for (std::size_t i = 0; i < points_; ++i) out[i] = wavenumber(i);
  return out;
}

double Grid1D::velocity_quantum() const noexcept { return 4.0 * std::numbers::pi / length_; }

bool Grid1D::is_quantized(double velocity, double tolerance) const noexcept {
  const double m = velocity / velocity_quantum();
  return std::abs(m - std::round(m)) <= tolerance * std::max(1.0, std::abs(m));
}

double Grid1D::quantize(double velocity) const noexcept {
  return std::round(velocity / velocity_quantum()) * velocity_quantum();
}

double Grid1D::wrap(double displacement) const noexcept {
  const double shifted = displacement + 0.5 * length_;
  return shifted - length_ * std::floor(shifted / length_) - 0.5 * length_;
}

ComplexField::ComplexField(const Grid1D& grid, double t)
    : grid_(grid), t_(t), values_(grid.size(), cplx{0.0, 0.0}) {}

ComplexField::ComplexField(const Grid1D& grid, double t, std::vector<cplx> values)
    : grid_(grid), t_(t), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw SolverError(ErrorKind::InvalidArgument, "field size does not match its grid");
  }
}

bool ComplexField::all_finite() const noexcept {
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

double lp_norm(std::span<const cplx> u, double dx, double p, NormMask mask) {
  const bool masked = !mask.empty();
  if (std::isinf(p)) return sup_norm(u, mask);
  double acc = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double w = masked ? mask[i] : 1.0;
      acc += w * std::norm(u[i]);
    }
    return std::sqrt(acc * dx);
  }
  if (p == 4.0) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double w = masked ? mask[i] : 1.0;
      const double s = std::norm(u[i]);
      acc += w * s * s;
    }
    return std::sqrt(std::sqrt(acc * dx));
  }
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = masked ? mask[i] : 1.0;
    acc += w * std::pow(std::abs(u[i]), p);
  }
  return std::pow(acc * dx, 1.0 / p);
}

double l2_norm(std::span<const cplx> u, double dx, NormMask mask) { return lp_norm(u, dx, 2.0, mask); }

double sup_norm(std::span<const cplx> u, NormMask mask) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!mask.empty() && mask[i] <= 0.0) continue;
    m = std::max(m, std::abs(u[i]));
  }
  return m;
}

double lp_norm(const ComplexField& u, double p, NormMask mask) {
  return lp_norm(u.values(), u.grid().dx(), p, mask);
}

std::vector<cplx> spectral_derivative(const Grid1D& grid, std::span<const cplx> u) {
  std::vector<cplx> d(u.begin(), u.end());
  const auto plan = fft_plan(grid.size());
  plan->forward(d);
  for (std::size_t i = 0; i < d.size(); ++i) {
    // The Nyquist mode has no well-defined derivative on a real-symmetric
    // basis; drop it.
    const double k = (i == d.size() / 2) ? 0.0 : grid.wavenumber(i);
    d[i] *= cplx{0.0, k};
  }
  plan->inverse(d);
  return d;
}

double gradient_norm_squared(const ComplexField& u, NormMask mask) {
  const auto d = spectral_derivative(u.grid(), u.values());
  const double n = l2_norm(d, u.grid().dx(), mask);
  return n * n;
}

double h1_norm(const ComplexField& u, NormMask mask) {
  const double l2 = l2_norm(u.values(), u.grid().dx(), mask);
  return std::sqrt(l2 * l2 + gradient_norm_squared(u, mask));
}

ComplexField difference(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) {
    throw SolverError(ErrorKind::InvalidArgument, "fields live on different grids");
  }
  ComplexField out(a.grid(), a.time());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace solitonforge
