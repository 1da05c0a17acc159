#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace solitonforge {

using cplx = std::complex<double>;

/// Uniform periodic grid on [-L/2, L/2) with N points.
class Grid1D {
 public:
  Grid1D(double length, std::size_t points);

  double length() const noexcept { return length_; }
  std::size_t size() const noexcept { return points_; }
  double dx() const noexcept { return length_ / static_cast<double>(points_); }
  double x(std::size_t i) const noexcept { return -0.5 * length_ + static_cast<double>(i) * dx(); }
  /// Angular wavenumber of FFT bin i (standard FFT ordering).
  double wavenumber(std::size_t i) const noexcept;
  std::vector<double> coordinates() const;
  std::vector<double> wavenumbers() const;

  /// Velocities must be integer multiples of 4 pi / L so that exp(i v x / 2)
  /// is periodic on the box.
  double velocity_quantum() const noexcept;
  bool is_quantized(double velocity, double tolerance = 1e-9) const noexcept;
  /// Nearest quantized velocity.
  double quantize(double velocity) const noexcept;

  /// Wraps a displacement into [-L/2, L/2).
  double wrap(double displacement) const noexcept;

  bool operator==(const Grid1D& other) const noexcept {
    return length_ == other.length_ && points_ == other.points_;
  }

 private:
  double length_;
  std::size_t points_;
};

class ComplexField {
 public:
  ComplexField(const Grid1D& grid, double t);
  ComplexField(const Grid1D& grid, double t, std::vector<cplx> values);

  const Grid1D& grid() const noexcept { return grid_; }
  double time() const noexcept { return t_; }
  void set_time(double t) noexcept { t_ = t; }

  std::size_t size() const noexcept { return values_.size(); }
  std::span<cplx> values() noexcept { return values_; }
  std::span<const cplx> values() const noexcept { return values_; }
  cplx& operator[](std::size_t i) noexcept { return values_[i]; }
  const cplx& operator[](std::size_t i) const noexcept { return values_[i]; }

  bool all_finite() const noexcept;

 private:
  Grid1D grid_;
  double t_;
  std::vector<cplx> values_;
};

using Trajectory = std::vector<ComplexField>;

/// Weights in [0, 1] selecting the points that enter a norm. An empty mask
/// selects every point.
using NormMask = std::span<const double>;

/// (sum |u|^p dx)^(1/p); p = infinity gives the sup norm.
double lp_norm(std::span<const cplx> u, double dx, double p, NormMask mask = {});
double l2_norm(std::span<const cplx> u, double dx, NormMask mask = {});
double sup_norm(std::span<const cplx> u, NormMask mask = {});
double lp_norm(const ComplexField& u, double p, NormMask mask = {});
/// ||u_x||_2^2 via the spectral derivative.
double gradient_norm_squared(const ComplexField& u, NormMask mask = {});
/// sqrt(||u||_2^2 + ||u_x||_2^2).
double h1_norm(const ComplexField& u, NormMask mask = {});
/// Spectral derivative d/dx.
std::vector<cplx> spectral_derivative(const Grid1D& grid, std::span<const cplx> u);

/// Pointwise a - b on the same grid.
ComplexField difference(const ComplexField& a, const ComplexField& b);

}  // namespace solitonforge
