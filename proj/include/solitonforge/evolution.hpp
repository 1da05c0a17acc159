#pragma once

// Strang split-step integration of i u_t + u_xx = -g(|u|^2) u on the periodic
// grid, and the free Schrodinger group.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "solitonforge/fft.hpp"
#include "solitonforge/grid.hpp"
#include "solitonforge/nonlinearity.hpp"

namespace solitonforge {

/// Damping u <- (1 - sigma(x) |dt|) u with sigma = strength (1 - chi) where chi
/// is the seam collar window of the given width.
struct Sponge {
  double width = 0.0;
  double strength = 1.0;
};

std::vector<double> sponge_profile(const Grid1D& grid, const Sponge& sponge);

struct EvolveConfig {
  double dt = 1e-3;
  double t0 = 0.0;
  double t1 = 1.0;
  /// Snapshot every this many steps; 0 keeps only the endpoints.
  std::size_t snapshot_stride = 0;
  std::optional<Sponge> sponge;
  /// |dt| above this is rejected; nonpositive disables the check.
  double max_step = 0.01;
};

/// Multiplies Fourier mode k by exp(-i k^2 dt), i.e. applies exp(i dt d_xx).
ComplexField free_propagate(const ComplexField& field, double dt);

/// Reusable split-step kernel for one grid and nonlinearity.
class SplitStepper {
 public:
  SplitStepper(const Grid1D& grid, NonlinearitySpec spec);

  /// exp(i h d_xx) in place.
  void drift(std::span<cplx> u, double h);
  /// u <- exp(i h g(|u|^2)) u in place.
  void kick(std::span<cplx> u, double h) const;
  /// Half kick, drift, half kick.
  void step(std::span<cplx> u, double h);

  const Grid1D& grid() const noexcept { return grid_; }

 private:
  const std::vector<cplx>& multiplier(double h);

  Grid1D grid_;
  NonlinearitySpec spec_;
  std::shared_ptr<const FftPlan> plan_;
  std::vector<double> k2_;
  double cached_h_ = 0.0;
  std::vector<cplx> cached_;
};

/// Steps from t0 to t1 (either direction); the final step is shortened to land
/// on t1. The first and last fields are always included. Throws NonFinite.
Trajectory nls_evolve(const ComplexField& initial, const NonlinearitySpec& spec,
                      const EvolveConfig& config);

struct ConservedQuantities {
  double mass = 0.0;
  double energy = 0.0;
  double momentum = 0.0;
};

/// mass ||u||^2, energy 1/2 ||u_x||^2 - 1/2 int G(|u|^2), momentum Im int conj(u) u_x.
ConservedQuantities conserved(const ComplexField& u, const NonlinearitySpec& spec,
                              NormMask mask = {});

struct ConservedReport {
  std::vector<double> t;
  std::vector<ConservedQuantities> values;
  double mass_drift = 0.0;    // max relative change from the first snapshot
  double energy_drift = 0.0;
  double momentum_drift = 0.0;  // absolute
};

ConservedReport conserved_series(const Trajectory& trajectory, const NonlinearitySpec& spec,
                                 NormMask mask = {});

}  // namespace solitonforge
