#pragma once

// Boosted solitons and kinks, their sums, and the source term H.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "solitonforge/fitting.hpp"
#include "solitonforge/grid.hpp"
#include "solitonforge/nonlinearity.hpp"
#include "solitonforge/profiles.hpp"

namespace solitonforge {

/// R(t,x) = Phi(x - v t - x0) exp(i(v x / 2 - v^2 t / 4 + omega t + gamma)).
/// With `scaled` set, Phi is the base profile Phi_0 and the modulus is
/// omega^(1/alpha) Phi_0(sqrt(omega) (x - v t - x0)).
struct SolitonParams {
  std::shared_ptr<const BoundStateProfile> profile;
  bool scaled = false;
  double omega = 1.0;
  double gamma = 0.0;
  double x0 = 0.0;
  double v = 0.0;
};

/// Left kinks carry their nonzero limit at -infinity, right kinks at +infinity.
enum class KinkSide { Left, Right };

/// A null profile selects the Gross-Pitaevskii kink phi_c with c = v.
struct KinkParams {
  std::shared_ptr<const KinkProfile> profile;
  double omega = 0.0;
  double gamma = 0.0;
  double x0 = 0.0;
  double v = 0.0;
  KinkSide side = KinkSide::Left;
};

class TrainSpec {
 public:
  explicit TrainSpec(NonlinearitySpec nonlinearity) : nonlinearity(std::move(nonlinearity)) {}

  NonlinearitySpec nonlinearity;
  std::vector<SolitonParams> solitons;
  std::optional<KinkParams> left_kink;
  std::optional<KinkParams> right_kink;
  /// J for a truncated infinite family, 0 for a finite train.
  int truncation = 0;

  bool has_kinks() const noexcept { return left_kink || right_kink; }
  std::size_t component_count() const noexcept;
  /// Left kink, solitons, right kink.
  std::vector<double> velocities() const;
  std::vector<double> frequencies() const;
};

/// Velocity quantization and (for kinks) strict velocity ordering.
void bind(const TrainSpec& spec, const Grid1D& grid);

ComplexField soliton_field(const SolitonParams& p, const Grid1D& grid, double t);
/// Rescaled soliton of a power nonlinearity with exponent alpha.
ComplexField scaled_soliton_field(const SolitonParams& p, const NonlinearitySpec& spec,
                                  const Grid1D& grid, double t);
ComplexField kink_field(const KinkParams& p, const Grid1D& grid, double t);

/// phi_c(x) = sqrt((2 - c^2)/2) tanh(x sqrt(2 - c^2) / 2) + i c / sqrt(2).
cplx gp_kink_value(double c, double x);
/// K(t,x) = phi_c(x - c t - x0).
ComplexField moving_gp_kink(double c, const Grid1D& grid, double t, double x0 = 0.0);

/// Smooth window equal to 1 away from the seam and 0 at +-L/2, switching over
/// a collar of the given width. Width 0 gives all ones.
std::vector<double> collar_window(const Grid1D& grid, double width);
/// 0/1 weights excluding the collar.
std::vector<double> interior_mask(const Grid1D& grid, double width);
/// L/16 when the spec has kinks, 0 otherwise.
double default_collar_width(const TrainSpec& spec, const Grid1D& grid);

/// Evaluates W (the assembled profile, blended into the seam collar) and the
/// source H = f(W) - sum_j f(R_j) at arbitrary times.
class TrainEvaluator {
 public:
  TrainEvaluator(TrainSpec spec, Grid1D grid, std::optional<double> collar_width = std::nullopt);

  const TrainSpec& spec() const noexcept { return spec_; }
  const Grid1D& grid() const noexcept { return grid_; }
  double collar_width() const noexcept { return collar_width_; }
  /// Norm weights; empty when there is no collar.
  const std::vector<double>& mask() const noexcept { return mask_; }
  const std::vector<double>& window() const noexcept { return window_; }

  /// Either output span may be empty.
  void evaluate(double t, std::span<cplx> w, std::span<cplx> h) const;
  ComplexField assemble(double t) const;
  ComplexField source(double t) const;
  /// Component j (kinks included) without the collar.
  ComplexField component(std::size_t j, double t) const;

 private:
  struct Component;
  cplx component_value(const Component& c, double x, double t) const;

  TrainSpec spec_;
  Grid1D grid_;
  double collar_width_ = 0.0;
  std::vector<double> window_;
  std::vector<double> mask_;
  std::vector<std::shared_ptr<const Component>> components_;
};

ComplexField assemble(const TrainSpec& spec, const Grid1D& grid, double t);
ComplexField source_term(const TrainSpec& spec, const Grid1D& grid, double t);

struct SourceDecayReport {
  std::vector<double> times;
  std::vector<double> sup_norm;
  std::vector<double> dual_norm;  // L^((alpha+2)/(alpha+1)) with alpha = p - 2
  std::optional<DecayFit> sup_fit;
  std::optional<DecayFit> dual_fit;
  double v_star = 0.0;
  double omega_star = 0.0;
  /// sup_fit rate / (sqrt(omega_star) v_star).
  double normalized_rate = 0.0;
  /// First time at which H vanished identically or the fit had no samples.
  std::optional<double> underflow_time;
};

/// Samples ||H(t)|| on `times` and fits exponentials over the samples with
/// value in `window`.
SourceDecayReport fit_source_decay(const TrainEvaluator& evaluator, std::span<const double> times,
                                   ValueWindow window = {1e-13, 1e-2});

}  // namespace solitonforge
