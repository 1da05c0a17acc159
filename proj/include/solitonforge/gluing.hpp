#pragma once

// Solutions converging to an assembled profile W as t -> infinity, built by
// backward integration from final data and by Picard iteration of the
// Duhamel map for the perturbation eta = u - W.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "solitonforge/admissibility.hpp"
#include "solitonforge/errors.hpp"
#include "solitonforge/evolution.hpp"
#include "solitonforge/fitting.hpp"
#include "solitonforge/waveforms.hpp"

namespace solitonforge {

struct FinalDataConfig {
  double t_max = 10.0;
  double t_min = 0.0;
  double dt = 1e-3;
  std::size_t snapshot_stride = 0;
  std::optional<Sponge> sponge;
};

/// u(t_max) = W(t_max), evolved backward to t_min. Snapshots run from t_max
/// down to t_min.
Trajectory solve_final_data(const TrainEvaluator& evaluator, const FinalDataConfig& config);

struct PicardConfig {
  double t_max = 10.0;
  double t_min = 0.0;
  double dt = 1e-3;
  /// Weight of sup_t exp(lambda t) ||.||_p; nonpositive selects half the
  /// fitted decay rate of ||H(t)||_inf.
  double lambda = 0.0;
  int k_max = 20;
  double tol = 1e-10;
  /// Lebesgue exponent p of the weighted norm; nonpositive selects the
  /// nonlinearity's default.
  double norm_exponent = 0.0;
  std::optional<Sponge> sponge;
  /// Raise the lower endpoint to the first time where the first iterates
  /// contract. Unset: on for non-power nonlinearities.
  std::optional<bool> auto_raise_t_min;
  /// eta^0(t); zero when empty.
  std::function<void(double, std::span<cplx>)> initial_guess;
  /// Norms of every level are recorded every this many steps (0: 100 samples).
  std::size_t record_stride = 0;
  /// Keep the accepted eta at the record times.
  bool keep_snapshots = false;
  int no_contraction_run = 3;
};

struct PicardReport {
  int iterates = 0;
  bool converged = false;
  std::vector<double> contraction_factors;  // D_{k+1} / D_k
  std::vector<double> increments;           // D_k = sup e^{lambda t} ||eta^k - eta^{k-1}||_p
  double lambda = 0.0;
  double norm_exponent = 0.0;
  double final_residual = 0.0;  // D_{k*+1}
  double next_change = 0.0;     // D_{k*+2}
  double t_min = 0.0;
  double t_max = 0.0;
  double truncation_bound = 0.0;  // e^{-lambda t_max} / lambda
  std::optional<double> source_rate;
  std::optional<ComplexField> eta0;
  /// Accepted eta sampled at record times, newest time first.
  std::vector<double> record_times;
  std::vector<double> eta_l2;
  std::vector<double> eta_h1;
  std::vector<double> eta_lp;
  Trajectory snapshots;
  std::string message;
};

class PicardError : public SolverError {
 public:
  PicardError(ErrorKind kind, const std::string& message, PicardReport report)
      : SolverError(kind, message), report_(std::move(report)) {}
  const PicardReport& report() const noexcept { return report_; }

 private:
  PicardReport report_;
};

/// Iterates eta^{k+1} = V(eta^k) where V(eta) solves
/// i z_t + z_xx = -(f(W + eta) - f(W) + H) backward from z(t_max) = 0.
/// All levels advance together in one backward sweep. Throws PicardError
/// (NoContraction or NonFinite) carrying the partial report.
PicardReport picard_iterate(const TrainEvaluator& evaluator, const PicardConfig& config);

struct ConvergenceSeries {
  std::vector<double> t;
  std::vector<double> l2;
  std::vector<double> h1;
  std::vector<double> lp;
  double norm_exponent = 0.0;
  std::optional<DecayFit> fit_h1;
  std::optional<DecayFit> fit_l2;
  std::optional<DecayFit> fit_lp;
};

/// ||u(t) - W(t)|| for each snapshot, with exponential fits over samples in `window`.
ConvergenceSeries convergence_curve(const Trajectory& trajectory, const TrainEvaluator& evaluator,
                                    ValueWindow window = {1e-9, 1e-2});
/// Same series from the norms recorded by picard_iterate.
ConvergenceSeries convergence_curve(const PicardReport& report, ValueWindow window = {1e-9, 1e-2});

struct TrainGluingReport {
  PicardReport primary;      // truncation J
  PicardReport comparison;   // truncation J + 2
  double eta0_difference = 0.0;  // ||eta_J(t_min) - eta_{J+2}(t_min)||_p
  TrainAdmissibilityReport admissibility;
};

struct TrainGluingConfig {
  double r1 = 2.0;
  std::optional<double> tail_threshold;
};

TrainGluingReport glue_train(const NonlinearitySpec& spec, const GeometricTrain& generator, int J,
                             const Grid1D& grid, std::shared_ptr<const BoundStateProfile> base,
                             const PicardConfig& picard, const TrainGluingConfig& train = {});

/// Picard iteration about KR with masked norms and a seam sponge.
PicardReport glue_multikink(const TrainEvaluator& evaluator, PicardConfig config);

}  // namespace solitonforge
