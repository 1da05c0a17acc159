#include "solitonforge/gluing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "solitonforge/errors.hpp"

namespace solitonforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

std::vector<double> backward_times(double t_max, double t_min, double dt) {
  if (!(dt > 0.0)) throw SolverError(ErrorKind::InvalidArgument, "dt must be positive");
  if (!(t_max > t_min)) throw SolverError(ErrorKind::InvalidArgument, "need t_max > t_min");
  const double steps_real = (t_max - t_min) / dt;
  auto steps = static_cast<std::size_t>(std::floor(steps_real + 1e-9));
  const bool partial = steps_real - static_cast<double>(steps) > 1e-9;
  std::vector<double> t;
  for (std::size_t n = 0; n <= steps; ++n) t.push_back(t_max - static_cast<double>(n) * dt);
  if (partial) t.push_back(t_min);
  t.back() = t_min;
  return t;
}

std::optional<double> source_decay_rate(const TrainEvaluator& evaluator, double t_min, double t_max) {
  if (evaluator.spec().component_count() < 2) return std::nullopt;
  std::vector<double> times;
  const int samples = 200;
  for (int i = 0; i <= samples; ++i) times.push_back(t_min + (t_max - t_min) * i / samples);
  const auto report = fit_source_decay(evaluator, times);
  if (!report.sup_fit || !(report.sup_fit->rate > 0.0)) return std::nullopt;
  return report.sup_fit->rate;
}

struct SweepResult {
  std::vector<double> times;
  // increments[k][n] = ||eta^{k+1}(t_n) - eta^k(t_n)||_p, k = 0..K-1
  std::vector<std::vector<double>> increments;
  std::vector<std::size_t> record_index;
  std::vector<std::vector<double>> l2, h1, lp;  // per level, per record
  std::vector<Trajectory> snapshots;            // per level
  std::vector<ComplexField> final_fields;       // per level at t_min
};

SweepResult sweep(const TrainEvaluator& evaluator, const PicardConfig& cfg, double t_min,
                  int levels, double p) {
  const Grid1D& grid = evaluator.grid();
  const std::size_t n = grid.size();
  const auto& spec = evaluator.spec().nonlinearity;
  const auto plan = fft_plan(n);
  const auto mask = std::span<const double>(evaluator.mask());
  const double dx = grid.dx();

  SweepResult out;
  out.times = backward_times(cfg.t_max, t_min, cfg.dt);
  const std::size_t nt = out.times.size();
  const std::size_t stride =
      cfg.record_stride > 0 ? cfg.record_stride : std::max<std::size_t>(1, (nt - 1) / 100);

  std::vector<double> k2 = grid.wavenumbers();
  for (auto& k : k2) k *= k;
  std::vector<double> sigma;
  if (cfg.sponge) sigma = sponge_profile(grid, *cfg.sponge);

  const auto K = static_cast<std::size_t>(levels);
  std::vector<std::vector<cplx>> zeta(K, std::vector<cplx>(n, 0.0));
  std::vector<std::vector<cplx>> forcing(K, std::vector<cplx>(n, 0.0));
  std::vector<cplx> guess(n, 0.0), w(n), h(n), tmp(n), diff(n);
  out.increments.assign(K, std::vector<double>(nt, 0.0));
  out.l2.assign(K, {});
  out.h1.assign(K, {});
  out.lp.assign(K, {});
  out.snapshots.assign(K, {});

  const auto load_guess = [&](double t) {
    if (cfg.initial_guess) {
      cfg.initial_guess(t, guess);
    } else {
      std::fill(guess.begin(), guess.end(), cplx(0.0));
    }
  };
  const auto prev_level = [&](std::size_t k) -> const std::vector<cplx>& {
    return k == 0 ? guess : zeta[k - 1];
  };
  const auto set_forcing = [&](std::size_t k) {
    const auto& eta = prev_level(k);
    for (std::size_t i = 0; i < n; ++i) forcing[k][i] = eval_f_increment(spec, w[i], eta[i]) + h[i];
  };
  const auto measure = [&](std::size_t step, bool record) {
    for (std::size_t k = 0; k < K; ++k) {
      const auto& below = prev_level(k);
      for (std::size_t i = 0; i < n; ++i) diff[i] = zeta[k][i] - below[i];
      out.increments[k][step] = finite_or_inf(lp_norm(diff, dx, p, mask));
      if (!record) continue;
      ComplexField f(grid, out.times[step], zeta[k]);
      out.l2[k].push_back(finite_or_inf(l2_norm(f.values(), dx, mask)));
      out.h1[k].push_back(finite_or_inf(h1_norm(f, mask)));
      out.lp[k].push_back(finite_or_inf(lp_norm(f.values(), dx, p, mask)));
      if (cfg.keep_snapshots) out.snapshots[k].push_back(std::move(f));
    }
    if (record) out.record_index.push_back(step);
  };

  // t = t_max: every level starts from zero.
  evaluator.evaluate(out.times[0], w, h);
  load_guess(out.times[0]);
  for (std::size_t k = 0; k < K; ++k) set_forcing(k);
  measure(0, true);

  // exp(-i dt d_xx) as a Fourier multiplier.
  std::vector<cplx> m(n);
  double m_dt = 0.0;
  for (std::size_t s = 1; s < nt; ++s) {
    const double t = out.times[s];
    const double dt = out.times[s - 1] - t;
    const cplx half(0.0, 0.5 * dt);
    if (dt != m_dt) {
      for (std::size_t i = 0; i < n; ++i) m[i] = std::polar(1.0, k2[i] * dt);
      m_dt = dt;
    }
    evaluator.evaluate(t, w, h);
    load_guess(t);
    for (std::size_t k = 0; k < K; ++k) {
      auto& z = zeta[k];
      for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] - half * forcing[k][i];
      plan->forward(tmp);
      for (std::size_t i = 0; i < n; ++i) tmp[i] *= m[i];
      plan->inverse(tmp);
      set_forcing(k);
      for (std::size_t i = 0; i < n; ++i) z[i] = tmp[i] - half * forcing[k][i];
      if (!sigma.empty()) {
        for (std::size_t i = 0; i < n; ++i) z[i] *= std::max(0.0, 1.0 - sigma[i] * dt);
      }
    }
    measure(s, s % stride == 0 || s + 1 == nt);
  }
  for (std::size_t k = 0; k < K; ++k) out.final_fields.emplace_back(grid, out.times.back(), zeta[k]);
  return out;
}

// sup over steps 0..last of e^{lambda t} inc.
double weighted_sup(const std::vector<double>& inc, const std::vector<double>& t, double lambda,
                    std::size_t last) {
  double d = 0.0;
  for (std::size_t s = 0; s <= last && s < inc.size(); ++s) {
    const double v = inc[s] * std::exp(lambda * t[s]);
    d = std::isfinite(v) ? std::max(d, v) : kInf;
  }
  return d;
}

double ratio(double a, double b) {
  if (a == 0.0 && b == 0.0) return 0.0;
  if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
  return b == 0.0 ? kInf : a / b;
}

}  // namespace

Trajectory solve_final_data(const TrainEvaluator& evaluator, const FinalDataConfig& config) {
  EvolveConfig e;
  e.t0 = config.t_max;
  e.t1 = config.t_min;
  e.dt = -std::abs(config.dt);
  e.snapshot_stride = config.snapshot_stride;
  e.sponge = config.sponge;
  return nls_evolve(evaluator.assemble(config.t_max), evaluator.spec().nonlinearity, e);
}

PicardReport picard_iterate(const TrainEvaluator& evaluator, const PicardConfig& config) {
  if (config.k_max < 1) throw SolverError(ErrorKind::InvalidArgument, "k_max must be at least 1");
  const auto& spec = evaluator.spec().nonlinearity;
  PicardReport report;
  report.t_max = config.t_max;
  report.t_min = config.t_min;
  report.norm_exponent = config.norm_exponent > 0.0 ? config.norm_exponent : spec.lebesgue_exponent();
  report.source_rate = source_decay_rate(evaluator, config.t_min, config.t_max);
  if (config.lambda > 0.0) {
    report.lambda = config.lambda;
  } else if (report.source_rate) {
    report.lambda = 0.5 * *report.source_rate;
  } else {
    report.lambda = 0.0;
    report.message = "no source decay to fit; lambda = 0. ";
  }
  report.truncation_bound =
      report.lambda > 0.0 ? std::exp(-report.lambda * config.t_max) / report.lambda : kInf;

  const double p = report.norm_exponent;
  const bool raise = config.auto_raise_t_min.value_or(!spec.is_power());
  std::size_t last = 0;
  double t_low = config.t_min;
  bool raised = false;

  const auto run_levels = [&](int levels) {
    SweepResult r = sweep(evaluator, config, t_low, levels, p);
    last = r.times.size() - 1;
    if (!raise || raised) return r;
    // Running restricted sups; stop at the first time the first iterates fail to contract.
    const int probe = std::min(3, levels);
    std::vector<double> running(static_cast<std::size_t>(probe), 0.0);
    std::size_t good = 0;
    for (std::size_t s = 0; s < r.times.size(); ++s) {
      bool ok = true;
      for (int k = 0; k < probe; ++k) {
        const double v = r.increments[static_cast<std::size_t>(k)][s] * std::exp(report.lambda * r.times[s]);
        running[static_cast<std::size_t>(k)] =
            std::isfinite(v) ? std::max(running[static_cast<std::size_t>(k)], v) : kInf;
      }
      for (int k = 0; k + 1 < probe; ++k) {
        if (ratio(running[static_cast<std::size_t>(k + 1)], running[static_cast<std::size_t>(k)]) >= 1.0) ok = false;
      }
      if (!ok) break;
      good = s;
    }
    raised = true;
    if (good + 1 < r.times.size()) {
      t_low = r.times[good];
      std::ostringstream msg;
      msg << "lower endpoint raised to t = " << t_low << ". ";
      report.message += msg.str();
      report.t_min = t_low;
      r = sweep(evaluator, config, t_low, levels, p);
      last = r.times.size() - 1;
    }
    return r;
  };

  const int levels = config.k_max + 2;
  SweepResult run = run_levels(levels);

  for (int k = 0; k < levels; ++k) {
    report.increments.push_back(
        weighted_sup(run.increments[static_cast<std::size_t>(k)], run.times, report.lambda, last));
  }
  if (!std::isfinite(report.increments[0])) {
    throw PicardError(ErrorKind::NonFinite, "first iterate is not finite", report);
  }

  const int k_limit = levels - 2;
  int accepted = 0;
  for (int k = 0; k < k_limit; ++k) {
    if (report.increments[static_cast<std::size_t>(k)] < config.tol) {
      accepted = k + 1;
      break;
    }
  }
  const int considered = accepted > 0 ? accepted : k_limit;
  int run_length = 0;
  for (int k = 0; k < considered; ++k) {
    const double c = ratio(report.increments[static_cast<std::size_t>(k + 1)],
                           report.increments[static_cast<std::size_t>(k)]);
    report.contraction_factors.push_back(c);
    run_length = c >= 1.0 ? run_length + 1 : 0;
    if (run_length >= config.no_contraction_run && accepted == 0) {
      report.iterates = k + 1;
      std::ostringstream msg;
      msg << "contraction factor >= 1 for " << run_length << " consecutive iterates (last " << c
          << ")";
      report.message += msg.str();
      throw PicardError(ErrorKind::NoContraction, msg.str(), report);
    }
  }

  const std::size_t chosen = static_cast<std::size_t>((accepted > 0 ? accepted : k_limit) - 1);
  report.converged = accepted > 0;
  report.iterates = accepted > 0 ? accepted : k_limit;
  report.final_residual = report.increments[chosen + 1];
  report.next_change = report.increments[chosen + 2];
  report.eta0 = run.final_fields[chosen];
  for (std::size_t r : run.record_index) report.record_times.push_back(run.times[r]);
  report.eta_l2 = run.l2[chosen];
  report.eta_h1 = run.h1[chosen];
  report.eta_lp = run.lp[chosen];
  report.snapshots = std::move(run.snapshots[chosen]);
  if (!report.converged) {
    std::ostringstream msg;
    msg << "no weighted increment below tol = " << config.tol << " within " << config.k_max
        << " iterates";
    report.message += msg.str();
  }
  return report;
}

namespace {

std::optional<DecayFit> maybe_fit(const std::vector<double>& t, const std::vector<double>& y,
                                  ValueWindow window) {
  std::vector<double> tt, yy;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (y[i] > 0.0 && std::isfinite(y[i])) {
      tt.push_back(t[i]);
      yy.push_back(y[i]);
    }
  }
  try {
    return fit_exponential_decay(tt, yy, window);
  } catch (const SolverError& e) {
    if (e.kind() != ErrorKind::WindowEmpty) throw;
    return std::nullopt;
  }
}

void fit_series(ConvergenceSeries& s, ValueWindow window) {
  s.fit_l2 = maybe_fit(s.t, s.l2, window);
  s.fit_h1 = maybe_fit(s.t, s.h1, window);
  s.fit_lp = maybe_fit(s.t, s.lp, window);
}

}  // namespace

ConvergenceSeries convergence_curve(const Trajectory& trajectory, const TrainEvaluator& evaluator,
                                    ValueWindow window) {
  if (trajectory.size() < 10) {
    throw SolverError(ErrorKind::WindowEmpty, "convergence curve needs at least 10 snapshots");
  }
  ConvergenceSeries s;
  s.norm_exponent = evaluator.spec().nonlinearity.lebesgue_exponent();
  const auto mask = std::span<const double>(evaluator.mask());
  for (const auto& u : trajectory) {
    const ComplexField d = difference(u, evaluator.assemble(u.time()));
    s.t.push_back(u.time());
    s.l2.push_back(l2_norm(d.values(), d.grid().dx(), mask));
    s.h1.push_back(h1_norm(d, mask));
    s.lp.push_back(lp_norm(d, s.norm_exponent, mask));
  }
  fit_series(s, window);
  return s;
}

ConvergenceSeries convergence_curve(const PicardReport& report, ValueWindow window) {
  if (report.record_times.size() < 10) {
    throw SolverError(ErrorKind::WindowEmpty, "convergence curve needs at least 10 samples");
  }
  ConvergenceSeries s;
  s.norm_exponent = report.norm_exponent;
  s.t = report.record_times;
  s.l2 = report.eta_l2;
  s.h1 = report.eta_h1;
  s.lp = report.eta_lp;
  fit_series(s, window);
  return s;
}

TrainGluingReport glue_train(const NonlinearitySpec& spec, const GeometricTrain& generator, int J,
                             const Grid1D& grid, std::shared_ptr<const BoundStateProfile> base,
                             const PicardConfig& picard, const TrainGluingConfig& train) {
  TrainGluingReport out;
  TrainAdmissibilityOptions opts;
  opts.truncation = J;
  opts.tail_threshold = train.tail_threshold;
  out.admissibility = check_train_admissibility(spec, generator, train.r1, opts);
  const TrainEvaluator a(make_truncated_train(spec, generator, J, base), grid);
  const TrainEvaluator b(make_truncated_train(spec, generator, J + 2, base), grid);
  out.primary = picard_iterate(a, picard);
  out.comparison = picard_iterate(b, picard);
  const ComplexField d = difference(*out.primary.eta0, *out.comparison.eta0);
  out.eta0_difference = lp_norm(d, out.primary.norm_exponent);
  return out;
}

PicardReport glue_multikink(const TrainEvaluator& evaluator, PicardConfig config) {
  const auto& spec = evaluator.spec();
  if (spec.nonlinearity.dim() != 1) {
    throw SolverError(ErrorKind::PreconditionFailed, "multi-kinks are d = 1 only");
  }
  if (!spec.has_kinks()) {
    throw SolverError(ErrorKind::PreconditionFailed, "multi-kink gluing needs at least one kink");
  }
  if (!config.sponge && evaluator.collar_width() > 0.0) {
    config.sponge = Sponge{evaluator.collar_width(), 2.0};
  }
  return picard_iterate(evaluator, config);
}

}  // namespace solitonforge
