#include "solitonforge/jobs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "solitonforge/admissibility.hpp"
#include "solitonforge/evolution.hpp"
#include "solitonforge/gluing.hpp"
#include "solitonforge/io.hpp"
#include "solitonforge/profiles.hpp"

namespace solitonforge {
namespace {

namespace fs = std::filesystem;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* kPhaseConvention =
    "R(t,x) = Phi(x - v t - x0) exp(i(v x / 2 - v^2 t / 4 + omega t + gamma))";

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  fs::path file(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
  }
  const fs::path& dir() const noexcept { return dir_; }
  const std::vector<std::string>& files() const noexcept { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

struct Context {
  const ExperimentConfig& cfg;
  const JobOptions& options;
  Output& out;
  json summary = json::object();
  json manifest_extra = json::object();
};

void log_line(const JobOptions& options, const std::string& line) {
  if (!options.log) return;
  static std::mutex m;
  std::lock_guard lock(m);
  *options.log << line << '\n';
}

json fit_json(const std::optional<DecayFit>& fit) {
  if (!fit) return nullptr;
  return {{"rate", fit->rate},
          {"prefactor", fit->prefactor},
          {"r_squared", fit->r_squared},
          {"points", fit->points},
          {"window", {fit->window_lo, fit->window_hi}}};
}

double fit_rate(const std::optional<DecayFit>& fit) { return fit ? fit->rate : kNaN; }
double fit_r2(const std::optional<DecayFit>& fit) { return fit ? fit->r_squared : kNaN; }

// ---------------------------------------------------------------------------
// Builders

std::shared_ptr<const BoundStateProfile> make_bound_state(const NonlinearitySpec& spec, double omega,
                                                          const std::string& method,
                                                          const ExperimentConfig& cfg) {
  const bool closed = method == "closed_form" || (method == "auto" && spec.is_power() && spec.dim() == 1);
  ProfileGridOptions grid;
  grid.extent = cfg.number("profile.extent", 0.0);
  grid.dx = cfg.number("profile.dx", grid.dx);
  if (closed) return std::make_shared<const BoundStateProfile>(ground_state_closed_form(spec, omega, grid));
  ShootingOptions opts;
  opts.grid = grid;
  opts.tail_tolerance = cfg.number("profile.tail_tolerance", opts.tail_tolerance);
  opts.ode_tolerance = cfg.number("profile.ode_tolerance", opts.ode_tolerance);
  return std::make_shared<const BoundStateProfile>(shoot_bound_state(spec, omega, opts));
}

GeometricTrain build_generator(const ExperimentConfig& cfg) {
  GeometricTrain g;
  g.ratio = cfg.number("generator.ratio", g.ratio);
  g.vbar = cfg.number("generator.vbar", g.vbar);
  g.gamma = cfg.number("generator.gamma", g.gamma);
  return g;
}

std::optional<Sponge> sponge_from(const ExperimentConfig& cfg, const std::string& table, double default_width) {
  const bool given = cfg.has(table + ".sponge_strength") || cfg.has(table + ".sponge_width");
  if (!given) return std::nullopt;
  Sponge s;
  s.width = cfg.number(table + ".sponge_width", default_width);
  s.strength = cfg.number(table + ".sponge_strength", 2.0);
  if (s.width <= 0.0 || s.strength <= 0.0) return std::nullopt;
  return s;
}

PicardConfig build_picard(const ExperimentConfig& cfg, const TrainEvaluator& ev) {
  PicardConfig p;
  p.t_max = cfg.number("glue.t_max", p.t_max);
  p.t_min = cfg.number("glue.t_min", p.t_min);
  p.dt = cfg.number("glue.dt", p.dt);
  p.lambda = cfg.number("glue.lambda", p.lambda);
  p.k_max = static_cast<int>(cfg.integer("glue.k_max", p.k_max));
  p.tol = cfg.number("glue.tol", p.tol);
  p.norm_exponent = cfg.number("glue.norm_exponent", p.norm_exponent);
  p.record_stride = static_cast<std::size_t>(cfg.integer("glue.record_stride", 0));
  if (cfg.has("glue.auto_raise_t_min")) p.auto_raise_t_min = cfg.boolean("glue.auto_raise_t_min", false);
  p.sponge = sponge_from(cfg, "glue", ev.collar_width());
  return p;
}

// ---------------------------------------------------------------------------
// Serialization of reports

json picard_json(const PicardReport& r) {
  json j = {{"iterates", r.iterates},
            {"converged", r.converged},
            {"contraction_factors", r.contraction_factors},
            {"increments", r.increments},
            {"lambda", r.lambda},
            {"norm_exponent", r.norm_exponent},
            {"final_residual", r.final_residual},
            {"next_change", r.next_change},
            {"t_min", r.t_min},
            {"t_max", r.t_max},
            {"truncation_bound", r.truncation_bound},
            {"message", r.message}};
  j["source_rate"] = r.source_rate ? json(*r.source_rate) : json(nullptr);
  return j;
}

void write_increments(Output& out, const std::string& name, const PicardReport& r) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < r.increments.size(); ++k) {
    const double factor = k < r.contraction_factors.size() ? r.contraction_factors[k] : kNaN;
    rows.push_back({static_cast<double>(k + 1), r.increments[k], factor});
  }
  write_csv(out.file(name), {"k", "increment", "contraction_factor"}, rows);
}

void write_convergence(Output& out, const std::string& name, const ConvergenceSeries& s) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < s.t.size(); ++i) rows.push_back({s.t[i], s.l2[i], s.h1[i], s.lp[i]});
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
  write_csv(out.file(name), {"t", "L2", "H1", "Lalpha2"}, rows);
}

json convergence_json(const ConvergenceSeries& s) {
  return {{"norm_exponent", s.norm_exponent},
          {"fit_h1", fit_json(s.fit_h1)},
          {"fit_l2", fit_json(s.fit_l2)},
          {"fit_lp", fit_json(s.fit_lp)}};
}

std::optional<ConvergenceSeries> try_convergence(const PicardReport& r, const JobOptions& options) {
  try {
    return convergence_curve(r);
  } catch (const SolverError& e) {
    log_line(options, std::string("warning: ") + e.what());
    return std::nullopt;
  }
}

void summarize_picard(json& summary, const PicardReport& r, const std::optional<ConvergenceSeries>& s,
                      const TrainEvaluator& ev) {
  summary["iterates"] = r.iterates;
  summary["converged"] = r.converged ? 1 : 0;
  summary["lambda"] = r.lambda;
  summary["source_rate"] = r.source_rate ? *r.source_rate : kNaN;
  summary["final_residual"] = r.final_residual;
  summary["max_contraction"] =
      r.contraction_factors.empty() ? kNaN
                                    : *std::max_element(r.contraction_factors.begin(), r.contraction_factors.end());
  const auto rel = min_relative_velocity(ev.spec());
  summary["v_star"] = rel.v_star;
  summary["omega_star"] = rel.omega_star;
  if (s) {
    summary["rate_h1"] = fit_rate(s->fit_h1);
    summary["r2_h1"] = fit_r2(s->fit_h1);
    summary["rate_l2"] = fit_rate(s->fit_l2);
    summary["rate_lp"] = fit_rate(s->fit_lp);
    const double scale = std::sqrt(rel.omega_star) * rel.v_star;
    summary["normalized_rate_h1"] = scale > 0.0 ? fit_rate(s->fit_h1) / scale : kNaN;
  }
}

// ---------------------------------------------------------------------------
// Jobs

void job_profile(Context& c) {
  const auto spec = build_nonlinearity(c.cfg);
  const std::string method = c.cfg.string("profile.method", "auto");
  json report;
  if (method == "kink") {
    KinkFrequency freq;
    if (c.cfg.has("profile.omega1")) {
      freq.omega1 = c.cfg.number("profile.omega1", 0.0);
    } else {
      freq = find_kink_frequency(spec);
    }
    KinkOptions opts;
    opts.extent = c.cfg.number("profile.extent", opts.extent);
    opts.dx = c.cfg.number("profile.dx", opts.dx);
    opts.anchor_fraction = c.cfg.number("profile.anchor_fraction", opts.anchor_fraction);
    const KinkProfile kink = kink_profile(spec, freq.omega1, opts);
    write_profile(c.out.file("profile.prof"), kink);
    const auto& s = kink.samples();
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < s.size(); ++i) rows.push_back({s.x(i), s.values[i], s.derivatives[i]});
    write_csv(c.out.file("profile.csv"), {"x", "phi", "dphi"}, rows);
    report = {{"kind", "kink"},
              {"omega1", kink.omega1()},
              {"zeta1", kink.zeta1()},
              {"left_limit", kink.left_limit()},
              {"right_limit", kink.right_limit()},
              {"first_integral_constant", kink.first_integral_constant},
              {"first_integral_residual", first_integral_residual(kink, spec)},
              {"fitted_decay_left", kink.fitted_decay_left},
              {"fitted_decay_right", kink.fitted_decay_right},
              {"linear_gap_zero", freq.linear_gap_zero},
              {"linear_gap_plateau", freq.linear_gap_plateau},
              {"plateau_decay_condition", freq.plateau_decay_condition}};
    c.summary["omega1"] = kink.omega1();
    c.summary["zeta1"] = kink.zeta1();
    c.summary["fitted_decay_left"] = kink.fitted_decay_left;
    c.summary["fitted_decay_right"] = kink.fitted_decay_right;
  } else {
    const double omega = c.cfg.number("profile.omega", 1.0);
    const auto profile = make_bound_state(spec, omega, method, c.cfg);
    write_profile(c.out.file("profile.prof"), *profile);
    const auto& s = profile->samples();
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < s.size(); ++i) rows.push_back({s.x(i), s.values[i], s.derivatives[i]});
    write_csv(c.out.file("profile.csv"), {"x", "phi", "dphi"}, rows);
    const double S = action(*profile, spec);
    report = {{"kind", "bound_state"},
              {"omega", omega},
              {"method", profile->method},
              {"amplitude", profile->amplitude()},
              {"residual", profile->residual},
              {"fitted_decay", profile->fitted_decay},
              {"expected_decay", std::sqrt(omega)},
              {"action", S}};
    c.summary["amplitude"] = profile->amplitude();
    c.summary["residual"] = profile->residual;
    c.summary["fitted_decay"] = profile->fitted_decay;
    c.summary["action"] = S;
  }
  write_json(c.out.file("profile.json"), report);
}

std::vector<double> assemble_times(const ExperimentConfig& cfg) {
  auto times = cfg.numbers("assemble.times");
  if (!times.empty()) return times;
  const double a = cfg.number("assemble.t_start", 0.0);
  const double b = cfg.number("assemble.t_end", 10.0);
  const auto n = static_cast<std::size_t>(std::max<long long>(2, cfg.integer("assemble.samples", 101)));
  for (std::size_t i = 0; i < n; ++i) times.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return times;
}

std::optional<double> collar_override(const ExperimentConfig& cfg) { return cfg.optional_number("train.collar_width"); }

void job_assemble(Context& c) {
  const auto spec = build_nonlinearity(c.cfg);
  const Grid1D grid = build_grid(c.cfg);
  const TrainEvaluator ev(build_train(c.cfg, spec), grid, collar_override(c.cfg));
  const auto times = assemble_times(c.cfg);
  const SourceDecayReport r = fit_source_decay(ev, times);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < r.times.size(); ++i) rows.push_back({r.times[i], r.sup_norm[i], r.dual_norm[i]});
  write_csv(c.out.file("source_norms.csv"), {"t", "H_sup", "H_dual"}, rows);
  json report = {{"v_star", r.v_star},
                 {"omega_star", r.omega_star},
                 {"normalized_rate", r.normalized_rate},
                 {"sup_fit", fit_json(r.sup_fit)},
                 {"dual_fit", fit_json(r.dual_fit)}};
  report["underflow_time"] = r.underflow_time ? json(*r.underflow_time) : json(nullptr);
  write_json(c.out.file("source_fit.json"), report);
  if (c.cfg.boolean("assemble.write_fields", false)) {
    json times_written = json::array();
    for (std::size_t i = 0; i < times.size(); ++i) {
      std::ostringstream name;
      name << std::setw(4) << std::setfill('0') << i;
      write_field(c.out.file("W_" + name.str() + ".fld"), ev.assemble(times[i]), {{"quantity", "W"}});
      write_field(c.out.file("H_" + name.str() + ".fld"), ev.source(times[i]), {{"quantity", "H"}});
      times_written.push_back(times[i]);
    }
    c.manifest_extra["field_times"] = times_written;
  }
  c.summary["source_rate"] = fit_rate(r.sup_fit);
  c.summary["normalized_rate"] = r.normalized_rate;
  c.summary["v_star"] = r.v_star;
}

void job_evolve(Context& c) {
  const auto spec = build_nonlinearity(c.cfg);
  const Grid1D grid = build_grid(c.cfg);
  const TrainEvaluator ev(build_train(c.cfg, spec), grid, collar_override(c.cfg));
  EvolveConfig e;
  e.dt = c.cfg.number("evolve.dt", e.dt);
  e.t0 = c.cfg.number("evolve.t0", e.t0);
  e.t1 = c.cfg.number("evolve.t1", e.t1);
  e.max_step = c.cfg.number("evolve.max_step", e.max_step);
  e.snapshot_stride = static_cast<std::size_t>(c.cfg.integer("evolve.snapshot_stride", 100));
  e.sponge = sponge_from(c.cfg, "evolve", ev.collar_width());
  const Trajectory traj = nls_evolve(ev.assemble(e.t0), spec, e);
  const NormMask mask(ev.mask());
  const ConservedReport q = conserved_series(traj, spec, mask);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < q.t.size(); ++i) rows.push_back({q.t[i], q.values[i].mass, q.values[i].energy, q.values[i].momentum});
  write_csv(c.out.file("conserved.csv"), {"t", "mass", "energy", "momentum"}, rows);
  std::vector<std::vector<double>> dev;
  for (const auto& u : traj) {
    const ComplexField d = difference(u, ev.assemble(u.time()));
    dev.push_back({u.time(), l2_norm(d.values(), grid.dx(), mask), h1_norm(d, mask)});
  }
  write_csv(c.out.file("deviation.csv"), {"t", "L2", "H1"}, dev);
  json snapshot_times = json::array();
  if (c.cfg.boolean("evolve.write_snapshots", false)) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
      std::ostringstream name;
      name << "u_" << std::setw(5) << std::setfill('0') << i << ".fld";
      write_field(c.out.file(name.str()), traj[i]);
      snapshot_times.push_back(traj[i].time());
    }
  }
  write_field(c.out.file("final.fld"), traj.back());
  c.manifest_extra["snapshot_times"] = snapshot_times;
  c.manifest_extra["conserved_series"] = "conserved.csv";
  c.summary["mass_drift"] = q.mass_drift;
  c.summary["energy_drift"] = q.energy_drift;
  c.summary["momentum_drift"] = q.momentum_drift;
}

void require_gluing_nonlinearity(const NonlinearitySpec& spec) {
  if (spec.profile_evolution_only()) {
    throw SolverError(ErrorKind::PreconditionFailed,
                      "g(0) != 0: this nonlinearity is for profile and evolution runs only");
  }
}

void job_glue_generator(Context& c, const NonlinearitySpec& spec, const Grid1D& grid) {
  if (!spec.is_power()) {
    throw SolverError(ErrorKind::PreconditionFailed, "geometric trains use rescaled power-law solitons");
  }
  const GeometricTrain gen = build_generator(c.cfg);
  const int J = static_cast<int>(c.cfg.integer("generator.J", 6));
  const auto base = make_bound_state(spec, 1.0, "closed_form", c.cfg);
  TrainGluingConfig tg;
  tg.r1 = c.cfg.number("generator.r1", tg.r1);
  tg.tail_threshold = c.cfg.optional_number("generator.tail_threshold");
  const TrainEvaluator probe(make_truncated_train(spec, gen, J, base), grid);
  const PicardConfig pc = build_picard(c.cfg, probe);
  const TrainGluingReport r = glue_train(spec, gen, J, grid, base, pc, tg);
  json report = {{"J", J},
                 {"primary", picard_json(r.primary)},
                 {"comparison", picard_json(r.comparison)},
                 {"eta0_difference", r.eta0_difference},
                 {"A_omega", r.admissibility.limit},
                 {"truncation_tail", r.admissibility.truncation_tail},
                 {"speed", r.admissibility.speed_closed_form}};
  write_json(c.out.file("train_gluing.json"), report);
  write_increments(c.out, "increments.csv", r.primary);
  if (const auto s = try_convergence(r.primary, c.options)) write_convergence(c.out, "convergence.csv", *s);
  write_json(c.out.file("picard.json"), picard_json(r.primary));
  if (r.primary.eta0) write_field(c.out.file("eta0.fld"), *r.primary.eta0, {{"quantity", "eta(t_min)"}});
  c.summary["eta0_difference"] = r.eta0_difference;
  c.summary["iterates"] = r.primary.iterates;
  c.summary["converged"] = r.primary.converged ? 1 : 0;
}

// Earliest time at which two solitons are half a box apart; past it they close in
// across the seam and H grows again.
std::optional<double> seam_recurrence_time(const TrainSpec& spec, double L) {
  std::optional<double> out;
  for (std::size_t j = 0; j < spec.solitons.size(); ++j) {
    for (std::size_t k = j + 1; k < spec.solitons.size(); ++k) {
      const double dv = spec.solitons[k].v - spec.solitons[j].v;
      if (dv == 0.0) continue;
      const double dx = spec.solitons[k].x0 - spec.solitons[j].x0;
      const double t = ((dv > 0 ? 0.5 : -0.5) * L - dx) / dv;
      if (t > 0.0 && (!out || t < *out)) out = t;
    }
  }
  return out;
}

void warn_recurrence(Context& c, const TrainEvaluator& ev, double t_max) {
  const auto t_rec = seam_recurrence_time(ev.spec(), ev.grid().length());
  if (!t_rec || t_max <= *t_rec) return;
  std::ostringstream msg;
  msg << "warning: t_max = " << t_max << " exceeds the seam recurrence time " << *t_rec
      << "; the source grows again after it";
  log_line(c.options, msg.str());
  c.manifest_extra["warnings"].push_back(msg.str());
}

void job_glue(Context& c) {
  const auto spec = build_nonlinearity(c.cfg);
  require_gluing_nonlinearity(spec);
  const Grid1D grid = build_grid(c.cfg);
  if (c.cfg.has("generator") && !c.cfg.has("train")) return job_glue_generator(c, spec, grid);

  const TrainEvaluator ev(build_train(c.cfg, spec), grid, collar_override(c.cfg));
  const PicardConfig pc = build_picard(c.cfg, ev);
  const std::string method = c.cfg.string("glue.method", "picard");
  warn_recurrence(c, ev, pc.t_max);

  if (method != "final_data") {
    PicardReport r;
    try {
      r = ev.spec().has_kinks() ? glue_multikink(ev, pc) : picard_iterate(ev, pc);
    } catch (const PicardError& e) {
      json j = picard_json(e.report());
      j["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
      write_json(c.out.file("picard.json"), j);
      write_increments(c.out, "increments.csv", e.report());
      throw;
    }
    write_json(c.out.file("picard.json"), picard_json(r));
    write_increments(c.out, "increments.csv", r);
    const auto s = try_convergence(r, c.options);
    if (s) {
      write_convergence(c.out, "convergence.csv", *s);
      write_json(c.out.file("convergence_fit.json"), convergence_json(*s));
    }
    if (r.eta0 && c.cfg.boolean("glue.write_eta0", true)) {
      write_field(c.out.file("eta0.fld"), *r.eta0, {{"quantity", "eta(t_min)"}});
    }
    summarize_picard(c.summary, r, s, ev);
  }
  if (method != "picard") {
    FinalDataConfig fd;
    fd.t_max = pc.t_max;
    fd.t_min = pc.t_min;
    fd.dt = c.cfg.number("glue.fd_dt", pc.dt);
    const auto steps = static_cast<std::size_t>(std::llround((fd.t_max - fd.t_min) / fd.dt));
    fd.snapshot_stride = std::max<std::size_t>(1, steps / 200);
    fd.sponge = pc.sponge;
    if (!fd.sponge && ev.collar_width() > 0.0) fd.sponge = Sponge{ev.collar_width(), 2.0};
    const Trajectory traj = solve_final_data(ev, fd);
    const ConvergenceSeries s = convergence_curve(traj, ev);
    write_convergence(c.out, "convergence_final_data.csv", s);
    write_json(c.out.file("final_data.json"), convergence_json(s));
    write_field(c.out.file("u_t_min.fld"), traj.back(), {{"quantity", "u(t_min)"}});
    c.summary["final_data_rate_h1"] = fit_rate(s.fit_h1);
    c.summary["final_data_r2_h1"] = fit_r2(s.fit_h1);
  }
}

void job_check(Context& c) {
  const std::string kind = c.cfg.string("check.kind", "growth_bounds");
  const auto spec = build_nonlinearity(c.cfg);
  json report = {{"kind", kind}};
  bool pass = true;
  if (kind == "growth_bounds") {
    LogSampleRange range;
    range.s_min = c.cfg.number("check.s_min", range.s_min);
    range.s_max = c.cfg.number("check.s_max", range.s_max);
    range.points = static_cast<int>(c.cfg.integer("check.points", range.points));
    const auto r = check_growth_bounds(spec, range, c.cfg.optional_number("check.omega0"),
                                       c.cfg.optional_number("check.constant_limit"));
    pass = r.pass;
    report.update({{"pass", r.pass},
                   {"constant", r.constant},
                   {"g_zero_at_origin", r.g_zero_at_origin},
                   {"exponent_window_ok", r.exponent_window_ok},
                   {"violating_samples", r.violating_samples},
                   {"message", r.message}});
    report["focusing_s0"] = r.focusing_s0 ? json(*r.focusing_s0) : json(nullptr);
    c.summary["constant"] = r.constant;
  } else if (kind == "train_admissibility") {
    TrainAdmissibilityOptions opts;
    opts.partial_sum_terms = static_cast<int>(c.cfg.integer("check.partial_sum_terms", opts.partial_sum_terms));
    opts.pair_terms = static_cast<int>(c.cfg.integer("check.pair_terms", opts.pair_terms));
    opts.tail_threshold = c.cfg.optional_number("check.tail_threshold");
    opts.truncation = static_cast<int>(c.cfg.integer("check.truncation", 0));
    const auto r = check_train_admissibility(spec, build_generator(c.cfg), c.cfg.number("check.r1", 2.0), opts);
    pass = r.pass;
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < r.partial_sums.size(); ++j) rows.push_back({static_cast<double>(j + 1), r.partial_sums[j]});
    write_csv(c.out.file("partial_sums.csv"), {"J", "A_J"}, rows);
    report.update({{"pass", r.pass},
                   {"r1", r.r1},
                   {"exponent", r.exponent},
                   {"limit", r.limit},
                   {"tail_bound", r.tail_bound},
                   {"truncation_tail", r.truncation_tail},
                   {"speed_enumerated", r.speed_enumerated},
                   {"speed_closed_form", r.speed_closed_form},
                   {"message", r.message}});
    c.summary["A_omega"] = r.limit;
  } else if (kind == "velocity_spread") {
    auto v = c.cfg.numbers("check.velocities");
    if (v.empty()) v = build_train(c.cfg, spec).velocities();
    const auto r = check_velocity_spread(v, c.cfg.number("check.M", 1.0));
    pass = r.pass;
    report.update({{"pass", r.pass}, {"v_bar", r.v_bar}, {"v_star", r.v_star}, {"bound", r.bound}});
  } else if (kind == "exponents") {
    const double b1 = c.cfg.number("check.beta1", spec.alpha1());
    const double b2 = c.cfg.number("check.beta2", spec.alpha2());
    const auto r = select_exponents(b1, b2, spec.dim());
    report.update({{"pass", true},
                   {"r1", r.r1},
                   {"r2", r.r2},
                   {"b1", r.b1},
                   {"b2", r.b2},
                   {"slack", exponent_condition_slack(r, b1, b2, spec.dim())}});
    c.summary["r1"] = r.r1;
    c.summary["r2"] = r.r2;
  } else if (kind == "kink_frequency") {
    const auto r = find_kink_frequency(spec);
    report.update({{"pass", true},
                   {"omega1", r.omega1},
                   {"zeta1", r.zeta1},
                   {"residual", r.residual},
                   {"linear_gap_zero", r.linear_gap_zero},
                   {"linear_gap_plateau", r.linear_gap_plateau},
                   {"plateau_decay_condition", r.plateau_decay_condition},
                   {"closed_form_special_case", r.closed_form_special_case}});
    c.summary["omega1"] = r.omega1;
  }
  write_json(c.out.file("check.json"), report);
  c.summary["pass"] = pass ? 1 : 0;
  if (!pass) throw SolverError(ErrorKind::PreconditionFailed, kind + " check failed");
}

void job_sweep(Context& c) {
  const std::string axis = c.cfg.string("sweep.axis", "");
  if (axis.empty()) throw SolverError(ErrorKind::ConfigError, c.cfg.locate("sweep.axis") + ": missing sweep axis");
  auto values = c.cfg.numbers("sweep.values");
  if (values.empty()) throw SolverError(ErrorKind::ConfigError, c.cfg.locate("sweep.values") + ": empty sweep axis");
  std::sort(values.begin(), values.end());
  const auto dup = std::unique(values.begin(), values.end());
  if (dup != values.end()) {
    std::ostringstream msg;
    msg << "warning: " << std::distance(dup, values.end()) << " duplicate value(s) on axis '" << axis
        << "' ignored";
    log_line(c.options, msg.str());
    c.manifest_extra["warnings"].push_back(msg.str());
    values.erase(dup, values.end());
  }
  const std::string sub_job = c.cfg.string("sweep.job", "glue");

  // Build every point first so grid and schema problems fail before any run.
  std::vector<ExperimentConfig> points;
  for (double v : values) {
    ExperimentConfig p = c.cfg;
    p.data.erase("sweep");
    p.data["job"] = sub_job;
    p.set(axis, v);
    if (p.has("train")) bind(build_train(p, build_nonlinearity(p)), build_grid(p));
    points.push_back(std::move(p));
  }

  std::vector<JobResult> results(points.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      std::ostringstream name;
      name << "point_" << std::setw(3) << std::setfill('0') << i;
      JobOptions sub = c.options;
      sub.out_dir = c.out.dir() / name.str();
      sub.workers = 1;
      results[i] = run_job(sub_job, points[i], sub);
      log_line(c.options, "sweep " + axis + " = " + format_number(values[i]) + ": exit " +
                              std::to_string(results[i].exit_code));
    }
  };
  const int workers = std::clamp(c.options.workers, 1, static_cast<int>(points.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<std::string> keys;
  for (const auto& r : results) {
    for (const auto& [k, v] : r.summary.items()) {
      if (v.is_number() && std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
  }
  std::sort(keys.begin(), keys.end());
  std::vector<std::string> columns = {"value", "exit_code"};
  columns.insert(columns.end(), keys.begin(), keys.end());
  std::vector<std::vector<double>> rows;
  json point_list = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    std::vector<double> row = {values[i], static_cast<double>(results[i].exit_code)};
    for (const auto& k : keys) {
      const auto it = results[i].summary.find(k);
      row.push_back(it != results[i].summary.end() && it->is_number() ? it->get<double>() : kNaN);
    }
    rows.push_back(std::move(row));
    point_list.push_back({{"value", values[i]}, {"exit_code", results[i].exit_code}, {"message", results[i].message}});
  }
  write_csv(c.out.file("rates.csv"), columns, rows);
  c.manifest_extra["points"] = point_list;
  c.summary["points"] = results.size();
}

}  // namespace

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::R1OutOfRange:
    case ErrorKind::DivergentSeries:
    case ErrorKind::TailTooLarge:
    case ErrorKind::PreconditionFailed:
    case ErrorKind::Infeasible:
      return 2;
    default:
      return 1;
  }
}

int resolve_workers(std::optional<int> requested) {
  if (requested) return std::max(1, *requested);
  if (const char* env = std::getenv("SOLITONFORGE_WORKERS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw SolverError(ErrorKind::ConfigError, std::string("SOLITONFORGE_WORKERS is not an integer: ") + env);
    }
  }
  return 1;
}

NonlinearitySpec build_nonlinearity(const ExperimentConfig& cfg) {
  const std::string kind = cfg.string("nonlinearity.kind", "power");
  const int dim = static_cast<int>(cfg.integer("nonlinearity.dim", 1));
  if (kind == "power") return NonlinearitySpec::power(cfg.number("nonlinearity.alpha", 2.0), dim);
  if (kind == "combined") {
    return NonlinearitySpec::combined(cfg.number("nonlinearity.alpha1", 1.0), cfg.number("nonlinearity.alpha2", 2.0), dim);
  }
  if (kind == "gross_pitaevskii") return NonlinearitySpec::gross_pitaevskii(dim);
  auto s = cfg.numbers("nonlinearity.table_s");
  auto g = cfg.numbers("nonlinearity.table_g");
  if (s.empty() || s.size() != g.size()) {
    throw SolverError(ErrorKind::ConfigError,
                      cfg.locate("nonlinearity.table_s") + ": table_s and table_g must be nonempty and equally long");
  }
  return NonlinearitySpec::tabulated(std::move(s), std::move(g), cfg.number("nonlinearity.alpha1", 1.0),
                                     cfg.number("nonlinearity.alpha2", 1.0), dim);
}

Grid1D build_grid(const ExperimentConfig& cfg) {
  if (cfg.has("grid.L") && cfg.has("grid.L_over_pi")) {
    throw SolverError(ErrorKind::ConfigError, cfg.locate("grid.L") + ": give either L or L_over_pi");
  }
  const double L = cfg.has("grid.L") ? cfg.number("grid.L", 0.0)
                                     : std::numbers::pi * cfg.number("grid.L_over_pi", 80.0);
  const auto N = cfg.integer("grid.N", 4096);
  if (!(L > 0.0) || N < 8) throw SolverError(ErrorKind::ConfigError, cfg.locate("grid") + ": need L > 0 and N >= 8");
  return Grid1D(L, static_cast<std::size_t>(N));
}

TrainSpec build_train(const ExperimentConfig& cfg, const NonlinearitySpec& spec) {
  if (!cfg.has("train") && cfg.has("generator")) {
    const auto base = make_bound_state(spec, 1.0, "closed_form", cfg);
    return make_truncated_train(spec, build_generator(cfg), static_cast<int>(cfg.integer("generator.J", 6)), base);
  }
  TrainSpec train(spec);
  std::map<std::pair<double, std::string>, std::shared_ptr<const BoundStateProfile>> cache;
  const auto profile_for = [&](double omega, const std::string& method) {
    auto& slot = cache[{omega, method}];
    if (!slot) slot = make_bound_state(spec, omega, method, cfg);
    return slot;
  };

  const bool shorthand = cfg.has("train.v_star");
  if (shorthand && cfg.has("train.solitons")) {
    throw SolverError(ErrorKind::ConfigError, cfg.locate("train.v_star") + ": give either v_star or solitons");
  }
  if (shorthand) {
    const double vs = cfg.number("train.v_star", 0.0);
    const double omega = cfg.number("train.omega", 1.0);
    const double sep = cfg.number("train.separation", 0.0);
    for (int s : {-1, 1}) {
      SolitonParams p;
      p.omega = omega;
      p.v = 0.5 * s * vs;
      p.x0 = 0.5 * s * sep;
      p.profile = profile_for(omega, "auto");
      train.solitons.push_back(p);
    }
  } else if (const json* list = cfg.find("train.solitons")) {
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string base = "train.solitons[" + std::to_string(i) + "]";
      SolitonParams p;
      p.omega = cfg.number(base + ".omega", 1.0);
      p.v = cfg.number(base + ".v", 0.0);
      p.x0 = cfg.number(base + ".x0", 0.0);
      p.gamma = cfg.number(base + ".gamma", 0.0);
      p.profile = profile_for(p.omega, cfg.string(base + ".profile", "auto"));
      train.solitons.push_back(p);
    }
  }

  std::shared_ptr<const KinkProfile> kink;
  double omega1 = 0.0;
  for (const char* side : {"left_kink", "right_kink"}) {
    const std::string base = std::string("train.") + side;
    if (!cfg.has(base)) continue;
    KinkParams k;
    k.side = std::string(side) == "left_kink" ? KinkSide::Left : KinkSide::Right;
    k.v = cfg.number(base + ".v", 0.0);
    k.x0 = cfg.number(base + ".x0", 0.0);
    k.gamma = cfg.number(base + ".gamma", 0.0);
    const bool gp = spec.kind() == NonlinearityKind::GrossPitaevskii ||
                    cfg.string(base + ".profile", "auto") == "gross_pitaevskii";
    if (!gp) {
      const double w = cfg.has(base + ".omega") ? cfg.number(base + ".omega", 0.0) : find_kink_frequency(spec).omega1;
      if (!kink || w != omega1) {
        omega1 = w;
        kink = std::make_shared<const KinkProfile>(kink_profile(spec, w));
      }
      k.profile = kink;
      k.omega = w;
    }
    (k.side == KinkSide::Left ? train.left_kink : train.right_kink) = k;
  }
  if (train.component_count() == 0) {
    throw SolverError(ErrorKind::ConfigError, cfg.locate("train") + ": the train has no components");
  }
  return train;
}

JobResult run_job(const std::string& job_name, const ExperimentConfig& config, const JobOptions& options) {
  JobResult result;
  const std::string job = job_name.empty() ? config.string("job", "") : job_name;
  fs::path dir = options.out_dir;
  if (dir.empty()) dir = config.string("output", "out");
  Output out(dir);
  Context c{config, options, out};
  json error = nullptr;
  try {
    if (job == "profile") {
      job_profile(c);
    } else if (job == "assemble") {
      job_assemble(c);
    } else if (job == "evolve") {
      job_evolve(c);
    } else if (job == "glue") {
      job_glue(c);
    } else if (job == "sweep") {
      job_sweep(c);
    } else if (job == "check") {
      job_check(c);
    } else {
      throw SolverError(ErrorKind::ConfigError, "unknown job '" + job + "'");
    }
  } catch (const SolverError& e) {
    result.exit_code = exit_code_for(e.kind());
    result.message = e.what();
    error = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
  } catch (const std::exception& e) {
    result.exit_code = 1;
    result.message = e.what();
    error = {{"kind", "RuntimeError"}, {"message", e.what()}};
  }
  result.summary = c.summary;

  ExperimentConfig echoed = config;
  echoed.data["job"] = job;
  write_json(out.dir() / "config.json", echoed.data);
  json manifest = {{"tool", "solitonforge"},
                   {"version", kVersion},
                   {"job", job},
                   {"status", result.exit_code == 0 ? "ok" : "error"},
                   {"exit_code", result.exit_code},
                   {"phase_convention", {{"flag", "quarter_v_squared"}, {"soliton", kPhaseConvention}}},
                   {"equation", "i u_t + u_xx = -g(|u|^2) u"},
                   {"seed", config.integer("seed", 0)},
                   {"config", config.data},
                   {"config_file", "config.json"},
                   {"rerun", "solitonforge " + job + " --config config.json --out ."},
                   {"files", out.files()},
                   {"summary", c.summary},
                   {"error", error}};
  for (const auto& [k, v] : c.manifest_extra.items()) manifest[k] = v;
  try {
    write_json(out.dir() / "manifest.json", manifest);
  } catch (const SolverError& e) {
    if (result.exit_code == 0) {
      result.exit_code = 1;
      result.message = e.what();
    }
  }
  return result;
}

}  // namespace solitonforge
