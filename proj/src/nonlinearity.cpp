#include "solitonforge/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/interpolators/makima.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "solitonforge/errors.hpp"

namespace solitonforge {

namespace {

constexpr double kQuadratureTolerance = 1e-10;

double integrate_adaptive(const std::function<double(double)>& integrand, double a, double b) {
  if (a == b) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, a, b, 15, kQuadratureTolerance, &error, &l1);
  const double scale = std::max(l1, std::numeric_limits<double>::min());
  if (!std::isfinite(value) || error > 10.0 * kQuadratureTolerance * scale) {
    std::ostringstream msg;
    msg << "adaptive quadrature on [" << a << ", " << b << "] reached relative error "
        << error / scale << " (requested " << kQuadratureTolerance << ")";
    throw SolverError(ErrorKind::QuadratureFailure, msg.str());
  }
  return value;
}

double central_difference(const std::function<double(double)>& fn, double s) {
  const double h = 1e-5 * std::max(std::abs(s), 1e-3);
  if (s - h < 0.0) return (fn(s + h) - fn(s)) / h;
  return (fn(s + h) - fn(s - h)) / (2.0 * h);
}

void check_dim(int dim) {
  if (dim < 1) throw SolverError(ErrorKind::InvalidArgument, "dimension must be >= 1");
}

double alpha_max_for(int dim) {
  if (dim <= 2) return std::numeric_limits<double>::infinity();
  return 4.0 / (dim - 2);
}

void check_exponent_window(double a1, double a2, int dim) {
  const double half_max = alpha_max_for(dim) / 2.0;
  if (!(a1 > 0.0) || !(a1 <= a2) || !(a2 < half_max)) {
    std::ostringstream msg;
    msg << "exponents must satisfy 0 < alpha1 <= alpha2 < alpha_max/2 = " << half_max
        << " (got " << a1 << ", " << a2 << ")";
    throw SolverError(ErrorKind::InvalidArgument, msg.str());
  }
}

// s^p with the integer and square-root cases kept exact and fast.
double spow(double s, double p) {
  if (p == 1.0) return s;
  if (p == 2.0) return s * s;
  if (p == 0.5) return std::sqrt(s);
  return std::pow(s, p);
}

// (s + ds)^p - s^p.
double spow_increment(double s, double ds, double p) {
  if (ds < -s) ds = -s;
  if (p == 1.0) return ds;
  if (p == 2.0) return ds * (2.0 * s + ds);
  if (s == 0.0) return spow(ds, p);
  return spow(s, p) * std::expm1(p * std::log1p(ds / s));
}

}  // namespace

std::string to_string(NonlinearityKind kind) {
  switch (kind) {
    case NonlinearityKind::Power: return "power";
    case NonlinearityKind::Combined: return "combined";
    case NonlinearityKind::GrossPitaevskii: return "gross_pitaevskii";
    case NonlinearityKind::Custom: return "custom";
  }
  return "unknown";
}

NonlinearitySpec NonlinearitySpec::power(double alpha, int dim) {
  check_dim(dim);
  if (!(alpha > 0.0) || !(alpha < alpha_max_for(dim))) {
    std::ostringstream msg;
    msg << "power exponent must satisfy 0 < alpha < alpha_max (got " << alpha << ")";
    throw SolverError(ErrorKind::InvalidArgument, msg.str());
  }
  NonlinearitySpec spec;
  spec.kind_ = NonlinearityKind::Power;
  spec.dim_ = dim;
  spec.alpha_ = alpha;
  spec.alpha1_ = spec.alpha2_ = alpha / 2.0;
  return spec;
}

NonlinearitySpec NonlinearitySpec::combined(double alpha1, double alpha2, int dim) {
  check_dim(dim);
  check_exponent_window(alpha1, alpha2, dim);
  NonlinearitySpec spec;
  spec.kind_ = NonlinearityKind::Combined;
  spec.dim_ = dim;
  spec.alpha1_ = alpha1;
  spec.alpha2_ = alpha2;
  return spec;
}

NonlinearitySpec NonlinearitySpec::gross_pitaevskii(int dim) {
  check_dim(dim);
  NonlinearitySpec spec;
  spec.kind_ = NonlinearityKind::GrossPitaevskii;
  spec.dim_ = dim;
  spec.alpha1_ = spec.alpha2_ = 1.0;
  return spec;
}

NonlinearitySpec NonlinearitySpec::custom(CustomNonlinearity g, double alpha1, double alpha2,
                                          int dim) {
  check_dim(dim);
  check_exponent_window(alpha1, alpha2, dim);
  if (!g.g) throw SolverError(ErrorKind::InvalidArgument, "custom nonlinearity needs g");
  NonlinearitySpec spec;
  spec.kind_ = NonlinearityKind::Custom;
  spec.dim_ = dim;
  spec.alpha1_ = alpha1;
  spec.alpha2_ = alpha2;
  spec.custom_ = std::make_shared<const CustomNonlinearity>(std::move(g));
  return spec;
}

NonlinearitySpec NonlinearitySpec::tabulated(std::vector<double> s, std::vector<double> g,
                                             double alpha1, double alpha2, int dim) {
  if (s.size() != g.size() || s.size() < 4) {
    throw SolverError(ErrorKind::InvalidArgument, "tabulated g needs >= 4 (s, g) pairs");
  }
  if (s.front() != 0.0) {
    throw SolverError(ErrorKind::InvalidArgument, "tabulated g must start at s = 0");
  }
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i] > s[i - 1])) {
      throw SolverError(ErrorKind::InvalidArgument, "tabulated s must be strictly increasing");
    }
  }
  using Spline = boost::math::interpolators::makima<std::vector<double>>;
  auto spline = std::make_shared<Spline>(std::vector<double>(s), std::vector<double>(g));
  const double s_last = s.back();
  const double g_last = g.back();
  const double slope_last = spline->prime(s_last);

  CustomNonlinearity data;
  data.label = "tabulated";
  data.g = [spline, s_last, g_last, slope_last](double x) {
    if (x >= s_last) return g_last + slope_last * (x - s_last);
    return (*spline)(x);
  };
  data.dg = [spline, s_last, slope_last](double x) {
    if (x >= s_last) return slope_last;
    return spline->prime(x);
  };
  data.table_s = std::move(s);
  data.table_g = std::move(g);
  return custom(std::move(data), alpha1, alpha2, dim);
}

double NonlinearitySpec::alpha_max() const noexcept { return alpha_max_for(dim_); }

double NonlinearitySpec::alpha() const {
  if (kind_ != NonlinearityKind::Power) {
    throw SolverError(ErrorKind::InvalidArgument, "alpha() is defined for power nonlinearities");
  }
  return alpha_;
}

double NonlinearitySpec::lebesgue_exponent() const noexcept {
  switch (kind_) {
    case NonlinearityKind::Power: return alpha_ + 2.0;
    case NonlinearityKind::GrossPitaevskii: return 4.0;
    default: return 2.0 * alpha2_ + 2.0;
  }
}

bool NonlinearitySpec::derivative_singular_at_zero() const noexcept {
  switch (kind_) {
    case NonlinearityKind::Power: return alpha_ < 2.0;
    case NonlinearityKind::Combined: return alpha1_ < 1.0;
    case NonlinearityKind::GrossPitaevskii: return false;
    case NonlinearityKind::Custom: return !std::isfinite(dg(0.0));
  }
  return false;
}

double NonlinearitySpec::g(double s) const {
  switch (kind_) {
    case NonlinearityKind::Power: return spow(s, 0.5 * alpha_);
    case NonlinearityKind::Combined: return spow(s, alpha1_) - spow(s, alpha2_);
    case NonlinearityKind::GrossPitaevskii: return 1.0 - s;
    case NonlinearityKind::Custom: return custom_->g(s);
  }
  return 0.0;
}

double NonlinearitySpec::dg(double s) const {
  switch (kind_) {
    case NonlinearityKind::Power: {
      const double a = 0.5 * alpha_;
      return a * std::pow(s, a - 1.0);
    }
    case NonlinearityKind::Combined:
      return alpha1_ * std::pow(s, alpha1_ - 1.0) - alpha2_ * std::pow(s, alpha2_ - 1.0);
    case NonlinearityKind::GrossPitaevskii: return -1.0;
    case NonlinearityKind::Custom:
      return custom_->dg ? custom_->dg(s) : central_difference(custom_->g, s);
  }
  return 0.0;
}

double NonlinearitySpec::d2g(double s) const {
  switch (kind_) {
    case NonlinearityKind::Power: {
      const double a = 0.5 * alpha_;
      return a * (a - 1.0) * std::pow(s, a - 2.0);
    }
    case NonlinearityKind::Combined:
      return alpha1_ * (alpha1_ - 1.0) * std::pow(s, alpha1_ - 2.0) -
             alpha2_ * (alpha2_ - 1.0) * std::pow(s, alpha2_ - 2.0);
    case NonlinearityKind::GrossPitaevskii: return 0.0;
    case NonlinearityKind::Custom: {
      if (custom_->d2g) return custom_->d2g(s);
      const auto first = [this](double x) { return dg(x); };
      return central_difference(first, s);
    }
  }
  return 0.0;
}

cplx eval_f(const NonlinearitySpec& spec, cplx z) { return spec.g(std::norm(z)) * z; }

double eval_f_real(const NonlinearitySpec& spec, double phi) { return spec.g(phi * phi) * phi; }

double eval_df_real(const NonlinearitySpec& spec, double phi) {
  const double a = std::abs(phi);
  switch (spec.kind()) {
    case NonlinearityKind::Power: return (spec.alpha() + 1.0) * std::pow(a, spec.alpha());
    case NonlinearityKind::Combined: {
      const double a1 = spec.alpha1(), a2 = spec.alpha2();
      return (2.0 * a1 + 1.0) * std::pow(a, 2.0 * a1) - (2.0 * a2 + 1.0) * std::pow(a, 2.0 * a2);
    }
    case NonlinearityKind::GrossPitaevskii: return 1.0 - 3.0 * phi * phi;
    case NonlinearityKind::Custom: {
      const double s = phi * phi;
      if (s == 0.0) return spec.g(0.0);
      return spec.g(s) + 2.0 * s * spec.dg(s);
    }
  }
  return 0.0;
}

double primitive_G(const NonlinearitySpec& spec, double s) {
  if (s < 0.0) throw SolverError(ErrorKind::InvalidArgument, "G(s) requires s >= 0");
  switch (spec.kind()) {
    case NonlinearityKind::Power: {
      const double a = 0.5 * spec.alpha() + 1.0;
      return std::pow(s, a) / a;
    }
    case NonlinearityKind::Combined: {
      const double b1 = spec.alpha1() + 1.0, b2 = spec.alpha2() + 1.0;
      return std::pow(s, b1) / b1 - std::pow(s, b2) / b2;
    }
    case NonlinearityKind::GrossPitaevskii: return s - 0.5 * s * s;
    case NonlinearityKind::Custom:
      return integrate_adaptive([&spec](double x) { return spec.g(x); }, 0.0, s);
  }
  return 0.0;
}

double primitive_F(const NonlinearitySpec& spec, double phi) {
  const double a = std::abs(phi);
  switch (spec.kind()) {
    case NonlinearityKind::Power: {
      const double p = spec.alpha() + 2.0;
      return std::pow(a, p) / p;
    }
    case NonlinearityKind::Combined: {
      const double p1 = 2.0 * spec.alpha1() + 2.0, p2 = 2.0 * spec.alpha2() + 2.0;
      return std::pow(a, p1) / p1 - std::pow(a, p2) / p2;
    }
    case NonlinearityKind::GrossPitaevskii: return 0.5 * a * a - 0.25 * a * a * a * a;
    case NonlinearityKind::Custom:
      return integrate_adaptive([&spec](double x) { return eval_f_real(spec, x); }, 0.0, a);
  }
  return 0.0;
}

Primitives eval_primitives(const NonlinearitySpec& spec, double s) {
  if (s < 0.0) throw SolverError(ErrorKind::InvalidArgument, "primitives require s >= 0");
  return Primitives{spec.g(s), primitive_F(spec, s), primitive_G(spec, s)};
}

Wirtinger eval_wirtinger(const NonlinearitySpec& spec, cplx z) {
  const double s = std::norm(z);
  if (s == 0.0) {
    Wirtinger w;
    w.f_z = spec.g(0.0);
    w.f_zbar = 0.0;
    w.singular_at_zero = spec.derivative_singular_at_zero();
    return w;
  }
  Wirtinger w;
  if (spec.kind() == NonlinearityKind::Power) {
    // s g'(s) = (alpha/2) s^(alpha/2), kept finite for small s.
    const double a = 0.5 * spec.alpha();
    const double sg = a * std::pow(s, a);
    w.f_z = sg + spec.g(s);
    w.f_zbar = sg * (z * z / s);
  } else {
    const double dg = spec.dg(s);
    w.f_z = dg * s + spec.g(s);
    w.f_zbar = dg * z * z;
  }
  return w;
}

std::vector<double> LogSampleRange::samples() const {
  if (!(s_min > 0.0) || !(s_max > s_min) || points < 2) {
    throw SolverError(ErrorKind::InvalidArgument, "invalid logarithmic sample range");
  }
  std::vector<double> out(static_cast<std::size_t>(points));
  const double l0 = std::log(s_min), l1 = std::log(s_max);
  for (int i = 0; i < points; ++i) {
    out[static_cast<std::size_t>(i)] = std::exp(l0 + (l1 - l0) * i / (points - 1));
  }
  return out;
}

GrowthBoundReport check_growth_bounds(const NonlinearitySpec& spec, const LogSampleRange& range,
                                      std::optional<double> omega0,
                                      std::optional<double> constant_limit) {
  GrowthBoundReport report;
  report.range = range;
  report.omega0 = omega0;
  report.g_zero_at_origin = std::abs(spec.g(0.0)) < 1e-14;
  const double a1 = spec.alpha1(), a2 = spec.alpha2();
  report.exponent_window_ok = a1 > 0.0 && a1 <= a2 && a2 < spec.alpha_max() / 2.0;

  const auto samples = range.samples();
  bool finite = true;
  for (double s : samples) {
    const double lhs = std::abs(s * spec.dg(s)) + std::abs(s * s * spec.d2g(s));
    const double rhs = std::pow(s, a1) + std::pow(s, a2);
    const double ratio = lhs / rhs;
    if (!std::isfinite(ratio)) {
      finite = false;
      report.violating_samples.push_back(s);
      continue;
    }
    report.constant = std::max(report.constant, ratio);
    if (constant_limit && ratio > *constant_limit) report.violating_samples.push_back(s);
  }

  if (omega0) {
    for (double s : samples) {
      if (primitive_G(spec, s) > *omega0 * s) {
        report.focusing_s0 = s;
        break;
      }
    }
  }

  std::ostringstream msg;
  if (!report.g_zero_at_origin) msg << "g(0) = " << spec.g(0.0) << " != 0; ";
  if (!report.exponent_window_ok) msg << "exponents outside 0 < a1 <= a2 < alpha_max/2; ";
  if (!finite) msg << "non-finite growth ratio at " << report.violating_samples.size() << " samples; ";
  if (constant_limit && !report.violating_samples.empty() && finite) {
    msg << report.violating_samples.size() << " samples exceed C = " << *constant_limit << "; ";
  }
  if (omega0 && !report.focusing_s0) msg << "no s0 with G(s0) > omega0 s0 on the grid; ";
  report.pass = report.g_zero_at_origin && report.exponent_window_ok &&
                report.violating_samples.empty() && (!omega0 || report.focusing_s0.has_value());
  report.message = report.pass ? "ok" : msg.str();
  return report;
}

double g_increment(const NonlinearitySpec& spec, double s, double ds) {
  switch (spec.kind()) {
    case NonlinearityKind::Power: return spow_increment(s, ds, 0.5 * spec.alpha());
    case NonlinearityKind::Combined:
      return spow_increment(s, ds, spec.alpha1()) - spow_increment(s, ds, spec.alpha2());
    case NonlinearityKind::GrossPitaevskii: return -ds;
    case NonlinearityKind::Custom: return spec.g(std::max(s + ds, 0.0)) - spec.g(s);
  }
  return 0.0;
}

cplx eval_f_increment(const NonlinearitySpec& spec, cplx z, cplx w) {
  const double s = std::norm(z);
  const double ds = std::norm(w) + 2.0 * (z.real() * w.real() + z.imag() * w.imag());
  return spec.g(std::max(s + ds, 0.0)) * w + g_increment(spec, s, ds) * z;
}

cplx interaction_term(const NonlinearitySpec& spec, std::span<const cplx> parts) {
  const std::size_t n = parts.size();
  if (n < 2) return 0.0;
  cplx out = 0.0;
  cplx prefix = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cplx others = prefix;
    for (std::size_t k = j + 1; k < n; ++k) others += parts[k];
    const cplx r = parts[j];
    const double s = std::norm(r);
    const double ds = std::norm(others) + 2.0 * (r.real() * others.real() + r.imag() * others.imag());
    out += g_increment(spec, s, ds) * r;
    prefix += r;
  }
  return out;
}

}  // namespace solitonforge
