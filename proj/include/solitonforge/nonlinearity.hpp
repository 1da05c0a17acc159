#pragma once

// Nonlinearities of the form f(u) = g(|u|^2) u.

#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace solitonforge {

using cplx = std::complex<double>;

enum class NonlinearityKind { Power, Combined, GrossPitaevskii, Custom };

std::string to_string(NonlinearityKind kind);

/// User-supplied g with its first two derivatives. `dg`/`d2g` may be left
/// empty, in which case central differences of `g` are used.
struct CustomNonlinearity {
  std::function<double(double)> g;
  std::function<double(double)> dg;
  std::function<double(double)> d2g;
  std::string label = "custom";
  // Tabulated source, kept so the spec can be serialized again.
  std::vector<double> table_s;
  std::vector<double> table_g;
};

/// Immutable description of g.
///
/// Conventions:
///   power(a)          g(s) = s^(a/2)          so f(u) = |u|^a u
///   combined(a1, a2)  g(s) = s^a1 - s^a2
///   gross_pitaevskii  g(s) = 1 - s           (profile/evolution experiments only)
///   custom            g from a callable or a table, with declared exponents a1 <= a2
class NonlinearitySpec {
 public:
  static NonlinearitySpec power(double alpha, int dim = 1);
  static NonlinearitySpec combined(double alpha1, double alpha2, int dim = 1);
  static NonlinearitySpec gross_pitaevskii(int dim = 1);
  static NonlinearitySpec custom(CustomNonlinearity g, double alpha1, double alpha2, int dim = 1);
  /// Tabulated g on increasing s >= 0, interpolated by a modified Akima spline.
  static NonlinearitySpec tabulated(std::vector<double> s, std::vector<double> g, double alpha1,
                                    double alpha2, int dim = 1);

  NonlinearityKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  /// +inf for d = 1, 2 and 4/(d-2) otherwise.
  double alpha_max() const noexcept;

  /// Power exponent alpha (power kind only).
  double alpha() const;
  /// Exponents of the growth bounds. For power(a) both equal a/2.
  double alpha1() const noexcept { return alpha1_; }
  double alpha2() const noexcept { return alpha2_; }

  bool is_power() const noexcept { return kind_ == NonlinearityKind::Power; }
  /// True when g(0) != 0; such a spec may be used to build profiles and
  /// evolve fields but not in the gluing theory.
  bool profile_evolution_only() const noexcept { return kind_ == NonlinearityKind::GrossPitaevskii; }
  /// Exponent p of the Lebesgue norm used by the fixed-point diagnostics:
  /// alpha + 2 for power, 2*alpha2 + 2 for combined/custom, 4 for GP.
  double lebesgue_exponent() const noexcept;
  /// g'(s) blows up as s -> 0.
  bool derivative_singular_at_zero() const noexcept;

  double g(double s) const;
  double dg(double s) const;
  double d2g(double s) const;

  const CustomNonlinearity* custom_data() const noexcept { return custom_.get(); }

 private:
  NonlinearitySpec() = default;

  NonlinearityKind kind_ = NonlinearityKind::Power;
  int dim_ = 1;
  double alpha_ = 2.0;
  double alpha1_ = 1.0;
  double alpha2_ = 1.0;
  std::shared_ptr<const CustomNonlinearity> custom_;
};

/// f(z) = g(|z|^2) z.
cplx eval_f(const NonlinearitySpec& spec, cplx z);
/// f restricted to real arguments.
double eval_f_real(const NonlinearitySpec& spec, double phi);
/// d/dphi f(phi) for real phi.
double eval_df_real(const NonlinearitySpec& spec, double phi);

/// g(s + ds) - g(s), evaluated without cancellation for small ds.
double g_increment(const NonlinearitySpec& spec, double s, double ds);
/// f(z + w) - f(z), proportional to w even when |w| << |z|.
cplx eval_f_increment(const NonlinearitySpec& spec, cplx z, cplx w);
/// f(sum_j z_j) - sum_j f(z_j) = sum_j [g(|sum|^2) - g(|z_j|^2)] z_j.
cplx interaction_term(const NonlinearitySpec& spec, std::span<const cplx> parts);

/// G(s) = int_0^s g. Closed form except for custom kinds (adaptive quadrature).
double primitive_G(const NonlinearitySpec& spec, double s);
/// F(phi) = int_0^phi f. Closed form except for custom kinds.
double primitive_F(const NonlinearitySpec& spec, double phi);

struct Primitives {
  double g;
  double F;  // F evaluated at phi = s
  double G;
};

Primitives eval_primitives(const NonlinearitySpec& spec, double s);

struct Wirtinger {
  cplx f_z;
  cplx f_zbar;
  // Set when z = 0 was requested and g' is singular there; the values are the
  // continuous limits.
  bool singular_at_zero = false;
};

/// f_z = g'(|z|^2)|z|^2 + g(|z|^2),  f_zbar = g'(|z|^2) z^2.
Wirtinger eval_wirtinger(const NonlinearitySpec& spec, cplx z);

struct LogSampleRange {
  double s_min = 1e-8;
  double s_max = 1e4;
  int points = 241;

  std::vector<double> samples() const;
};

struct GrowthBoundReport {
  bool pass = false;
  double constant = 0.0;  // smallest C over the sample grid
  bool g_zero_at_origin = false;
  bool exponent_window_ok = false;
  std::vector<double> violating_samples;
  LogSampleRange range;
  // Focusing scan, present when omega0 was supplied.
  std::optional<double> omega0;
  std::optional<double> focusing_s0;  // first sample with G(s) > omega0 s
  std::string message;
};

/// Samples |s g'(s)| + |s^2 g''(s)| / (s^a1 + s^a2) over `range` and reports
/// the largest ratio. When `constant_limit` is given, samples whose ratio
/// exceeds it are listed as violations. When `omega0` is given, also scans for
/// s0 with G(s0) > omega0 s0.
GrowthBoundReport check_growth_bounds(const NonlinearitySpec& spec, const LogSampleRange& range,
                                      std::optional<double> omega0 = std::nullopt,
                                      std::optional<double> constant_limit = std::nullopt);

}  // namespace solitonforge
