#include <cmath>
#include <random>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "solitonforge/errors.hpp"
#include "solitonforge/nonlinearity.hpp"

using namespace solitonforge;

namespace {

// 50-digit reference, wide enough that f(z + w) - f(z) keeps full precision for |w| >= 1e-12 |z|.
using Big = boost::multiprecision::cpp_bin_float_50;

Big f_re_ref(const NonlinearitySpec& spec, const Big& x, const Big& y) {
  const Big s = x * x + y * y;
  Big g;
  if (spec.is_power()) {
    g = pow(s, Big(0.5 * spec.alpha()));
  } else {
    g = pow(s, Big(spec.alpha1())) - pow(s, Big(spec.alpha2()));
  }
  return g * x;
}

}  // namespace

TEST(Nonlinearity, PowerAndCombinedValues) {
  const auto cubic = NonlinearitySpec::power(2.0);
  EXPECT_DOUBLE_EQ(cubic.g(3.0), 3.0);
  EXPECT_DOUBLE_EQ(cubic.dg(3.0), 1.0);
  EXPECT_DOUBLE_EQ(cubic.d2g(3.0), 0.0);
  const auto cq = NonlinearitySpec::combined(1.0, 2.0);
  EXPECT_DOUBLE_EQ(cq.g(0.5), 0.25);
  EXPECT_DOUBLE_EQ(cq.dg(0.5), 0.0);
  EXPECT_DOUBLE_EQ(cq.d2g(0.5), -2.0);
  const auto gp = NonlinearitySpec::gross_pitaevskii();
  EXPECT_DOUBLE_EQ(gp.g(0.0), 1.0);
  EXPECT_TRUE(gp.profile_evolution_only());
  EXPECT_FALSE(cq.profile_evolution_only());
}

TEST(Nonlinearity, LebesgueExponent) {
  EXPECT_DOUBLE_EQ(NonlinearitySpec::power(2.0).lebesgue_exponent(), 4.0);
  EXPECT_DOUBLE_EQ(NonlinearitySpec::power(4.0).lebesgue_exponent(), 6.0);
  EXPECT_DOUBLE_EQ(NonlinearitySpec::combined(1.0, 2.0).lebesgue_exponent(), 6.0);
}

TEST(Nonlinearity, RejectsExponentsOutsideWindow) {
  EXPECT_THROW(NonlinearitySpec::power(-1.0), SolverError);
  EXPECT_THROW(NonlinearitySpec::power(4.0, 3), SolverError);  // alpha_max = 4 in d = 3
  EXPECT_THROW(NonlinearitySpec::combined(2.0, 1.0), SolverError);
  EXPECT_NO_THROW(NonlinearitySpec::power(3.9, 3));
}

TEST(Nonlinearity, PrimitivesMatchQuadratureOracle) {
  // Simpson's rule as an independent oracle for G, after s = u^4 removes the
  // fractional-power singularity at the origin.
  for (const auto& spec : {NonlinearitySpec::power(2.0), NonlinearitySpec::power(3.0),
                           NonlinearitySpec::combined(0.75, 1.5)}) {
    const double s = 1.7;
    const double top = std::pow(s, 0.25);
    const int n = 20000;
    const auto h = [&](double u) { return spec.g(u * u * u * u) * 4.0 * u * u * u; };
    double acc = h(0.0) + h(top);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * h(top * i / n);
    EXPECT_NEAR(primitive_G(spec, s), acc * top / (3.0 * n), 1e-10);
    // F(phi) = G(phi^2) / 2.
    EXPECT_NEAR(primitive_F(spec, std::sqrt(s)), 0.5 * primitive_G(spec, s), 1e-13);
  }
}

TEST(Nonlinearity, IncrementsAreCancellationFree) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mag(-12.0, 1.0), phase(0.0, 6.283185307179586);
  for (const auto& spec : {NonlinearitySpec::power(2.0), NonlinearitySpec::power(3.0),
                           NonlinearitySpec::combined(1.0, 2.0), NonlinearitySpec::combined(0.5, 1.25)}) {
    for (int trial = 0; trial < 200; ++trial) {
      const cplx z = std::polar(std::pow(10.0, 0.1 * mag(rng)), phase(rng));
      const cplx w = std::polar(std::pow(10.0, mag(rng)), phase(rng));
      const cplx inc = eval_f_increment(spec, z, w);
      const double ref = static_cast<double>(f_re_ref(spec, Big(z.real()) + w.real(), Big(z.imag()) + w.imag()) -
                                             f_re_ref(spec, Big(z.real()), Big(z.imag())));
      // Relative to |w| times the local Lipschitz scale.
      const double scale = std::abs(w) * (1.0 + std::abs(spec.g(std::norm(z))) + std::norm(z) * std::abs(spec.dg(std::norm(z))));
      EXPECT_NEAR(inc.real(), ref, 1e-12 * scale) << "z=" << z << " w=" << w;
    }
  }
}

TEST(Nonlinearity, GIncrementSmallStep) {
  const auto spec = NonlinearitySpec::combined(1.0, 2.0);
  const double s = 0.3, ds = 1e-14;
  // g(s + ds) - g(s) ~ g'(s) ds
  EXPECT_NEAR(g_increment(spec, s, ds), spec.dg(s) * ds, 1e-27);
}

TEST(Nonlinearity, InteractionTermMatchesDefinition) {
  const auto spec = NonlinearitySpec::combined(1.0, 2.0);
  const std::vector<cplx> parts = {{0.3, 0.1}, {-0.2, 0.4}, {0.05, -0.07}};
  cplx sum = 0.0, fsum = 0.0;
  for (auto p : parts) {
    sum += p;
    fsum += eval_f(spec, p);
  }
  const cplx direct = eval_f(spec, sum) - fsum;
  EXPECT_NEAR(std::abs(interaction_term(spec, parts) - direct), 0.0, 1e-15);
  // A single component has no interaction.
  EXPECT_EQ(interaction_term(spec, std::span(parts).first(1)), cplx(0.0));
}

TEST(Nonlinearity, WirtingerMatchesFiniteDifferences) {
  for (const auto& spec : {NonlinearitySpec::power(2.0), NonlinearitySpec::combined(1.0, 2.0),
                           NonlinearitySpec::power(3.0)}) {
    const cplx z(0.4, -0.3);
    const double h = 1e-6;
    const cplx dfx = (eval_f(spec, z + h) - eval_f(spec, z - h)) / (2 * h);
    const cplx dfy = (eval_f(spec, z + cplx(0, h)) - eval_f(spec, z - cplx(0, h))) / (2 * h);
    const auto w = eval_wirtinger(spec, z);
    EXPECT_NEAR(std::abs(w.f_z - 0.5 * (dfx - cplx(0, 1) * dfy)), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(w.f_zbar - 0.5 * (dfx + cplx(0, 1) * dfy)), 0.0, 1e-8);
  }
}

TEST(Nonlinearity, WirtingerFlagsSingularOrigin) {
  const auto spec = NonlinearitySpec::power(1.0);  // g = s^(1/2), g' singular at 0
  EXPECT_TRUE(spec.derivative_singular_at_zero());
  const auto w = eval_wirtinger(spec, 0.0);
  EXPECT_TRUE(w.singular_at_zero);
  EXPECT_TRUE(std::isfinite(w.f_z.real()));
}

TEST(Nonlinearity, TabulatedReproducesPower) {
  std::vector<double> s, g;
  for (int i = 0; i <= 400; ++i) {
    s.push_back(0.01 * i);
    g.push_back(0.01 * i);
  }
  const auto spec = NonlinearitySpec::tabulated(s, g, 1.0, 1.0);
  EXPECT_NEAR(spec.g(1.2345), 1.2345, 1e-10);
  EXPECT_NEAR(spec.dg(1.2345), 1.0, 1e-6);
}

TEST(GrowthBounds, CubicConstantIsOneHalf) {
  const auto r = check_growth_bounds(NonlinearitySpec::power(2.0), LogSampleRange{});
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.constant, 0.5, 1e-12);
}

TEST(GrowthBounds, CombinedPassesAndLimitIsEnforced) {
  const auto spec = NonlinearitySpec::combined(1.0, 2.0);
  const auto r = check_growth_bounds(spec, LogSampleRange{}, 0.1);
  EXPECT_TRUE(r.pass) << r.message;
  ASSERT_TRUE(r.focusing_s0.has_value());
  EXPECT_GT(primitive_G(spec, *r.focusing_s0), 0.1 * *r.focusing_s0);
  const auto tight = check_growth_bounds(spec, LogSampleRange{}, std::nullopt, 0.5 * r.constant);
  EXPECT_FALSE(tight.pass);
  EXPECT_FALSE(tight.violating_samples.empty());
}

TEST(GrowthBounds, GrossPitaevskiiFailsAtOrigin) {
  const auto r = check_growth_bounds(NonlinearitySpec::gross_pitaevskii(), LogSampleRange{});
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.g_zero_at_origin);
}

TEST(GrowthBounds, DefocusingHasNoFocusingPoint) {
  // g = s - s^2 with omega0 large: G(s) = s^2/2 - s^3/3 < omega0 s everywhere.
  const auto r = check_growth_bounds(NonlinearitySpec::combined(1.0, 2.0), LogSampleRange{}, 10.0);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.focusing_s0.has_value());
}
