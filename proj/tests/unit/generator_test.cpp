#include "fuzzyloss/generator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"

namespace fuzzyloss {
namespace {

std::vector<GeneratorSpec> shipped_specs() {
  std::vector<GeneratorSpec> out{GeneratorSpec::lukasiewicz(), GeneratorSpec::product()};
  for (double l : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) out.push_back(GeneratorSpec::schweizer_sklar(l));
  for (double l : {0.5, 1.0, 2.0, 5.0, 10.0, kInfinity}) out.push_back(GeneratorSpec::frank(l));
  return out;
}

TEST(GeneratorTest, ProductAtHalf) {
  EXPECT_NEAR(g_eval(GeneratorSpec::product(), 0.5).value.value(), 0.693147180559945309, 1e-15);
}

TEST(GeneratorTest, VanishesAtOne) {
  for (const auto& spec : shipped_specs()) {
    EXPECT_EQ(g_eval(spec, 1.0).value.value(), 0.0) << family_name(spec.family) << " " << spec.lambda;
  }
}

TEST(GeneratorTest, SchweizerSklarOneIsOneMinusX) {
  EXPECT_NEAR(g_eval(GeneratorSpec::schweizer_sklar(1.0), 0.3).value.value(), 0.7, 1e-15);
}

TEST(GeneratorTest, FrankInfinityIsOneMinusX) {
  EXPECT_DOUBLE_EQ(g_eval(GeneratorSpec::frank(kInfinity), 0.3).value.value(), 0.7);
}

// Reference values computed with 30-digit mpmath.
TEST(GeneratorTest, FamilyValuesMatchHighPrecisionReference) {
  EXPECT_NEAR(g_eval(GeneratorSpec::frank(2.0), 0.3).value.value(), 1.46471259779988886663, 1e-14);
  EXPECT_NEAR(g_eval(GeneratorSpec::frank(0.5), 0.3).value.value(), 0.97950957140792715004, 1e-14);
  EXPECT_NEAR(g_eval(GeneratorSpec::frank(10.0), 0.3).value.value(), 2.20197352077031961155, 1e-14);
  EXPECT_NEAR(g_eval(GeneratorSpec::schweizer_sklar(-2.0), 0.3).value.value(), 5.05555555555555555556, 1e-13);
  EXPECT_NEAR(g_eval(GeneratorSpec::schweizer_sklar(0.5), 0.3).value.value(), 0.90455488498966777309, 1e-14);
  EXPECT_NEAR(g_eval(GeneratorSpec::schweizer_sklar(2.0), 0.3).value.value(), 0.455, 1e-15);
}

TEST(GeneratorTest, StableFormsAgreeWithTextbookFormulas) {
  for (double l : {-3.0, -0.7, 0.3, 1.5, 4.0}) {
    for (double x = 0.05; x < 1.0; x += 0.05) {
      EXPECT_NEAR(g_eval(GeneratorSpec::schweizer_sklar(l), x).value.value(), oracle::ss_generator(l, x), 1e-10);
    }
  }
  for (double l : {0.2, 0.9, 1.1, 3.0, 50.0, 1e4}) {
    for (double x = 0.05; x < 1.0; x += 0.05) {
      EXPECT_NEAR(g_eval(GeneratorSpec::frank(l), x).value.value(), oracle::frank_generator(l, x), 1e-9);
    }
  }
}

TEST(GeneratorTest, StrictlyDecreasing) {
  for (const auto& spec : shipped_specs()) {
    double prev = g_eval(spec, 1e-6).value.value();
    for (double x = 0.01; x <= 1.0; x += 0.01) {
      const double cur = g_eval(spec, x).value.value();
      EXPECT_LT(cur, prev) << family_name(spec.family) << " " << spec.lambda << " at " << x;
      prev = cur;
    }
  }
}

TEST(GeneratorTest, StrictGeneratorsClampBelowEps) {
  const auto spec = GeneratorSpec::product();
  const auto v = g_eval(spec, 0.0);
  EXPECT_TRUE(v.clamped);
  EXPECT_TRUE(v.value.is_finite());
  EXPECT_NEAR(v.value.value(), -std::log(kDefaultEps), 1e-12);
  EXPECT_FALSE(g_eval(spec, 0.5).clamped);

  // Nilpotent generators are finite at 0 and never clamp.
  const auto luk = g_eval(GeneratorSpec::lukasiewicz(), 0.0);
  EXPECT_FALSE(luk.clamped);
  EXPECT_EQ(luk.value.value(), 1.0);
  EXPECT_DOUBLE_EQ(g_eval(GeneratorSpec::schweizer_sklar(2.0), 0.0).value.value(), 0.5);
}

TEST(GeneratorTest, LimitAtZero) {
  EXPECT_TRUE(Generator(GeneratorSpec::product()).at_zero().is_infinite());
  EXPECT_TRUE(Generator(GeneratorSpec::frank(3.0)).at_zero().is_infinite());
  EXPECT_TRUE(Generator(GeneratorSpec::schweizer_sklar(-1.0)).at_zero().is_infinite());
  EXPECT_EQ(Generator(GeneratorSpec::lukasiewicz()).at_zero(), ExtendedReal(1.0));
  EXPECT_EQ(Generator(GeneratorSpec::schweizer_sklar(4.0)).at_zero(), ExtendedReal(0.25));
}

TEST(PseudoInverseTest, Examples) {
  EXPECT_EQ(g_pseudo_inverse(GeneratorSpec::lukasiewicz(), 2.0), 0.0);
  EXPECT_NEAR(g_pseudo_inverse(GeneratorSpec::product(), 0.693147), 0.5, 1e-6);
  EXPECT_EQ(g_pseudo_inverse(GeneratorSpec::product(), 0.0), 1.0);
  EXPECT_EQ(g_pseudo_inverse(GeneratorSpec::product(), ExtendedReal::infinity()), 0.0);
}

TEST(PseudoInverseTest, RoundTripOnUnitInterval) {
  // Below 1e-4 nilpotent generators with lambda > 1 flatten out and the
  // inverse is ill-conditioned, so the lower end is kept moderate.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logx(std::log(1e-4), 0.0);
  for (const auto& spec : shipped_specs()) {
    const Generator g(spec);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double x = std::exp(logx(rng));
      worst = std::max(worst, std::abs(g.inverse(g(x).value) - x));
    }
    for (double x : {1e-4, 0.5, 1.0}) worst = std::max(worst, std::abs(g.inverse(g(x).value) - x));
    EXPECT_LE(worst, 1e-9) << family_name(spec.family) << " " << spec.lambda;
  }
}

TEST(PseudoInverseTest, ClampedRegionMapsToZero) {
  const Generator g(GeneratorSpec::frank(5.0));
  EXPECT_EQ(g.inverse(g(0.0).value), 0.0);
  EXPECT_EQ(g.inverse(g(0.0).value.value() + 1.0), 0.0);
}

TEST(StrictnessTest, Examples) {
  EXPECT_EQ(strictness_of(GeneratorSpec::schweizer_sklar(0.0)), Strictness::Strict);
  EXPECT_EQ(strictness_of(GeneratorSpec::schweizer_sklar(2.0)), Strictness::Nilpotent);
  EXPECT_EQ(strictness_of(GeneratorSpec::schweizer_sklar(-0.5)), Strictness::Strict);
  EXPECT_EQ(strictness_of(GeneratorSpec::frank(kInfinity)), Strictness::Nilpotent);
  EXPECT_EQ(strictness_of(GeneratorSpec::frank(0.5)), Strictness::Strict);
  EXPECT_EQ(strictness_of(GeneratorSpec::frank(1e9)), Strictness::Nilpotent);
  EXPECT_EQ(strictness_of(GeneratorSpec::product()), Strictness::Strict);
  EXPECT_EQ(strictness_of(GeneratorSpec::lukasiewicz()), Strictness::Nilpotent);
}

TEST(ParameterDomainTest, RejectsInvalidParameters) {
  EXPECT_THROW(g_eval(GeneratorSpec::frank(0.0), 0.5), ParameterDomainError);
  EXPECT_THROW(g_eval(GeneratorSpec::frank(-1.0), 0.5), ParameterDomainError);
  EXPECT_THROW(g_eval(GeneratorSpec::frank(std::nan("")), 0.5), ParameterDomainError);
  EXPECT_THROW(g_eval(GeneratorSpec::schweizer_sklar(kInfinity), 0.5), ParameterDomainError);
  EXPECT_THROW(g_eval(GeneratorSpec::product(0.0), 0.5), ParameterDomainError);
  EXPECT_THROW(g_eval(GeneratorSpec::product(1e-2), 0.5), ParameterDomainError);
  EXPECT_NO_THROW(g_eval(GeneratorSpec::product(1e-3), 0.5));
}

TEST(DispatchTest, NearZeroSchweizerSklarIsNegLog) {
  const Generator tiny(GeneratorSpec::schweizer_sklar(5e-8));
  EXPECT_EQ(tiny.form(), Generator::Form::NegLog);
  const Generator small(GeneratorSpec::schweizer_sklar(1e-6));
  EXPECT_EQ(small.form(), Generator::Form::SchweizerSklar);
  // No cancellation just above the threshold.
  EXPECT_NEAR(small(0.3).value.value(), -std::log(0.3), 1e-5);
}

TEST(DispatchTest, HugeFrankIsLinear) {
  EXPECT_EQ(Generator(GeneratorSpec::frank(2e8)).form(), Generator::Form::OneMinus);
  EXPECT_EQ(Generator(GeneratorSpec::frank(1e8)).form(), Generator::Form::Frank);
  const Generator big(GeneratorSpec::frank(1e8));
  EXPECT_TRUE(std::isfinite(big(0.999).value.value()));
  EXPECT_TRUE(std::isfinite(big(1e-6).value.value()));
}

TEST(DerivativeTest, MatchesFiniteDifferences) {
  for (const auto& spec : shipped_specs()) {
    const Generator g(spec);
    for (double x : {0.1, 0.37, 0.8}) {
      const double h = 1e-6;
      const double fd = (g(x + h).value.value() - g(x - h).value.value()) / (2 * h);
      EXPECT_NEAR(g.derivative(x), fd, 1e-5 * std::max(1.0, std::abs(fd)));
      const double y = g(x).value.value();
      const double fdi = (g.inverse(y + h) - g.inverse(y - h)) / (2 * h);
      EXPECT_NEAR(g.inverse_derivative(y), fdi, 1e-5 * std::max(1.0, std::abs(fdi)));
    }
  }
}

TEST(DerivativeTest, ZeroOnClampedBranch) {
  const Generator g(GeneratorSpec::product());
  EXPECT_EQ(g.derivative(1e-15), 0.0);
  EXPECT_EQ(g.inverse_derivative(ExtendedReal::infinity()), 0.0);
}

TEST(ExtendedRealTest, InfinityOrdersAboveFinite) {
  const ExtendedReal inf = ExtendedReal::infinity();
  EXPECT_GT(inf, ExtendedReal(1e308));
  EXPECT_EQ(min(inf, ExtendedReal(3.0)), ExtendedReal(3.0));
  EXPECT_TRUE((inf + ExtendedReal(1.0)).is_infinite());
  EXPECT_EQ(inf, ExtendedReal::infinity());
}

}  // namespace
}  // namespace fuzzyloss
