#include <gtest/gtest.h>

#include <cmath>

#include "retlab/seeding.hpp"
#include "retlab/systems.hpp"

using namespace retlab;

TEST(Angle, Values) {
  EXPECT_NEAR(Angle::golden().value(), (std::sqrt(5.0) - 1.0) / 2.0, 1e-15);
  EXPECT_NEAR(Angle::sqrt_frac(2).value(), std::sqrt(2.0) - 1.0, 1e-15);
  EXPECT_NEAR(Angle::parse("sqrt:3").value(), std::sqrt(3.0) - 1.0, 1e-15);
  EXPECT_TRUE(Angle::parse("1/4").is_rational());
  EXPECT_FALSE(Angle::parse("golden").is_rational());
  EXPECT_THROW(Angle::parse("sqrt:"), std::invalid_argument);
  // fixed-point value is floor(alpha 2^128)
  const double hi = static_cast<double>(Angle::golden().fixed128() >> 64) / 18446744073709551616.0;
  EXPECT_NEAR(hi, Angle::golden().value(), 1e-15);
}

TEST(MPSystem, Orbits) {
  const auto quarter = MPSystem::circle_rotation(Angle::rational(Rational(1, 4)));
  EXPECT_EQ(*quarter.iterate_exact(0, 3), Rational(3, 4));
  EXPECT_DOUBLE_EQ(quarter.to_unit(quarter.iterate(0, 3)), 0.75);
  const auto cyc = MPSystem::cyclic(5);
  EXPECT_EQ(cyc.iterate(2, 7), 4u);
  const auto dbl = MPSystem::doubling();
  EXPECT_EQ(*dbl.iterate_exact(Rational(1, 3), 2), Rational(1, 3));
  const auto golden = MPSystem::circle_rotation(Angle::golden());
  const State x = golden.from_rational(Rational(1, 7));
  double expect = 1.0 / 7.0 + 1000.0 * Angle::golden().value();
  expect -= std::floor(expect);
  EXPECT_NEAR(golden.to_unit(golden.iterate(x, 1000)), expect, 1e-11);
}

TEST(MPSystem, ExactLimits) {
  const auto golden = MPSystem::circle_rotation(Angle::golden());
  EXPECT_EQ(*golden.exact_limit_single(Observable::character(1)), Complex(0, 0));
  EXPECT_EQ(*golden.exact_limit_single(Observable::constant(Complex(0.6, 0.8))), Complex(0.6, 0.8));
  const auto quarter = MPSystem::circle_rotation(Angle::rational(Rational(1, 4)));
  EXPECT_FALSE(quarter.exact_limit_single(Observable::character(4)).has_value());
  const auto cyc = MPSystem::cyclic(4);
  const auto f = Observable::table({0.25, 0.5, -1.0, 0.75}, "t");
  EXPECT_EQ(*cyc.exact_limit_single(f), Complex(0.125, 0));
}

TEST(MPSystem, DoubleLimitAgainstPartialSums) {
  const auto torus = MPSystem::torus_pair(Angle::golden(), Angle::sqrt_frac(2));
  const auto e1 = Observable::character(1);
  EXPECT_EQ(*torus.exact_limit_double(e1, e1, 0), Complex(0, 0));
  const auto one = Observable::character(0);
  EXPECT_EQ(*torus.exact_limit_double(one, one, 0), Complex(1, 0));
  Complex sum = 0;
  const std::uint64_t n = 200000;
  const State x = torus.from_rational(Rational(2, 9));
  for (std::uint64_t k = 1; k <= n; ++k) sum += e1(torus.iterate(x, k), 0) * e1(torus.iterate2(x, k), 0);
  EXPECT_LT(std::abs(sum) / static_cast<double>(n), 1e-3);

  // e(x + k alpha) e(-(x + k alpha)) = 1 along a resonant pair
  const auto same = MPSystem::torus_pair(Angle::golden(), Angle::golden());
  const auto lim = same.exact_limit_double(e1, Observable::character(-1), x);
  ASSERT_TRUE(lim.has_value());
  EXPECT_NEAR(std::abs(*lim - Complex(1, 0)), 0.0, 1e-12);
}

TEST(Observable, IndicatorAndSample) {
  const auto ind = Observable::indicator(Rational(1, 4), Rational(1, 2));
  const auto circle = MPSystem::circle_rotation(Angle::golden());
  EXPECT_EQ(ind(circle.from_rational(Rational(1, 3)), 0), Complex(1, 0));
  EXPECT_EQ(ind(circle.from_rational(Rational(1, 4)), 0), Complex(0, 0));
  EXPECT_EQ(*ind.exact_mean(), Complex(0.25, 0));
  SplitMix64 rng(5);
  double mean = 0;
  for (int i = 0; i < 100000; ++i) mean += ind(circle.sample(rng), 0).real();
  EXPECT_NEAR(mean / 100000, 0.25, 0.01);
}
