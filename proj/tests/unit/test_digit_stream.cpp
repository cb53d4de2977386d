#include <gtest/gtest.h>

#include "retlab/digit_stream.hpp"
#include "retlab/errors.hpp"
#include "retlab/exact.hpp"

using namespace retlab;

TEST(Exact, IntegerRoots) {
  EXPECT_EQ(iroot(BigInt(26), 3), 2);
  EXPECT_EQ(iroot(BigInt(27), 3), 3);
  EXPECT_EQ(ipow(3ul, 5), 243);
  for (std::uint64_t n = 1; n < 300; ++n) {
    // floor(n^{3/2}) by brute force
    std::uint64_t f = 0;
    while ((f + 1) * (f + 1) <= n * n * n) ++f;
    EXPECT_EQ(big_to_u64(floor_rational_power(n, 3, 2)), f) << n;
  }
}

TEST(Exact, ParseAndFormat) {
  EXPECT_EQ(parse_rational("3/10"), Rational(3, 10));
  EXPECT_EQ(parse_rational("0.4"), Rational(2, 5));
  EXPECT_EQ(parse_rational("-1.25"), Rational(-5, 4));
  EXPECT_EQ(to_fraction_string(Rational(3, 2)), "3/2");
  EXPECT_EQ(to_fraction_string(Rational(-4)), "-4");
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  for (double v : {0.1, 1.0 / 3.0, 6.02e23, -2.5e-300}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(DigitStream, ExplicitExpansions) {
  auto third = DigitStream::from_rational(Rational(1, 3), 2);
  for (std::uint64_t i = 1; i <= 20; ++i) EXPECT_EQ(third.digit_at(i), i % 2 == 0 ? 1 : 0);
  auto zero = DigitStream::from_rational(0, 7);
  EXPECT_EQ(zero.digit_at(7), 0);
  auto half = DigitStream::from_rational(Rational(1, 2), 2);
  EXPECT_EQ(half.digit_at(1), 1);
  EXPECT_EQ(half.digit_at(2), 0);
  auto periodic = DigitStream::from_digits({1}, {0, 2}, 3);
  // 0.1(02) in base 3 = 1/3 + (2/8) / 3
  EXPECT_EQ(*periodic.exact_value(), Rational(5, 12));
}

TEST(DigitStream, SeededDigitsIgnoreCacheOrder) {
  auto a = DigitStream::seeded(42, 10);
  auto b = DigitStream::seeded(42, 10);
  const auto far = a.digit_at(5000);
  std::vector<std::uint8_t> first(a.digits(1, 100).begin(), a.digits(1, 100).end());
  std::vector<std::uint8_t> again(b.digits(1, 100).begin(), b.digits(1, 100).end());
  EXPECT_EQ(first, again);
  EXPECT_EQ(b.digit_at(5000), far);
  auto c = DigitStream::seeded(43, 10);
  std::vector<std::uint8_t> other(c.digits(1, 100).begin(), c.digits(1, 100).end());
  EXPECT_NE(first, other);
}

TEST(DigitStream, CapIsEnforced) {
  auto s = DigitStream::seeded(1, 2, 64);
  EXPECT_NO_THROW(s.digit_at(64));
  EXPECT_THROW(s.digit_at(65), CapExceeded);
}

TEST(DigitStream, ShiftedPointMembership) {
  auto third = DigitStream::from_rational(Rational(1, 3), 2);
  EXPECT_TRUE(third.shifted_point_in(2, RationalInterval(0, Rational(1, 2))));
  EXPECT_FALSE(third.shifted_point_in(1, RationalInterval(0, Rational(1, 2))));
  auto zero = DigitStream::from_rational(0, 5);
  EXPECT_FALSE(zero.shifted_point_in(9, RationalInterval(0, Rational(1, 7))));
  auto half = DigitStream::from_rational(Rational(1, 2), 2);
  EXPECT_FALSE(half.shifted_point_in(1, RationalInterval(0, Rational(1, 4))));
}

TEST(DigitStream, CompareTailMatchesExactTail) {
  auto s = DigitStream::from_rational(Rational(5, 17), 3);
  for (std::uint64_t n = 0; n < 30; ++n) {
    const Rational t = *s.exact_tail(n);
    EXPECT_EQ(s.compare_tail(n, t), std::strong_ordering::equal);
    EXPECT_EQ(s.compare_tail(n, Rational(1, 2)), cmp(t, Rational(1, 2)) < 0 ? std::strong_ordering::less
                                                                            : std::strong_ordering::greater);
  }
}
