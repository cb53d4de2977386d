#include <gtest/gtest.h>

#include <cmath>

#include "retlab/partitions.hpp"

using namespace retlab;
using V = std::vector<std::uint64_t>;

TEST(ResidueClasses, SmallCases) {
  const auto four = residue_classes(4);
  EXPECT_EQ(four.modulus, 3u);
  ASSERT_EQ(four.classes.size(), 3u);
  EXPECT_EQ(four.classes[0], (V{1, 4}));
  EXPECT_EQ(four.classes[1], (V{2}));
  EXPECT_EQ(four.classes[2], (V{3}));
  const auto one = residue_classes(1);
  EXPECT_EQ(one.modulus, 1u);
  EXPECT_EQ(one.classes, (std::vector<V>{{1}}));
}

TEST(ResidueClasses, GapExceedsTwoLog) {
  for (std::uint64_t n : {2u, 7u, 55u, 1000u, 65536u}) {
    const auto rc = residue_classes(n);
    EXPECT_GT(static_cast<double>(rc.modulus), 2.0 * std::log(static_cast<double>(n)));
    EXPECT_LE(static_cast<double>(rc.modulus) - 1.0, 2.0 * std::log(static_cast<double>(n)));
    std::uint64_t total = 0;
    for (const auto& c : rc.classes) {
      total += c.size();
      for (std::size_t i = 1; i < c.size(); ++i) EXPECT_EQ(c[i] - c[i - 1], rc.modulus);
    }
    EXPECT_EQ(total, n);
  }
}

TEST(LambdaSets, Blocks) {
  const auto one = lambda_sets(1, 6);
  EXPECT_EQ(one.first, (V{1, 3, 5}));
  EXPECT_EQ(one.second, (V{2, 4, 6}));
  const auto two = lambda_sets(2, 8);
  EXPECT_EQ(two.first, (V{1, 2, 5, 6}));
  EXPECT_EQ(two.second, (V{3, 4, 7, 8}));
}

TEST(PartitionSmr, ClassesAndErrors) {
  // (n+1)^{1.01} - n^{1.01} is just above 1 for small n
  const auto p = partition_smr(1, Rational(1, 100), 50);
  EXPECT_LE(p.size(), 2u);
  for (const auto& [r, members] : p) EXPECT_LE(r, 2u);
  std::uint64_t total = 0;
  for (const auto& [r, members] : p) total += members.size();
  EXPECT_EQ(total, 50u);
  EXPECT_THROW(partition_smr(0, Rational(1, 10), 10), std::invalid_argument);
  EXPECT_THROW(partition_smr(1, Rational(3, 2), 10), std::invalid_argument);
}

TEST(PartitionSmr, MatchesDirectFloors) {
  const Rational b(1, 4);
  const auto p = partition_smr(3, b, 400);
  for (const auto& [r, members] : p) {
    for (auto n : members) {
      // floor(x^{5/4}) for integer x, by searching f with f^4 <= x^5 < (f+1)^4
      auto fl = [](std::uint64_t x) {
        const BigInt x5 = ipow(static_cast<unsigned long>(x), 5);
        BigInt f = iroot(x5, 4);
        return f;
      };
      EXPECT_EQ(fl(n + 3) - fl(n), BigInt(static_cast<unsigned long>(r))) << n;
    }
  }
}
