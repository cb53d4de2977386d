#include <gtest/gtest.h>

#include "oracles.hpp"
#include "retlab/errors.hpp"
#include "retlab/seeding.hpp"
#include "retlab/targets.hpp"

using namespace retlab;

namespace {

TargetFamily fam(long p, long q, unsigned base = 2, TargetMode mode = TargetMode::raw) {
  TargetFamily f;
  f.a = Rational(p, q);
  f.base = base;
  f.mode = mode;
  return f;
}

}  // namespace

TEST(SigmaEnclosure, RationalAndIrrational) {
  const Enclosure four = sigma_enclosure(4, Rational(1, 2), 8);
  EXPECT_TRUE(four.exact());
  EXPECT_EQ(four.lo, Rational(1, 2));
  EXPECT_EQ(sigma_enclosure(1, Rational(3, 7), 8).lo, 1);
  const Enclosure five = sigma_enclosure(5, Rational(1, 2), 8);
  EXPECT_LE(five.width(), Rational(1, 256));
  EXPECT_LT(five.lo * five.lo * 5, 1);
  EXPECT_GT(five.hi * five.hi * 5, 1);
}

TEST(BuildHitting, OneThirdBaseTwo) {
  auto y = DigitStream::from_rational(Rational(1, 3), 2);
  const HittingSequence h = build_hitting(y, fam(1, 2), 10);
  const std::vector<std::uint8_t> x{1, 1, 0, 1, 0, 1, 0, 1, 0, 0};
  EXPECT_EQ(h.x, x);
  EXPECT_EQ(h.hits, (std::vector<std::uint64_t>{1, 2, 4, 6, 8}));
  EXPECT_EQ(h.count_upto(5), 3u);
  EXPECT_NEAR(h.W(2), 1.0 + std::sqrt(0.5), 1e-15);
}

TEST(BuildHitting, ZeroNeverHits) {
  auto y = DigitStream::from_rational(0, 3);
  const HittingSequence h = build_hitting(y, fam(2, 5, 3), 100);
  EXPECT_TRUE(h.hits.empty());
  EXPECT_TRUE(h.undecided.empty());
}

TEST(BuildHitting, OpenRightEndpoint) {
  // 2^4 / 32 = 1/2 = 4^{-1/2}
  auto y = DigitStream::from_rational(Rational(1, 32), 2);
  const HittingSequence h = build_hitting(y, fam(1, 2), 8);
  EXPECT_EQ(h.X(4), 0);
  EXPECT_EQ(h.X(3), 1);
}

TEST(MembershipTable, AgreesWithExactOracle) {
  SplitMix64 rng(99);
  const std::vector<std::pair<long, long>> exps{{1, 2}, {2, 5}, {3, 10}, {7, 10}};
  for (unsigned base : {2u, 3u, 10u}) {
    for (auto [p, q] : exps) {
      const TargetFamily f = fam(p, q, base);
      const MembershipTable table = MembershipTable::raw(f, 200);
      for (int trial = 0; trial < 20; ++trial) {
        const unsigned long den = 2 + rng() % 5000;
        const Rational y(BigInt(rng() % den), BigInt(den));
        auto stream = DigitStream::from_rational(y, base);
        for (std::uint64_t n = 1; n <= 200; ++n) {
          const Rational t = oracle::shifted(y, base, n);
          EXPECT_EQ(table.member(stream, n), oracle::below_power(t, n, p, q))
              << "y=" << y << " base=" << base << " a=" << p << "/" << q << " n=" << n;
        }
      }
    }
  }
}

TEST(MembershipTable, PowerSampler) {
  TargetFamily f = fam(1, 20);
  f.phi = Sampler::power(Rational(3, 2));
  EXPECT_EQ(f.phi(4), 8u);
  EXPECT_EQ(f.phi(5), 11u);
  const MembershipTable table = MembershipTable::raw(f, 60);
  const Rational y(12345, 99991);
  auto stream = DigitStream::from_rational(y, 2);
  for (std::uint64_t n = 1; n <= 60; ++n) {
    const Rational t = oracle::shifted(y, 2, f.phi(n));
    EXPECT_EQ(table.member(stream, n), oracle::below_power(t, n, 1, 20)) << n;
  }
}

TEST(Dyadic, WorkedValues) {
  const DyadicTarget t = build_dyadic(fam(1, 2, 2, TargetMode::dyadic), 64);
  EXPECT_EQ(t.gamma_at(1), 1);
  EXPECT_EQ(t.gamma_at(4), Rational(9, 16));
  EXPECT_EQ(t.gamma_at(5), Rational(1, 2));
  EXPECT_EQ(t.bracket[4], 1u);
  EXPECT_EQ(t.denom_exp[4], 4u);
  EXPECT_LE(t.f_hi[4], Rational(1, 16));
}

TEST(Dyadic, Invariants) {
  for (auto [p, q] : std::vector<std::pair<long, long>>{{1, 2}, {2, 5}, {1, 3}}) {
    const DyadicTarget t = build_dyadic(fam(p, q, 2, TargetMode::dyadic), 4000);
    for (std::uint64_t n = 2; n <= 4000; ++n) {
      const Rational& g = t.gamma_at(n);
      EXPECT_LE(g, t.gamma_at(n - 1));
      // gamma_n > n^{-a}
      EXPECT_FALSE(oracle::below_power(g, n, p, q)) << n;
      const Rational scaled = g * Rational(ipow(2ul, t.denom_exp[n - 1]));
      EXPECT_EQ(scaled.get_den(), 1) << n;
      EXPECT_GE(t.f_lo[n - 1], 0);
      EXPECT_LE(t.f_hi[n - 1], Rational(1) / Rational(ipow(2ul, t.denom_exp[n - 1])));
    }
  }
}

TEST(JointMeasure, MatchesCellCounting) {
  const DyadicTarget t = build_dyadic(fam(1, 2, 2, TargetMode::dyadic), 16);
  auto levels = [&](const std::vector<std::uint64_t>& idx) {
    unsigned l = 0;
    for (auto n : idx) l = std::max<unsigned>(l, n + t.denom_exp[n - 1]);
    return l;
  };
  auto gammas = [&](const std::vector<std::uint64_t>& idx) {
    std::vector<Rational> g;
    for (auto n : idx) g.push_back(t.gamma_at(n));
    return g;
  };
  std::vector<std::vector<std::uint64_t>> cases{{3}, {1, 2}, {2, 3}, {2, 9}, {4, 5, 6}, {2, 7, 13}, {3, 5, 9, 14}};
  for (std::uint64_t i = 1; i <= 12; ++i) {
    for (std::uint64_t j = i + 1; j <= 12; ++j) cases.push_back({i, j});
  }
  for (const auto& idx : cases) {
    EXPECT_EQ(exact_joint_measure(t, idx), oracle::brute_joint_measure(idx, gammas(idx), 2, levels(idx)))
        << idx.front() << ".." << idx.back();
  }
  const std::vector<std::uint64_t> single{7};
  EXPECT_EQ(exact_joint_measure(t, single), t.gamma_at(7));
}

TEST(JointMeasure, BaseThree) {
  const DyadicTarget t = build_dyadic(fam(1, 2, 3, TargetMode::dyadic), 12);
  for (std::uint64_t i = 1; i <= 6; ++i) {
    for (std::uint64_t j = i + 1; j <= 7; ++j) {
      const std::vector<std::uint64_t> idx{i, j};
      const unsigned l = std::max(i + t.denom_exp[i - 1], j + t.denom_exp[j - 1]);
      if (l > 13) continue;
      EXPECT_EQ(exact_joint_measure(t, idx),
                oracle::brute_joint_measure(idx, {t.gamma_at(i), t.gamma_at(j)}, 3, l));
    }
  }
}

TEST(JointMeasure, Limits) {
  const DyadicTarget t = build_dyadic(fam(1, 2, 2, TargetMode::dyadic), 100);
  const std::vector<std::uint64_t> five{1, 10, 20, 30, 40};
  EXPECT_THROW(exact_joint_measure(t, five), SizeExceeded);
  const std::vector<std::uint64_t> far{1, 90};
  EXPECT_THROW(exact_joint_measure(t, far), SizeExceeded);
}

TEST(SymmDiff, ZeroAndSeeded) {
  const TargetFamily f = fam(1, 2, 2);
  const DyadicTarget t = build_dyadic(fam(1, 2, 2, TargetMode::dyadic), 1 << 14);
  auto zero = DigitStream::from_rational(0, 2);
  EXPECT_EQ(symm_diff_count(zero, f, t, 1 << 14).count, 0u);
  auto y = DigitStream::seeded(11, 2);
  const SymmDiffResult r = symm_diff_count(y, f, t, 1 << 14);
  const double mass = r.f_sum.hi.get_d();
  EXPECT_LE(static_cast<double>(r.count), mass + 5.0 * std::sqrt(mass) + 1.0);
}
