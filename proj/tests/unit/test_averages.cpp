#include <gtest/gtest.h>

#include <sstream>

#include "retlab/averages.hpp"
#include "retlab/errors.hpp"

using namespace retlab;
using V = std::vector<std::uint64_t>;

namespace {

TargetFamily fam(long p, long q) {
  TargetFamily f;
  f.a = Rational(p, q);
  return f;
}

HittingSequence seeded(std::uint64_t seed, long p, long q, std::uint64_t n) {
  auto y = DigitStream::seeded(seed, 2);
  return build_hitting(y, fam(p, q), n);
}

// Every index hits: X_n = 1 and sigma_n = 1.
HittingSequence all_ones(std::uint64_t n) {
  HittingSequence h;
  h.family = fam(1, 2);
  h.n_max = n;
  h.x.assign(n, 1);
  h.sigma.assign(n, 1.0);
  for (std::uint64_t k = 1; k <= n; ++k) {
    h.w.push_back(static_cast<double>(k));
    h.hits.push_back(k);
  }
  return h;
}

}  // namespace

TEST(LacunaryGrid, Examples) {
  EXPECT_EQ(lacunary_grid(2, 10), (V{2, 4, 8}));
  EXPECT_EQ(lacunary_grid(Rational(11, 10), 3), (V{1, 2, 3}));
  EXPECT_THROW(lacunary_grid(1, 10), std::invalid_argument);
  const auto g = lacunary_grid(Rational(6, 5), 100000);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
  EXPECT_LE(g.back(), 100000u);
}

TEST(LlnCheck, Degenerate) {
  const auto ones = all_ones(50);
  const LlnTrace t = lln_check(ones, lacunary_grid(2, 50));
  for (double r : t.ratio) EXPECT_DOUBLE_EQ(r, 1.0);
  auto zero = DigitStream::from_rational(0, 2);
  const HittingSequence h = build_hitting(zero, fam(2, 5), 100);
  const LlnTrace z = lln_check(h, lacunary_grid(2, 100));
  EXPECT_TRUE(z.degenerate);
  for (double r : z.ratio) EXPECT_EQ(r, 0.0);
}

TEST(LlnCheck, SeededRatioNearOne) {
  const HittingSequence h = seeded(7, 2, 5, 100000);
  EXPECT_LE(std::abs(static_cast<double>(h.hits.size()) / h.W(100000) - 1.0), 0.05);
}

TEST(SingleAverage, TrivialObservables) {
  const HittingSequence h = seeded(3, 3, 10, 5000);
  const auto grid = lacunary_grid(Rational(3, 2), 5000);
  const auto rot = MPSystem::circle_rotation(Angle::golden());
  const AverageTrace one = single_average(h, rot, Observable::character(0), 0, grid);
  for (const auto& v : one.values) EXPECT_EQ(v, Complex(1, 0));
  const auto fixed = MPSystem::cyclic(1);
  const auto f = Observable::table({Complex(0.5, -0.5)}, "f");
  const AverageTrace pt = single_average(h, fixed, f, 0, grid);
  for (const auto& v : pt.values) EXPECT_EQ(v, Complex(0.5, -0.5));
}

TEST(SingleAverage, NormalizationsAgreeWithLln) {
  const HittingSequence h = seeded(17, 3, 10, 50000);
  const auto grid = lacunary_grid(Rational(6, 5), 50000);
  const auto rot = MPSystem::circle_rotation(Angle::golden());
  const auto f = Observable::character(1);
  const AverageTrace t = single_average(h, rot, f, 12345, grid);
  const LlnTrace l = lln_check(h, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (h.count_upto(grid[k]) == 0) continue;
    EXPECT_LE(std::abs(t.values[k] - t.values_w[k]), 2.0 * std::abs(l.ratio[k] - 1.0) + 1e-12);
  }
}

TEST(DoubleAverage, ConstantsAndReference) {
  const HittingSequence h = seeded(5, 3, 10, 3000);
  const auto grid = lacunary_grid(2, 3000);
  const auto torus = MPSystem::torus_pair(Angle::golden(), Angle::sqrt_frac(2));
  const auto one = Observable::character(0);
  const AverageTrace t = double_average(h, torus, one, one, 0, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EXPECT_EQ(t.values[k], Complex(1, 0));
    EXPECT_EQ(t.reference[k], Complex(1, 0));
  }
}

TEST(SemiRandom, ProductOfMeans) {
  const HittingSequence h = seeded(9, 1, 20, 20000);
  const auto torus = MPSystem::torus_pair(Angle::golden(), Angle::sqrt_frac(2));
  const auto grid = lacunary_grid(Rational(6, 5), 5000);
  const auto one = Observable::character(0);
  const AverageTrace c = semi_random_average(h, torus, one, one, 0, grid);
  for (const auto& v : c.values) EXPECT_EQ(v, Complex(1, 0));
  const AverageTrace t = semi_random_average(h, torus, Observable::character(1), one, 0, grid);
  ASSERT_TRUE(t.limit.has_value());
  EXPECT_EQ(*t.limit, Complex(0, 0));
  EXPECT_LT(std::abs(t.values.back()), 0.05);
  // more grid than hits: truncated
  const AverageTrace cut = semi_random_average(h, torus, one, one, 0, lacunary_grid(2, 20000));
  EXPECT_TRUE(cut.truncated);
  EXPECT_LE(cut.grid.back(), h.hits.size());
}

TEST(TwoPower, ReducesToSingle) {
  const HittingSequence h = seeded(21, 1, 5, 20000);
  const auto grid = lacunary_grid(Rational(6, 5), 20000);
  const auto rot = MPSystem::circle_rotation(Angle::golden());
  const auto f = Observable::character(1);
  const std::vector<State> xs{0, rot.from_rational(Rational(1, 3))};
  const TwoPowerResult r = two_power_average(h, rot, f, Observable::character(0), xs, Rational(1, 20), grid);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const AverageTrace s = single_average(h, rot, f, xs[j], grid);
    EXPECT_EQ(r.traces[j].values, s.values);
  }
  EXPECT_EQ(r.cauchy_proxy.size(), grid.size() - 1);
  EXPECT_THROW(two_power_average(h, rot, f, f, xs, Rational(1, 10), grid), ConditionViolated);
}

TEST(TwoPower, FixedPoint) {
  const HittingSequence h = seeded(2, 1, 5, 500);
  const auto grid = lacunary_grid(2, 500);
  const auto fixed = MPSystem::cyclic(1);
  const auto f = Observable::table({Complex(0.5, 0)}, "f");
  const auto g = Observable::table({Complex(0, -1)}, "g");
  const TwoPowerResult r = two_power_average(h, fixed, f, g, {0}, Rational(1, 20), grid);
  for (const auto& v : r.traces[0].values) {
    EXPECT_EQ(v, Complex(0, -0.5));
  }
}

TEST(InteractionSum, BruteForce) {
  const HittingSequence h = seeded(4, 1, 4, 6000);
  const Rational b(1, 2);
  for (std::uint64_t n : {100u, 1000u, 5000u}) {
    const std::uint64_t lags = static_cast<std::uint64_t>(std::floor(std::sqrt(static_cast<double>(n))));
    std::uint64_t xx = 0;
    double zz = 0;
    for (std::uint64_t m = 1; m <= lags; ++m) {
      for (std::uint64_t k = 1; k <= n; ++k) {
        xx += h.X(k + m) * h.X(k);
        zz += h.Z(k + m) * h.Z(k);
      }
    }
    const InteractionSum s = interaction_sum(h, b, n);
    EXPECT_EQ(s.lags, lags);
    EXPECT_EQ(s.xx, xx);
    EXPECT_NEAR(s.zz, zz, 1e-9 * (1 + std::abs(zz)));
  }
  const auto ones = all_ones(200);
  EXPECT_EQ(interaction_sum(ones, b, 100).xx, 10u * 100u);
  EXPECT_THROW(interaction_sum(h, b, 6000), std::invalid_argument);
}

TEST(TracesCsv, Header) {
  const HittingSequence h = seeded(1, 1, 2, 100);
  const auto rot = MPSystem::circle_rotation(Angle::golden());
  std::ostringstream out;
  write_traces_csv(out, {single_average(h, rot, Observable::character(1), 0, lacunary_grid(2, 100))});
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "scheme,seed,x_id,N,re,im,reference_re,reference_im");
}
