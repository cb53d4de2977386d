#include <gtest/gtest.h>

#include "oracles.hpp"
#include "retlab/errors.hpp"
#include "retlab/seeding.hpp"
#include "retlab/spectral.hpp"
#include "retlab/targets.hpp"

using namespace retlab;

TEST(SupBracket, Trivial) {
  const ExpSumProfile zero = sup_bracket({0.0, 0.0}, {1, 2});
  EXPECT_EQ(zero.sup_lo, 0.0);
  EXPECT_EQ(zero.sup_hi, 0.0);
  const ExpSumProfile one = sup_bracket({1.0}, {1});
  EXPECT_LE(one.sup_lo, 1.0);
  EXPECT_GE(one.sup_hi, 1.0);
  EXPECT_LE(one.sup_hi - one.sup_lo, 1e-3);
  std::vector<double> z(16, 1.0);
  std::vector<std::uint64_t> s(16);
  for (std::uint64_t n = 0; n < 16; ++n) s[n] = n + 1;
  const ExpSumProfile sixteen = sup_bracket(z, s);
  EXPECT_LE(sixteen.sup_lo, 16.0);
  EXPECT_GE(sixteen.sup_hi, 16.0);
  EXPECT_NEAR(oracle::dense_sup(z, s, 1000000), 16.0, 1e-9);
}

TEST(SupBracket, ContainsDenseOracle) {
  SplitMix64 rng(2024);
  for (int inst = 0; inst < 40; ++inst) {
    const std::uint64_t n = 1 + rng() % 128;
    std::vector<double> z(n);
    std::vector<std::uint64_t> s(n);
    for (std::uint64_t k = 1; k <= n; ++k) {
      z[k - 1] = 2.0 * rng.uniform() - 1.0;
      s[k - 1] = 1 + rng() % (k * k);
    }
    const ExpSumProfile p = sup_bracket(z, s);
    const std::uint64_t points = 200000;
    const double dense = oracle::dense_sup(z, s, points);
    EXPECT_LE(dense, p.sup_hi + 1e-9) << inst;
    EXPECT_LE(p.sup_lo, dense + p.lipschitz / (2.0 * points) + 1e-9) << inst;
    EXPECT_TRUE(p.met_tol);
    EXPECT_LE(p.sup_hi - p.sup_lo, 1e-3 + 1e-12);
    EXPECT_NEAR(std::abs(eval_expsum(z, s, p.argmax)), p.sup_lo, 1e-3 + 1e-9);
  }
}

TEST(SupBracket, GridBudget) {
  SupOptions opt;
  opt.max_grid = 1024;
  EXPECT_THROW(sup_bracket({1.0}, {5000}, opt), SizeExceeded);
}

TEST(Concentration, ZeroProbabilities) {
  ConcentrationSpec spec;
  spec.n = 256;
  spec.trials = 5;
  spec.taus.assign(256, 0.0);
  spec.enforce_condition = false;
  const QuantileReport r = concentration_trial(spec);
  EXPECT_EQ(r.max, 0.0);
  spec.enforce_condition = true;
  EXPECT_THROW(concentration_trial(spec), ConditionViolated);
}

TEST(Concentration, DeterministicAndOrdered) {
  ConcentrationSpec spec;
  spec.n = 1024;
  spec.trials = 30;
  spec.seed = 77;
  spec.tol = 1e-2;
  const QuantileReport a = concentration_trial(spec);
  spec.workers = 3;
  const QuantileReport b = concentration_trial(spec);
  EXPECT_EQ(a.normalized, b.normalized);
  EXPECT_LE(a.q50, a.q90);
  EXPECT_LE(a.q90, a.q99);
  EXPECT_LE(a.q99, a.max);
  spec.mode = ConcentrationMode::pairs;
  spec.lag = 2;
  spec.enforce_condition = false;  // ln N / R_N is about 0.16 at this size
  const QuantileReport p = concentration_trial(spec);
  EXPECT_GT(p.max, 0.0);
  // thinned by R >= 2 ln N and >= every dyadic depth up to N
  TargetFamily fam;
  fam.a = spec.a;
  fam.mode = TargetMode::dyadic;
  const DyadicTarget t = build_dyadic(fam, 1024);
  EXPECT_GE(p.spacing, 14u);
  EXPECT_GE(p.spacing, *std::max_element(t.denom_exp.begin(), t.denom_exp.end()));
  EXPECT_EQ(p.terms, 1023 / p.spacing);
}

TEST(NearestRank, Definition) {
  const std::vector<double> v{5, 1, 4, 2, 3};
  EXPECT_EQ(nearest_rank(v, 0.5), 3);
  EXPECT_EQ(nearest_rank(v, 0.99), 5);
  EXPECT_EQ(nearest_rank(v, 0.2), 1);
  EXPECT_EQ(nearest_rank(v, 0.21), 2);
}

TEST(Vdc, Cases) {
  const VdcResult single = vdc_check({{3.0, -4.0}}, 1);
  EXPECT_DOUBLE_EQ(single.lhs, 25.0);
  EXPECT_DOUBLE_EQ(single.rhs, 50.0);
  EXPECT_TRUE(single.holds);
  const std::vector<std::vector<long>> equal(10, std::vector<long>{1, 2});
  const VdcExact e = vdc_check_exact(equal, 10);
  EXPECT_GE(e.slack(), 0);
  EXPECT_EQ(e.lhs, 500);
  SplitMix64 rng(8);
  for (int f = 0; f < 300; ++f) {
    const std::size_t n = 1 + rng() % 20, d = 1 + rng() % 4;
    std::vector<std::vector<long>> v(n, std::vector<long>(d));
    std::vector<std::vector<double>> w(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        v[i][k] = static_cast<long>(rng() % 19) - 9;
        w[i][k] = static_cast<double>(v[i][k]);
      }
    }
    for (std::uint64_t m = 1; m <= n; ++m) {
      const VdcExact ex = vdc_check_exact(v, m);
      EXPECT_GE(ex.slack(), 0);
      const VdcResult fl = vdc_check(w, m);
      EXPECT_TRUE(fl.holds);
      EXPECT_NEAR(fl.lhs, ex.lhs.get_d(), 1e-9 * (1 + fl.lhs));
      EXPECT_NEAR(fl.rhs, ex.rhs.get_d(), 1e-9 * (1 + fl.rhs));
    }
  }
}

TEST(Covariance, ExactValues) {
  const RationalInterval half(0, Rational(1, 2));
  EXPECT_EQ(exact_cov(half, half, 1), 0);
  EXPECT_EQ(exact_cov(half, half, 0), Rational(1, 4));
  const RationalInterval i(Rational(1, 8), Rational(5, 8));
  const RationalInterval j(Rational(3, 4), 1);
  for (std::uint64_t m = 3; m < 8; ++m) EXPECT_EQ(exact_cov(i, j, m), 0);
}

TEST(Covariance, MatchesCellCounting) {
  const std::vector<std::pair<Rational, Rational>> ints{
      {0, Rational(1, 3)}, {Rational(1, 5), Rational(4, 5)}, {Rational(2, 7), Rational(3, 7)}, {Rational(1, 9), 1}};
  for (const auto& [a, b] : ints) {
    for (const auto& [c, d] : ints) {
      for (unsigned m = 0; m < 4; ++m) {
        const Rational exact = exact_cov(RationalInterval(a, b), RationalInterval(c, d), m, 2);
        // cells of depth m + 14: boundary cells move each term by at most 4 / 2^14
        const Rational approx = oracle::brute_cov(a, b, c, d, m, 14, 2);
        EXPECT_LE(Rational(abs(exact - approx)).get_d(), 8.0 / 16384.0) << a << " " << b << " " << c << " " << d << " m=" << m;
      }
    }
  }
  const Rational q(1, 9);
  EXPECT_EQ(exact_cov(RationalInterval(0, q), RationalInterval(q, Rational(2, 9)), 2, 3),
            oracle::brute_cov(0, q, q, Rational(2, 9), 2, 2, 3));
}

TEST(Covariance, MonteCarlo) {
  const auto dbl = MPSystem::doubling();
  const auto ind = Observable::indicator(0, Rational(1, 2));
  const CovEstimate v = mc_cov(dbl, ind, ind, 0, 20000, 3);
  EXPECT_NEAR(v.estimate, 0.25, 4 * v.stderr_);
  const CovEstimate c = mc_cov(dbl, Observable::constant(Complex(1, 0)), ind, 1, 5000, 4);
  EXPECT_NEAR(c.estimate, 0.0, 1e-12);
}
