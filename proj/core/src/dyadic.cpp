#include <algorithm>
#include <stdexcept>

#include "retlab/errors.hpp"
#include "retlab/targets.hpp"

namespace retlab {

DyadicTarget build_dyadic(const TargetFamily& family, std::uint64_t n_max) {
  family.validate();
  if (n_max == 0) throw std::invalid_argument("build_dyadic: N must be >= 1");
  const SmallRational sa = to_small(family.a);
  const unsigned long p = sa.num;
  const unsigned long q = sa.den;
  const unsigned long r = family.base;
  constexpr unsigned kGuard = 64;  // extra digits for the F_n enclosure

  DyadicTarget t;
  t.base = family.base;
  t.a = family.a;
  t.n_max = n_max;
  t.gamma.reserve(n_max);
  t.bracket.reserve(n_max);
  t.denom_exp.reserve(n_max);
  t.f_lo.reserve(n_max);
  t.f_hi.reserve(n_max);

  unsigned k = 0;
  BigInt next_bracket = ipow(r, q);  // r^{(k+1)q}
  const BigInt guard_scale = ipow(r, kGuard);
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const BigInt np = ipow(big_from_u64(n), p);
    while (next_bracket <= np) {
      ++k;
      next_bracket *= ipow(r, q);
    }
    const unsigned d = static_cast<unsigned>((2UL * k * q + p - 1) / p);
    const BigInt scale_d = ipow(r, d);
    const BigInt scale_p = scale_d * guard_scale;

    // floor(sigma r^precision) from an exact integer root; sigma is exact iff
    // n is a perfect q-th power.
    BigInt lead_p;
    bool exact = false;
    {
      const BigInt bn = big_from_u64(n);
      const BigInt m = iroot(bn, q);
      if (ipow(m, q) == bn) {
        exact = true;
      }
      BigInt quotient;
      const BigInt rpq = ipow(scale_p, q);
      mpz_fdiv_q(quotient.get_mpz_t(), rpq.get_mpz_t(), np.get_mpz_t());
      lead_p = iroot(quotient, q);
    }
    BigInt lead_d;
    mpz_fdiv_q(lead_d.get_mpz_t(), lead_p.get_mpz_t(), guard_scale.get_mpz_t());

    Rational g(BigInt(lead_d + 1), scale_d);
    g.canonicalize();
    if (g > 1) g = 1;
    if (!t.gamma.empty() && t.gamma.back() < g) g = t.gamma.back();

    Rational lo;
    Rational hi;
    if (exact) {
      const Rational sigma(BigInt(1), ipow(iroot(big_from_u64(n), q), p));
      lo = hi = g - sigma;
    } else {
      Rational s_lo(lead_p, scale_p);
      Rational s_hi(BigInt(lead_p + 1), scale_p);
      s_lo.canonicalize();
      s_hi.canonicalize();
      lo = g - s_hi;
      hi = g - s_lo;
      if (lo < 0) lo = 0;
    }
    t.gamma.push_back(g);
    t.bracket.push_back(k);
    t.denom_exp.push_back(d);
    t.f_lo.push_back(lo);
    t.f_hi.push_back(hi);
  }
  return t;
}

Enclosure f_measure_sum(const DyadicTarget& target, std::uint64_t first, std::uint64_t last) {
  if (first == 0 || last > target.n_max) throw std::out_of_range("f_measure_sum: bad range");
  Enclosure e{Rational(0), Rational(0)};
  for (std::uint64_t n = first; n <= last; ++n) {
    e.lo += target.f_lo[n - 1];
    e.hi += target.f_hi[n - 1];
  }
  return e;
}

Rational f_tail_bound(const DyadicTarget& target, std::uint64_t first, std::uint64_t last) {
  if (first == 0 || last > target.n_max) throw std::out_of_range("f_tail_bound: bad range");
  Rational sum = 0;
  for (std::uint64_t n = first; n <= last; ++n) {
    sum += Rational(BigInt(1), ipow(static_cast<unsigned long>(target.base), target.denom_exp[n - 1]));
  }
  return sum;
}

namespace {

// Measure of [0, x) intersected with J_{idx[0]} cap ... ; every J_n is
// periodic with period r^{-n}, and r^{-n'} divides r^{-n} for n' > n.
Rational joint_prefix(const DyadicTarget& t, std::span<const std::uint64_t> idx,
                      const Rational& x) {
  if (idx.empty()) return x;
  const std::uint64_t n = idx.front();
  const Rational period(BigInt(1), ipow(static_cast<unsigned long>(t.base), n));
  const Rational cell = t.gamma_at(n) * period;
  const auto rest = idx.subspan(1);
  const BigInt whole = floor(Rational(x / period));
  const Rational remainder = x - Rational(whole) * period;
  Rational out = joint_prefix(t, rest, std::min(remainder, cell));
  if (whole != 0) out += Rational(whole) * joint_prefix(t, rest, cell);
  return out;
}

}  // namespace

Rational exact_joint_measure(const DyadicTarget& target, std::span<const std::uint64_t> indices,
                             std::uint64_t max_index) {
  if (indices.empty()) throw std::invalid_argument("exact_joint_measure: no indices");
  if (indices.size() > kJointMeasureMaxSets) {
    throw SizeExceeded("exact_joint_measure: at most 4 sets");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] == 0) throw std::invalid_argument("exact_joint_measure: indices start at 1");
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw std::invalid_argument("exact_joint_measure: indices must increase");
    }
  }
  if (indices.back() > max_index) {
    throw SizeExceeded("exact_joint_measure: index " + std::to_string(indices.back()) +
                       " exceeds bound " + std::to_string(max_index));
  }
  if (indices.back() > target.n_max) {
    throw std::out_of_range("exact_joint_measure: index beyond the dyadic target");
  }
  return joint_prefix(target, indices, Rational(1));
}

}  // namespace retlab
