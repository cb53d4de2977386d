#include "retlab/targets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "retlab/errors.hpp"

namespace retlab {

Sampler Sampler::power(const Rational& c) {
  if (c < 1) throw std::invalid_argument("sampler exponent c must be >= 1");
  Sampler s;
  const SmallRational sc = to_small(c);
  s.exponent_ = sc.value();
  s.num_ = sc.num;
  s.den_ = sc.den;
  return s;
}

std::uint64_t Sampler::operator()(std::uint64_t n) const {
  if (!exponent_) return n;
  return big_to_u64(floor_rational_power(n, num_, den_));
}

void TargetFamily::validate() const {
  if (!(0 < a && a < 1)) throw std::invalid_argument("target exponent a must lie in (0, 1)");
  if (base < 2 || base > DigitStream::kMaxBase) {
    throw std::invalid_argument("base r must lie in [2, 256]");
  }
}

namespace {

/// Largest P with r^P <= 2^64.
unsigned word_digits(unsigned base) {
  unsigned digits = 0;
  unsigned __int128 v = 1;
  while (v * base <= (static_cast<unsigned __int128>(1) << 64)) {
    v *= base;
    ++digits;
  }
  return digits;
}

/// floor(r^P * n^{-p/q}) given rpq = r^{Pq}.
BigInt scaled_floor(std::uint64_t n, unsigned long p, unsigned long q, const BigInt& rpq) {
  const BigInt np = ipow(static_cast<unsigned long>(n), p);
  BigInt quotient;
  mpz_fdiv_q(quotient.get_mpz_t(), rpq.get_mpz_t(), np.get_mpz_t());
  return iroot(quotient, q);
}

/// If n^{-p/q} is rational returns it (n must be a perfect q-th power).
std::optional<Rational> rational_sigma(std::uint64_t n, unsigned long p, unsigned long q) {
  const BigInt bn = big_from_u64(n);
  const BigInt m = iroot(bn, q);
  if (ipow(m, q) != bn) return std::nullopt;
  return Rational(BigInt(1), ipow(m, p));
}

/// Scans digits after position `shift` for a nonzero digit.
bool tail_is_positive(DigitStream& stream, std::uint64_t shift) {
  constexpr std::uint64_t kChunk = 256;
  std::uint64_t pos = shift + 1;
  while (pos <= stream.max_digits()) {
    const std::uint64_t count = std::min(kChunk, stream.max_digits() - pos + 1);
    auto span = stream.digits(pos, count);
    for (auto d : span) {
      if (d != 0) return true;
    }
    pos += count;
    if (!stream.is_seeded() && pos - shift > 4 * kChunk) {
      return *stream.exact_tail(shift) > 0;
    }
  }
  if (!stream.is_seeded()) return *stream.exact_tail(shift) > 0;
  throw Undecidable(shift);
}

}  // namespace

Enclosure sigma_enclosure(std::uint64_t n, const Rational& a, unsigned precision, unsigned base) {
  if (n == 0) throw std::invalid_argument("sigma_enclosure: n must be positive");
  if (base < 2) throw std::invalid_argument("sigma_enclosure: base must be >= 2");
  const SmallRational sa = to_small(a);
  if (auto exact = rational_sigma(n, sa.num, sa.den)) return {*exact, *exact};
  const BigInt scale = ipow(static_cast<unsigned long>(base), precision);
  const BigInt rpq = ipow(scale, sa.den);
  const BigInt lead = scaled_floor(n, sa.num, sa.den, rpq);
  Rational lo(lead, scale);
  Rational hi(BigInt(lead + 1), scale);
  lo.canonicalize();
  hi.canonicalize();
  return {lo, hi};
}

MembershipTable MembershipTable::raw(const TargetFamily& family, std::uint64_t n_max) {
  family.validate();
  MembershipTable t;
  t.family_ = family;
  t.family_.mode = TargetMode::raw;
  t.digits_ = word_digits(family.base);
  t.powers_.resize(t.digits_);
  std::uint64_t pw = 1;
  for (unsigned i = 0; i < t.digits_; ++i) {
    t.powers_[i] = pw;
    if (i + 1 < t.digits_) pw *= family.base;
  }
  const SmallRational sa = to_small(family.a);
  const BigInt scale = ipow(static_cast<unsigned long>(family.base), t.digits_);
  const BigInt rpq = ipow(scale, sa.den);
  const double inv_scale = 1.0 / scale.get_d();

  auto exact_map = std::make_shared<std::vector<Rational>>();
  t.entries_.resize(n_max);
  t.sigma_.resize(n_max);
  std::map<std::uint64_t, std::size_t> exact_slots;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    Entry& e = t.entries_[n - 1];
    if (n == 1) {
      e.kind = Kind::full;
      t.sigma_[0] = 1.0;
      continue;
    }
    if (auto exact = rational_sigma(n, sa.num, sa.den)) {
      const BigInt scaled = floor(Rational(*exact * Rational(scale)));
      e.lead = big_to_u64(scaled);
      const bool terminates = Rational(*exact * Rational(scale)) == Rational(scaled);
      e.kind = terminates ? Kind::terminating : Kind::exact;
      t.sigma_[n - 1] = exact->get_d();
      continue;
    }
    const BigInt lead = scaled_floor(n, sa.num, sa.den, rpq);
    e.lead = big_to_u64(lead);
    e.kind = Kind::irrational;
    t.sigma_[n - 1] = static_cast<double>(e.lead) * inv_scale;
  }
  // exact sigma values for perfect powers (rare), indexed densely by n
  bool any_exact = false;
  for (const auto& e : t.entries_) any_exact |= e.kind == Kind::exact;
  if (any_exact) {
    exact_map->resize(n_max);
    for (std::uint64_t n = 2; n <= n_max; ++n) {
      if (t.entries_[n - 1].kind == Kind::exact) {
        (*exact_map)[n - 1] = *rational_sigma(n, sa.num, sa.den);
      }
    }
    t.exact_ = exact_map;
  }
  return t;
}

MembershipTable MembershipTable::dyadic(const TargetFamily& family, const DyadicTarget& target) {
  family.validate();
  if (family.base != target.base || family.a != target.a) {
    throw std::invalid_argument("dyadic target does not match the family");
  }
  MembershipTable t;
  t.family_ = family;
  t.family_.mode = TargetMode::dyadic;
  t.digits_ = word_digits(family.base);
  t.powers_.resize(t.digits_);
  std::uint64_t pw = 1;
  for (unsigned i = 0; i < t.digits_; ++i) {
    t.powers_[i] = pw;
    if (i + 1 < t.digits_) pw *= family.base;
  }
  const Rational scale(ipow(static_cast<unsigned long>(family.base), t.digits_));
  t.entries_.resize(target.n_max);
  t.sigma_.resize(target.n_max);
  for (std::uint64_t n = 1; n <= target.n_max; ++n) {
    const Rational& g = target.gamma_at(n);
    Entry& e = t.entries_[n - 1];
    t.sigma_[n - 1] = g.get_d();
    if (g == 1) {
      e.kind = Kind::full;
      continue;
    }
    const Rational scaled = g * scale;
    if (scaled.get_den() == 1) {
      e.lead = big_to_u64(scaled.get_num());
      e.kind = Kind::terminating;
    } else {
      e.kind = Kind::slow;
    }
  }
  t.exact_ = std::make_shared<const std::vector<Rational>>(target.gamma);
  return t;
}

bool MembershipTable::member(DigitStream& stream, std::uint64_t n) const {
  if (n == 0 || n > entries_.size()) throw std::out_of_range("membership index out of table range");
  const Entry& e = entries_[n - 1];
  const std::uint64_t shift = family_.phi(n);
  if (e.kind == Kind::full) return tail_is_positive(stream, shift);
  if (e.kind == Kind::slow || shift + digits_ > stream.max_digits()) {
    return slow_member(stream, n, shift);
  }

  const auto tail = stream.digits(shift + 1, digits_);
  const unsigned r = family_.base;
  bool nonzero = false;
  for (unsigned i = 0; i < digits_; ++i) {
    const unsigned td = tail[i];
    const unsigned ld = r == 2 ? static_cast<unsigned>((e.lead >> (digits_ - 1 - i)) & 1U)
                               : static_cast<unsigned>((e.lead / powers_[digits_ - 1 - i]) % r);
    if (td < ld) {
      // tail < sigma_n; the open target also needs tail > 0
      if (nonzero || td != 0) return true;
      return tail_is_positive(stream, shift + i + 1);
    }
    if (td > ld) return false;
    nonzero |= td != 0;
  }
  if (e.kind == Kind::terminating) return false;
  return slow_member(stream, n, shift);
}

bool MembershipTable::slow_member(DigitStream& stream, std::uint64_t n, std::uint64_t shift) const {
  const Entry& e = entries_[n - 1];
  if (e.kind != Kind::irrational) {
    const Rational& value = (*exact_)[n - 1];
    if (stream.compare_tail(shift, value) != std::strong_ordering::less) return false;
    return tail_is_positive(stream, shift);
  }

  if (!stream.is_seeded()) {
    // rational tail against an irrational threshold: refine until separated
    const Rational tail = *stream.exact_tail(shift);
    if (tail == 0) return false;
    for (unsigned precision = digits_ + 64;; precision += 64) {
      const Enclosure enc = sigma_enclosure(n, family_.a, precision, family_.base);
      if (tail <= enc.lo) return true;
      if (tail >= enc.hi) return false;
    }
  }

  const BigInt r(static_cast<unsigned long>(family_.base));
  for (unsigned precision = digits_ + 64; shift + precision <= stream.max_digits();
       precision += 64) {
    const Enclosure enc = sigma_enclosure(n, family_.a, precision, family_.base);
    const BigInt scale = ipow(static_cast<unsigned long>(family_.base), precision);
    const BigInt lead = enc.lo.get_num() * (scale / enc.lo.get_den());
    BigInt window = 0;
    bool nonzero = false;
    for (auto d : stream.digits(shift + 1, precision)) {
      window = window * r + d;
      nonzero |= d != 0;
    }
    if (window + 1 <= lead) return nonzero || tail_is_positive(stream, shift + precision);
    if (window >= lead + 1) return false;
  }
  throw Undecidable(shift);
}

std::uint64_t HittingSequence::count_upto(std::uint64_t n) const {
  return static_cast<std::uint64_t>(
      std::upper_bound(hits.begin(), hits.end(), n) - hits.begin());
}

HittingSequence build_hitting(DigitStream& stream, const MembershipTable& table,
                              std::uint64_t n_max, std::uint64_t stop_after_hits) {
  if (n_max == 0) throw std::invalid_argument("build_hitting: N must be >= 1");
  if (n_max > table.size()) throw std::invalid_argument("build_hitting: N exceeds table size");
  if (stream.base() != table.family().base) {
    throw std::invalid_argument("build_hitting: stream base differs from family base");
  }
  HittingSequence h;
  h.family = table.family();
  h.x.reserve(n_max);
  h.sigma.reserve(n_max);
  h.w.reserve(n_max);

  // Neumaier-compensated running sum of sigma_n
  double sum = 0.0;
  double comp = 0.0;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    bool in = false;
    try {
      in = table.member(stream, n);
    } catch (const Undecidable&) {
      h.undecided.push_back(n);
    }
    const double s = table.sigma(n);
    const double t = sum + s;
    comp += std::abs(sum) >= std::abs(s) ? (sum - t) + s : (s - t) + sum;
    sum = t;
    h.x.push_back(in ? 1 : 0);
    h.sigma.push_back(s);
    h.w.push_back(sum + comp);
    if (in) h.hits.push_back(n);
    h.n_max = n;
    if (stop_after_hits != 0 && h.hits.size() >= stop_after_hits) break;
  }
  return h;
}

HittingSequence build_hitting(DigitStream& stream, const TargetFamily& family,
                              std::uint64_t n_max) {
  if (family.mode == TargetMode::dyadic) {
    const DyadicTarget target = build_dyadic(family, n_max);
    return build_hitting(stream, MembershipTable::dyadic(family, target), n_max);
  }
  return build_hitting(stream, MembershipTable::raw(family, n_max), n_max);
}

SymmDiffResult symm_diff_count(DigitStream& stream, const MembershipTable& raw,
                               const MembershipTable& dyadic, const DyadicTarget& target,
                               std::uint64_t n_max, std::span<const std::uint64_t> checkpoints) {
  if (n_max > raw.size() || n_max > dyadic.size() || n_max > target.n_max) {
    throw std::invalid_argument("symm_diff_count: N exceeds table size");
  }
  SymmDiffResult out;
  std::vector<std::uint64_t> cps(checkpoints.begin(), checkpoints.end());
  std::sort(cps.begin(), cps.end());
  std::size_t next_cp = 0;
  while (next_cp < cps.size() && cps[next_cp] == 0) {
    out.checkpoint_counts.push_back(0);
    ++next_cp;
  }
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    try {
      const bool x = raw.member(stream, n);
      const bool xd = dyadic.member(stream, n);
      if (x != xd) {
        ++out.count;
        out.positions.push_back(n);
      }
    } catch (const Undecidable&) {
      ++out.undecided;
    }
    while (next_cp < cps.size() && cps[next_cp] == n) {
      out.checkpoint_counts.push_back(out.count);
      ++next_cp;
    }
  }
  out.f_sum = f_measure_sum(target, 1, n_max);
  return out;
}

SymmDiffResult symm_diff_count(DigitStream& stream, const TargetFamily& family,
                               const DyadicTarget& target, std::uint64_t n_max) {
  TargetFamily raw_family = family;
  raw_family.mode = TargetMode::raw;
  TargetFamily dy_family = family;
  dy_family.mode = TargetMode::dyadic;
  return symm_diff_count(stream, MembershipTable::raw(raw_family, n_max),
                         MembershipTable::dyadic(dy_family, target), target, n_max);
}

}  // namespace retlab
