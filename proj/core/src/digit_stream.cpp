#include "retlab/digit_stream.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "retlab/errors.hpp"
#include "retlab/seeding.hpp"

namespace retlab {

RationalInterval::RationalInterval(Rational lo, Rational hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  lo_.canonicalize();
  hi_.canonicalize();
  if (!(0 <= lo_ && lo_ < hi_ && hi_ <= 1)) {
    throw std::invalid_argument("RationalInterval requires 0 <= lo < hi <= 1, got (" +
                                to_fraction_string(lo_) + ", " + to_fraction_string(hi_) + ")");
  }
}

DigitStream::DigitStream(unsigned base, std::uint64_t max_digits)
    : base_(base), max_digits_(max_digits) {
  if (base < 2 || base > kMaxBase) {
    throw std::invalid_argument("digit base must lie in [2, 256]");
  }
  if (max_digits == 0) throw std::invalid_argument("max_digits must be positive");
}

DigitStream DigitStream::seeded(std::uint64_t seed, unsigned base, std::uint64_t max_digits) {
  DigitStream s(base, max_digits);
  s.seed_ = seed;
  s.key_ = splitmix64_mix(seed ^ (std::uint64_t{base} << 48) ^ 0x5851f42d4c957f2dULL);
  return s;
}

DigitStream DigitStream::from_rational(const Rational& y, unsigned base, std::uint64_t max_digits) {
  Rational v = y;
  v.canonicalize();
  if (v < 0 || v > 1) throw std::invalid_argument("explicit point must lie in [0, 1]");
  if (v == 1) v = 0;
  DigitStream s(base, max_digits);
  s.value_ = v;
  s.remainder_ = v.get_num();
  s.denominator_ = v.get_den();
  return s;
}

DigitStream DigitStream::from_digits(const std::vector<std::uint8_t>& prefix,
                                     const std::vector<std::uint8_t>& period, unsigned base,
                                     std::uint64_t max_digits) {
  auto as_integer = [base](const std::vector<std::uint8_t>& ds) {
    BigInt v = 0;
    for (auto d : ds) {
      if (d >= base) throw std::invalid_argument("digit out of range for base");
      v = v * base + d;
    }
    return v;
  };
  const BigInt head = as_integer(prefix);
  const BigInt scale = ipow(static_cast<unsigned long>(base), prefix.size());
  Rational y(head, scale);
  if (!period.empty()) {
    const BigInt cycle = as_integer(period);
    const BigInt cycle_den = ipow(static_cast<unsigned long>(base), period.size()) - 1;
    y += Rational(cycle, BigInt(scale * cycle_den));
  }
  y.canonicalize();
  return from_rational(y, base, max_digits);
}

DigitStream DigitStream::fresh_copy() const {
  DigitStream s(base_, max_digits_);
  s.seed_ = seed_;
  s.key_ = key_;
  s.value_ = value_;
  if (value_) {
    s.remainder_ = value_->get_num();
    s.denominator_ = value_->get_den();
  }
  return s;
}

void DigitStream::grow(std::uint64_t upto) {
  upto = std::min(upto, max_digits_);
  if (upto <= cache_.size()) return;
  // grow geometrically in whole 64-digit blocks
  std::uint64_t target = std::max<std::uint64_t>(upto, cache_.size() + cache_.size() / 2);
  target = std::min(max_digits_, (target + 63) / 64 * 64);
  const std::uint64_t start = cache_.size();
  cache_.resize(target);

  if (value_) {
    BigInt next;
    for (std::uint64_t j = start; j < target; ++j) {
      if (remainder_ == 0) {
        std::fill(cache_.begin() + static_cast<std::ptrdiff_t>(j), cache_.end(), 0);
        break;
      }
      remainder_ *= base_;
      mpz_fdiv_qr(next.get_mpz_t(), remainder_.get_mpz_t(), remainder_.get_mpz_t(),
                  denominator_.get_mpz_t());
      cache_[j] = static_cast<std::uint8_t>(next.get_ui());
    }
    return;
  }

  if (std::has_single_bit(base_)) {
    const unsigned bits = static_cast<unsigned>(std::countr_zero(base_));
    const unsigned per_word = 64 / bits;
    const std::uint64_t mask = base_ - 1;
    for (std::uint64_t j = start; j < target;) {
      const std::uint64_t word_index = j / per_word;
      const std::uint64_t word = counter_word(key_, word_index);
      for (unsigned pos = static_cast<unsigned>(j % per_word); pos < per_word && j < target;
           ++pos, ++j) {
        cache_[j] = static_cast<std::uint8_t>((word >> (64 - bits * (pos + 1))) & mask);
      }
    }
    return;
  }

  // rejection sampling keeps non power-of-two bases exactly uniform
  const std::uint64_t limit = (~std::uint64_t{0} / base_) * base_;
  for (std::uint64_t j = start; j < target; ++j) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      const std::uint64_t x = counter_word(key_, (j << 8) + attempt);
      if (x < limit) {
        cache_[j] = static_cast<std::uint8_t>(x % base_);
        break;
      }
    }
  }
}

void DigitStream::ensure(std::uint64_t upto) { grow(upto); }

std::uint8_t DigitStream::digit_at(std::uint64_t i) {
  if (i == 0) throw std::invalid_argument("digit indices start at 1");
  if (i > max_digits_) throw CapExceeded(i, max_digits_);
  if (i > cache_.size()) grow(i);
  return cache_[i - 1];
}

std::span<const std::uint8_t> DigitStream::digits(std::uint64_t first, std::uint64_t count) {
  if (first == 0) throw std::invalid_argument("digit indices start at 1");
  if (count == 0) return {};
  const std::uint64_t last = first + count - 1;
  if (last > max_digits_) throw CapExceeded(last, max_digits_);
  if (last > cache_.size()) grow(last);
  return {cache_.data() + (first - 1), count};
}

std::optional<Rational> DigitStream::exact_tail(std::uint64_t n) const {
  if (!value_) return std::nullopt;
  const BigInt& q = value_->get_den();
  BigInt pw;
  const BigInt r(static_cast<unsigned long>(base_));
  const BigInt e(static_cast<unsigned long>(n));
  mpz_powm(pw.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), q.get_mpz_t());
  BigInt num = (pw * value_->get_num()) % q;
  Rational out(num, q);
  out.canonicalize();
  return out;
}

std::strong_ordering DigitStream::compare_tail(std::uint64_t n, const Rational& q_in) {
  Rational q = q_in;
  q.canonicalize();
  if (q < 0 || q > 1) throw std::invalid_argument("compare_tail: q must lie in [0, 1]");
  // a standard expansion never reaches 1
  if (q == 1) return std::strong_ordering::less;
  if (n >= max_digits_) throw CapExceeded(n + 1, max_digits_);

  BigInt rem = q.get_num();
  const BigInt& den = q.get_den();
  BigInt qd;
  constexpr std::uint64_t kTieProbe = 256;

  for (std::uint64_t i = n + 1;; ++i) {
    if (i > max_digits_) {
      if (value_) return cmp(*exact_tail(n), q) <=> 0;
      throw Undecidable(n);
    }
    const unsigned td = digit_at(i);
    unsigned qdig = 0;
    if (rem != 0) {
      rem *= base_;
      mpz_fdiv_qr(qd.get_mpz_t(), rem.get_mpz_t(), rem.get_mpz_t(), den.get_mpz_t());
      qdig = static_cast<unsigned>(qd.get_ui());
    }
    if (td != qdig) return td < qdig ? std::strong_ordering::less : std::strong_ordering::greater;
    // long ties only happen for explicit (rational) streams matching q
    if (value_ && (i - n) % kTieProbe == 0) {
      const Rational tail = *exact_tail(n);
      if (tail == q) return std::strong_ordering::equal;
    }
  }
}

bool DigitStream::shifted_point_in(std::uint64_t n, const RationalInterval& target) {
  if (compare_tail(n, target.lo()) != std::strong_ordering::greater) return false;
  return compare_tail(n, target.hi()) == std::strong_ordering::less;
}

double DigitStream::tail_double(std::uint64_t n) {
  const double inv = 1.0 / base_;
  const unsigned count =
      static_cast<unsigned>(std::min<std::uint64_t>(max_digits_ - std::min(n, max_digits_),
                                                    64 / std::bit_width(base_ - 1) + 1));
  double value = 0.0;
  double scale = inv;
  for (unsigned i = 1; i <= count; ++i) {
    value += digit_at(n + i) * scale;
    scale *= inv;
  }
  return value;
}

}  // namespace retlab
