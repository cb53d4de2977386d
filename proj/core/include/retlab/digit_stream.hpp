#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "retlab/exact.hpp"

namespace retlab {

/// Open interval (lo, hi) with exact rational endpoints, 0 <= lo < hi <= 1.
class RationalInterval {
 public:
  RationalInterval(Rational lo, Rational hi);  // throws std::invalid_argument

  const Rational& lo() const noexcept { return lo_; }
  const Rational& hi() const noexcept { return hi_; }
  Rational length() const { return hi_ - lo_; }
  bool contains(const Rational& x) const { return lo_ < x && x < hi_; }

  friend bool operator==(const RationalInterval&, const RationalInterval&) = default;

 private:
  Rational lo_;
  Rational hi_;
};

/// Base-r expansion of a point y in [0, 1], generated lazily.
///
/// Digit indices are 1-based: y = sum_i d_i r^{-i}. Seeded streams draw
/// i.i.d. uniform digits from a counter-based generator keyed by (seed,
/// base), so the digit at position i never depends on how the cache was
/// grown. Explicit streams represent a rational y through its standard
/// (terminating, never eventually r-1) expansion.
///
/// A stream has a single writer; copy it to hand a snapshot to a worker.
class DigitStream {
 public:
  static constexpr std::uint64_t kDefaultMaxDigits = std::uint64_t{1} << 20;
  static constexpr unsigned kMaxBase = 256;

  static DigitStream seeded(std::uint64_t seed, unsigned base,
                            std::uint64_t max_digits = kDefaultMaxDigits);
  /// y in [0, 1]; y = 1 is treated as 0 mod 1.
  static DigitStream from_rational(const Rational& y, unsigned base,
                                   std::uint64_t max_digits = kDefaultMaxDigits);
  /// y = 0.prefix (period)(period)... in base r. An empty period means a
  /// terminating expansion.
  static DigitStream from_digits(const std::vector<std::uint8_t>& prefix,
                                 const std::vector<std::uint8_t>& period,
                                 unsigned base,
                                 std::uint64_t max_digits = kDefaultMaxDigits);

  unsigned base() const noexcept { return base_; }
  std::uint64_t max_digits() const noexcept { return max_digits_; }
  std::uint64_t cached() const noexcept { return cache_.size(); }
  bool is_seeded() const noexcept { return !value_.has_value(); }
  std::uint64_t seed() const noexcept { return seed_; }
  /// Exact y for explicit streams.
  const std::optional<Rational>& exact_value() const noexcept { return value_; }

  /// Same source and cap, empty cache.
  DigitStream fresh_copy() const;

  /// Digit d_i, i >= 1. Throws CapExceeded when i > max_digits.
  std::uint8_t digit_at(std::uint64_t i);

  /// Makes digits 1..upto available (clamped to the cap).
  void ensure(std::uint64_t upto);

  /// Digits d_first .. d_{first+count-1}; throws CapExceeded past the cap.
  std::span<const std::uint8_t> digits(std::uint64_t first, std::uint64_t count);

  /// Exact value of r^n y mod 1 (explicit streams only).
  std::optional<Rational> exact_tail(std::uint64_t n) const;

  /// Compares the tail value r^n y mod 1 (digits d_{n+1}, d_{n+2}, ...) with
  /// a rational q in [0, 1] by digit-prefix comparison. Throws Undecidable
  /// when still tied at the digit cap.
  std::strong_ordering compare_tail(std::uint64_t n, const Rational& q);

  /// True iff r^n y mod 1 lies strictly inside `target`.
  bool shifted_point_in(std::uint64_t n, const RationalInterval& target);

  /// Floating-point approximation of r^n y mod 1 from the next 64 bits worth
  /// of digits (for observables only, never for target membership).
  double tail_double(std::uint64_t n);

 private:
  DigitStream(unsigned base, std::uint64_t max_digits);
  void grow(std::uint64_t upto);

  unsigned base_;
  std::uint64_t max_digits_;
  std::uint64_t seed_ = 0;
  std::uint64_t key_ = 0;
  std::optional<Rational> value_;
  // long-division state for explicit streams
  BigInt remainder_;
  BigInt denominator_;
  std::vector<std::uint8_t> cache_;
};

}  // namespace retlab
