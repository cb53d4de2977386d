#pragma once

// Exact integer and rational helpers on top of GMP.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace retlab {

using BigInt = mpz_class;
using Rational = mpq_class;

BigInt big_from_u64(std::uint64_t v);
std::uint64_t big_to_u64(const BigInt& v);  // throws std::overflow_error
bool big_fits_u64(const BigInt& v);

BigInt ipow(const BigInt& base, unsigned long exp);
BigInt ipow(unsigned long base, unsigned long exp);

/// floor(v^(1/k)) for v >= 0, k >= 1.
BigInt iroot(const BigInt& v, unsigned long k);

/// floor(n^(p/q)) exactly, p >= 0, q >= 1.
BigInt floor_rational_power(std::uint64_t n, unsigned long p, unsigned long q);

BigInt floor(const Rational& x);
BigInt ceil(const Rational& x);

/// Parses "3/7", "0.4", "-1.25e-2" or "12" into an exact rational.
Rational parse_rational(std::string_view text);

/// "p/q" (or "p" when q == 1).
std::string to_fraction_string(const Rational& x);

/// Exponent a = p/q with 0 < a and gcd(p, q) = 1, numerator and
/// denominator small enough for machine integers.
struct SmallRational {
  unsigned long num = 0;
  unsigned long den = 1;
  Rational value() const { return Rational(num, den); }
};
SmallRational to_small(const Rational& x);  // throws std::invalid_argument

/// Shortest round-trip decimal for a double.
std::string format_double(double v);

}  // namespace retlab
