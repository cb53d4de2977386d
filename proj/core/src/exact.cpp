#include "retlab/exact.hpp"

#include <cctype>
#include <charconv>
#include <limits>
#include <stdexcept>
#include <system_error>

namespace retlab {

static_assert(sizeof(unsigned long) == 8, "retlab assumes LP64");

BigInt big_from_u64(std::uint64_t v) { return BigInt(static_cast<unsigned long>(v)); }

bool big_fits_u64(const BigInt& v) { return sgn(v) >= 0 && v.fits_ulong_p(); }

std::uint64_t big_to_u64(const BigInt& v) {
  if (!big_fits_u64(v)) throw std::overflow_error("integer does not fit in 64 bits");
  return v.get_ui();
}

BigInt ipow(const BigInt& base, unsigned long exp) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp);
  return out;
}

BigInt ipow(unsigned long base, unsigned long exp) {
  BigInt out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, exp);
  return out;
}

BigInt iroot(const BigInt& v, unsigned long k) {
  if (k == 0) throw std::invalid_argument("iroot: k must be positive");
  if (sgn(v) < 0) throw std::invalid_argument("iroot: negative radicand");
  BigInt out;
  mpz_root(out.get_mpz_t(), v.get_mpz_t(), k);
  return out;
}

BigInt floor_rational_power(std::uint64_t n, unsigned long p, unsigned long q) {
  return iroot(ipow(static_cast<unsigned long>(n), p), q);
}

BigInt floor(const Rational& x) {
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return out;
}

BigInt ceil(const Rational& x) {
  BigInt out;
  mpz_cdiv_q(out.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return out;
}

namespace {

[[noreturn]] void bad_rational(std::string_view text) {
  throw std::invalid_argument("not a rational literal: '" + std::string(text) + "'");
}

BigInt parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) bad_rational(whole);
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) bad_rational(whole);
  }
  return BigInt(std::string(digits), 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) bad_rational(text);

  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational out = num / den;
    out.canonicalize();
    return out;
  }

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    s = s.substr(0, e);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(exp_part.data(), exp_part.data() + exp_part.size(), exponent);
    if (ec != std::errc{} || ptr != exp_part.data() + exp_part.size()) bad_rational(text);
    if (exp_negative) exponent = -exponent;
  }
  std::string digits;
  long frac_len = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) bad_rational(text);
    digits = std::string(int_part) + std::string(frac_part);
    frac_len = static_cast<long>(frac_part.size());
  } else {
    digits = std::string(s);
  }
  Rational out(parse_integer(digits, text));
  const long scale = exponent - frac_len;
  if (scale > 0) out *= Rational(ipow(10UL, static_cast<unsigned long>(scale)));
  if (scale < 0) out /= Rational(ipow(10UL, static_cast<unsigned long>(-scale)));
  out.canonicalize();
  return negative ? Rational(-out) : out;
}

std::string to_fraction_string(const Rational& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

SmallRational to_small(const Rational& x) {
  Rational c = x;
  c.canonicalize();
  if (sgn(c) < 0 || !c.get_num().fits_ulong_p() || !c.get_den().fits_ulong_p()) {
    throw std::invalid_argument("rational " + to_fraction_string(x) +
                                " is negative or too large");
  }
  const unsigned long num = c.get_num().get_ui();
  const unsigned long den = c.get_den().get_ui();
  if (num > 4096 || den > 4096) {
    throw std::invalid_argument("exponent " + to_fraction_string(x) +
                                " has numerator/denominator above 4096");
  }
  return {num, den};
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

}  // namespace retlab
