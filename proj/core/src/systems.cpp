#include "retlab/systems.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace retlab {

namespace {

const BigInt& two128() {
  static const BigInt v = ipow(2UL, 128);
  return v;
}

u128 to_u128(const BigInt& v) {
  BigInt r;
  mpz_fdiv_r(r.get_mpz_t(), v.get_mpz_t(), two128().get_mpz_t());
  BigInt hi;
  mpz_fdiv_q_2exp(hi.get_mpz_t(), r.get_mpz_t(), 64);
  BigInt lo;
  mpz_fdiv_r_2exp(lo.get_mpz_t(), r.get_mpz_t(), 64);
  return (static_cast<u128>(hi.get_ui()) << 64) | lo.get_ui();
}

BigInt from_u128(u128 v) {
  BigInt hi(static_cast<unsigned long>(v >> 64));
  BigInt lo(static_cast<unsigned long>(v));
  return (hi << 64) + lo;
}

bool is_squarefree(unsigned long d) {
  for (unsigned long p = 2; p * p <= d; ++p) {
    if (d % (p * p) == 0) return false;
  }
  return true;
}

u128 mulpow_mod128(unsigned base, std::uint64_t n) {
  u128 result = 1;
  u128 b = base;
  while (n != 0) {
    if (n & 1) result *= b;
    b *= b;
    n >>= 1;
  }
  return result;
}

double frac(double v) { return v - std::floor(v); }

}  // namespace

Complex expi_fixed(u128 phase) {
  const double t = static_cast<double>(static_cast<std::uint64_t>(phase >> 64)) * 0x1.0p-64;
  const double angle = 2.0 * std::numbers::pi * t;
  return {std::cos(angle), std::sin(angle)};
}

Angle Angle::rational(const Rational& v) {
  Angle a;
  a.rat = v;
  return a;
}

Angle Angle::golden() {
  Angle a;
  a.rat = Rational(-1, 2);
  a.coef = Rational(1, 2);
  a.d = 5;
  return a;
}

Angle Angle::sqrt_frac(unsigned long d) {
  if (d == 0) throw std::invalid_argument("sqrt angle needs d >= 1");
  const BigInt m = iroot(BigInt(d), 2);
  if (m * m == BigInt(d)) return rational(Rational(0));
  if (!is_squarefree(d)) throw std::invalid_argument("sqrt angle needs a squarefree d");
  Angle a;
  a.rat = Rational(-m);
  a.coef = 1;
  a.d = d;
  return a;
}

Angle Angle::parse(const std::string& text) {
  if (text == "golden") return golden();
  if (text.rfind("sqrt:", 0) == 0) return sqrt_frac(std::stoul(text.substr(5)));
  return rational(parse_rational(text));
}

Angle Angle::scaled(std::uint64_t p) const {
  Angle a = *this;
  a.rat *= Rational(big_from_u64(p));
  a.coef *= Rational(big_from_u64(p));
  return a;
}

u128 Angle::fixed128() const {
  BigInt total = floor(Rational(rat * Rational(two128())));
  if (!is_rational()) {
    const Rational c2 = coef * coef * Rational(BigInt(d)) * Rational(two128() * two128());
    const BigInt irr = iroot(floor(c2), 2);
    total += coef > 0 ? irr : BigInt(-irr - 1);
  } else if (coef != 0) {
    total += floor(Rational(coef * Rational(two128())));
  }
  return to_u128(total);
}

double Angle::value() const {
  const double v = rat.get_d() + (coef == 0 ? 0.0 : coef.get_d() * std::sqrt(static_cast<double>(d)));
  return frac(v);
}

std::string Angle::describe() const {
  if (is_rational()) return to_fraction_string(rat + coef);
  return to_fraction_string(rat) + "+" + to_fraction_string(coef) + "*sqrt(" + std::to_string(d) + ")";
}

Observable Observable::constant(Complex c, std::string id) {
  return characters({{0, c}}, std::move(id));
}

Observable Observable::character(std::int64_t k, std::string id) {
  if (id.empty()) id = "e(" + std::to_string(k) + "x)";
  return characters({{k, Complex(1.0, 0.0)}}, std::move(id));
}

Observable Observable::characters(std::vector<std::pair<std::int64_t, Complex>> terms,
                                  std::string id) {
  Observable f;
  f.kind_ = Kind::characters;
  f.id_ = std::move(id);
  f.terms_ = std::move(terms);
  if (f.sup_norm() > 1.0 + 1e-12) throw std::invalid_argument("observable '" + f.id_ + "' exceeds sup norm 1");
  return f;
}

Observable Observable::table(std::vector<Complex> values, std::string id) {
  if (values.empty()) throw std::invalid_argument("table observable needs values");
  Observable f;
  f.kind_ = Kind::table;
  f.id_ = std::move(id);
  f.table_ = std::move(values);
  if (f.sup_norm() > 1.0 + 1e-12) throw std::invalid_argument("observable '" + f.id_ + "' exceeds sup norm 1");
  return f;
}

Observable Observable::indicator(const Rational& lo, const Rational& hi, std::string id) {
  if (!(0 <= lo && lo < hi && hi <= 1)) throw std::invalid_argument("indicator needs 0 <= lo < hi <= 1");
  Observable f;
  f.kind_ = Kind::indicator;
  f.id_ = id.empty() ? "1(" + to_fraction_string(lo) + "," + to_fraction_string(hi) + ")" : std::move(id);
  f.lo_ = lo;
  f.hi_ = hi;
  f.lo_floor_ = to_u128(floor(Rational(lo * Rational(two128()))));
  f.hi_is_one_ = hi == 1;
  if (!f.hi_is_one_) f.hi_ceil_ = to_u128(ceil(Rational(hi * Rational(two128()))));
  return f;
}

double Observable::sup_norm() const {
  switch (kind_) {
    case Kind::characters: {
      double s = 0.0;
      for (const auto& [k, c] : terms_) s += std::abs(c);
      return s;
    }
    case Kind::table: {
      double s = 0.0;
      for (const auto& v : table_) s = std::max(s, std::abs(v));
      return s;
    }
    case Kind::indicator:
      return 1.0;
  }
  return 0.0;
}

std::optional<Complex> Observable::exact_mean(std::uint64_t modulus) const {
  switch (kind_) {
    case Kind::characters: {
      Complex m = 0.0;
      for (const auto& [k, c] : terms_) {
        const bool zero = modulus == 0 ? k == 0 : k % static_cast<std::int64_t>(modulus) == 0;
        if (zero) m += c;
      }
      return m;
    }
    case Kind::table: {
      if (modulus == 0 || table_.size() != modulus) return std::nullopt;
      Complex m = 0.0;
      for (const auto& v : table_) m += v;
      return m / static_cast<double>(modulus);
    }
    case Kind::indicator: {
      if (modulus == 0) return Rational(hi_ - lo_).get_d();
      std::uint64_t count = 0;
      for (std::uint64_t i = 0; i < modulus; ++i) {
        const Rational x(big_from_u64(i), big_from_u64(modulus));
        if (lo_ < x && x < hi_) ++count;
      }
      return static_cast<double>(count) / static_cast<double>(modulus);
    }
  }
  return std::nullopt;
}

Complex Observable::operator()(State x, std::uint64_t modulus) const {
  switch (kind_) {
    case Kind::characters: {
      Complex s = 0.0;
      for (const auto& [k, c] : terms_) {
        if (k == 0) {
          s += c;
        } else if (modulus == 0) {
          s += c * expi_fixed(static_cast<u128>(static_cast<__int128>(k)) * x);
        } else {
          const std::int64_t q = static_cast<std::int64_t>(modulus);
          const u128 km = static_cast<u128>(((k % q) + q) % q);
          const std::uint64_t r = static_cast<std::uint64_t>((km * x) % modulus);
          const double angle = 2.0 * std::numbers::pi * (static_cast<double>(r) / static_cast<double>(modulus));
          s += c * Complex(std::cos(angle), std::sin(angle));
        }
      }
      return s;
    }
    case Kind::table: {
      if (modulus != 0) {
        if (table_.size() != modulus) throw std::invalid_argument("table size does not match the system");
        return table_[static_cast<std::size_t>(x)];
      }
      const u128 idx = ((x >> 64) * static_cast<u128>(table_.size())) >> 64;
      return table_[static_cast<std::size_t>(idx)];
    }
    case Kind::indicator: {
      bool in;
      if (modulus == 0) {
        in = x > lo_floor_ && (hi_is_one_ || x < hi_ceil_);
      } else {
        const Rational v(from_u128(x), big_from_u64(modulus));
        in = lo_ < v && v < hi_;
      }
      return in ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

MPSystem MPSystem::circle_rotation(const Angle& alpha) {
  MPSystem s;
  s.kind_ = SystemKind::circle_rotation;
  s.alpha_ = s.beta_ = alpha;
  s.a1_ = s.a2_ = alpha.fixed128();
  return s;
}

MPSystem MPSystem::torus_pair(const Angle& alpha, const Angle& beta) {
  MPSystem s;
  s.kind_ = SystemKind::torus_pair;
  s.alpha_ = alpha;
  s.beta_ = beta;
  s.a1_ = alpha.fixed128();
  s.a2_ = beta.fixed128();
  return s;
}

MPSystem MPSystem::doubling(unsigned base) {
  if (base < 2) throw std::invalid_argument("doubling map needs base >= 2");
  MPSystem s;
  s.kind_ = SystemKind::doubling;
  s.base_ = base;
  return s;
}

MPSystem MPSystem::cyclic(std::uint64_t q, std::uint64_t step) {
  if (q == 0) throw std::invalid_argument("cyclic system needs q >= 1");
  MPSystem s;
  s.kind_ = SystemKind::cyclic;
  s.modulus_ = q;
  s.step_ = step % q;
  s.a1_ = s.a2_ = s.step_;
  return s;
}

MPSystem MPSystem::power_pair(const MPSystem& base, std::uint64_t p1, std::uint64_t p2) {
  if (base.kind_ != SystemKind::circle_rotation && base.kind_ != SystemKind::cyclic) {
    throw std::invalid_argument("power_pair needs a rotation or cyclic base system");
  }
  MPSystem s = base;
  s.kind_ = SystemKind::power_pair;
  s.p1_ = p1;
  s.p2_ = p2;
  if (base.finite()) {
    s.a1_ = (static_cast<u128>(base.step_) * (p1 % base.modulus_)) % base.modulus_;
    s.a2_ = (static_cast<u128>(base.step_) * (p2 % base.modulus_)) % base.modulus_;
  } else {
    s.alpha_ = base.alpha_.scaled(p1);
    s.beta_ = base.alpha_.scaled(p2);
    s.a1_ = base.a1_ * p1;
    s.a2_ = base.a1_ * p2;
  }
  return s;
}

std::string MPSystem::name() const {
  switch (kind_) {
    case SystemKind::circle_rotation: return "rotation(" + alpha_.describe() + ")";
    case SystemKind::torus_pair: return "torus_pair(" + alpha_.describe() + "," + beta_.describe() + ")";
    case SystemKind::doubling: return "doubling(" + std::to_string(base_) + ")";
    case SystemKind::cyclic: return "cyclic(" + std::to_string(modulus_) + ")";
    case SystemKind::power_pair: return "power_pair(" + std::to_string(p1_) + "," + std::to_string(p2_) + ")";
  }
  return "?";
}

State MPSystem::step(State x, u128 shift, std::uint64_t n) const {
  if (kind_ == SystemKind::doubling) return x * mulpow_mod128(base_, n);
  if (!finite()) return x + shift * n;
  const u128 q = modulus_;
  return (x + (shift * (n % modulus_)) % q) % q;
}

State MPSystem::iterate(State x, std::uint64_t n) const { return step(x, a1_, n); }
State MPSystem::iterate2(State x, std::uint64_t n) const { return step(x, a2_, n); }

std::optional<Rational> MPSystem::iterate_exact(const Rational& x, std::uint64_t n) const {
  auto wrap = [](const Rational& v) {
    Rational out = v - Rational(floor(v));
    return out;
  };
  switch (kind_) {
    case SystemKind::circle_rotation:
    case SystemKind::power_pair:
      if (finite()) break;
      if (!alpha_.is_rational()) return std::nullopt;
      return wrap(x + (alpha_.rat + alpha_.coef) * Rational(big_from_u64(n)));
    case SystemKind::doubling: {
      const Rational y = wrap(x);
      BigInt num;
      const BigInt r(static_cast<unsigned long>(base_));
      mpz_powm_ui(num.get_mpz_t(), r.get_mpz_t(), n, y.get_den_mpz_t());
      num *= y.get_num();
      mpz_fdiv_r(num.get_mpz_t(), num.get_mpz_t(), y.get_den_mpz_t());
      Rational out(num, y.get_den());
      out.canonicalize();
      return out;
    }
    case SystemKind::torus_pair:
      return std::nullopt;
    case SystemKind::cyclic:
      break;
  }
  if (x.get_den() != 1 || x < 0) return std::nullopt;
  return Rational(from_u128(iterate(to_u128(x.get_num()) % modulus_, n)));
}

State MPSystem::from_rational(const Rational& x) const {
  if (finite()) return to_u128(floor(x)) % modulus_;
  return to_u128(floor(Rational((x - Rational(floor(x))) * Rational(two128()))));
}

double MPSystem::to_unit(State x) const {
  if (finite()) return static_cast<double>(static_cast<std::uint64_t>(x)) / static_cast<double>(modulus_);
  return static_cast<double>(static_cast<std::uint64_t>(x >> 64)) * 0x1.0p-64;
}

bool MPSystem::ergodic_t1() const {
  switch (kind_) {
    case SystemKind::doubling: return true;
    case SystemKind::cyclic: return std::gcd(step_, modulus_) == 1 || modulus_ == 1;
    case SystemKind::power_pair:
      if (finite()) return modulus_ == 1 || std::gcd(static_cast<std::uint64_t>(a1_), modulus_) == 1;
      return p1_ != 0 && !alpha_.is_rational();
    default: return !alpha_.is_rational();
  }
}

bool MPSystem::ergodic_t2() const {
  switch (kind_) {
    case SystemKind::power_pair:
      if (finite()) return modulus_ == 1 || std::gcd(static_cast<std::uint64_t>(a2_), modulus_) == 1;
      return p2_ != 0 && !beta_.is_rational();
    case SystemKind::torus_pair: return !beta_.is_rational();
    default: return ergodic_t1();
  }
}

std::optional<Complex> MPSystem::exact_limit_single(const Observable& f) const {
  if (!ergodic_t1()) return std::nullopt;
  if (finite() && f.kind() == Observable::Kind::table && f.values().size() != modulus_) return std::nullopt;
  return f.exact_mean(modulus_);
}

namespace {

// Whether k * alpha + l * beta is an integer.
bool integral_combination(std::int64_t k, const Angle& alpha, std::int64_t l, const Angle& beta) {
  const Rational rk(BigInt(static_cast<long>(k)));
  const Rational rl(BigInt(static_cast<long>(l)));
  Rational rational_part = rk * alpha.rat + rl * beta.rat;
  Rational coef_a = alpha.is_rational() ? Rational(0) : alpha.coef;
  Rational coef_b = beta.is_rational() ? Rational(0) : beta.coef;
  if (alpha.is_rational()) rational_part += rk * alpha.coef;
  if (beta.is_rational()) rational_part += rl * beta.coef;
  if (coef_a != 0 && coef_b != 0 && alpha.d == beta.d) {
    if (rk * coef_a + rl * coef_b != 0) return false;
  } else {
    if (rk * coef_a != 0 || rl * coef_b != 0) return false;
  }
  return rational_part.get_den() == 1;
}

}  // namespace

std::optional<Complex> MPSystem::exact_limit_double(const Observable& f1, const Observable& f2,
                                                    State x) const {
  if (finite()) {
    constexpr std::uint64_t kMaxPeriod = std::uint64_t{1} << 24;
    if (modulus_ > kMaxPeriod) return std::nullopt;
    Complex sum = 0.0;
    for (std::uint64_t n = 0; n < modulus_; ++n) {
      sum += f1(iterate(x, n), modulus_) * f2(iterate2(x, n), modulus_);
    }
    return sum / static_cast<double>(modulus_);
  }
  if (kind_ == SystemKind::doubling) return std::nullopt;
  if (f1.kind() != Observable::Kind::characters || f2.kind() != Observable::Kind::characters) {
    return std::nullopt;
  }
  Complex out = 0.0;
  for (const auto& [k, c] : f1.terms()) {
    for (const auto& [l, d] : f2.terms()) {
      if (!integral_combination(k, alpha_, l, beta_)) continue;
      const std::int64_t kl = k + l;
      out += c * d * (kl == 0 ? Complex(1.0, 0.0) : expi_fixed(static_cast<u128>(static_cast<__int128>(kl)) * x));
    }
  }
  return out;
}

}  // namespace retlab
