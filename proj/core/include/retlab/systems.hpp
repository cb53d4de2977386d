#pragma once

// Measure-preserving test systems on the circle [0, 1) and on Z/q.
//
// Circle states are residues mod 2^128 (x = state / 2^128), so rotations
// wrap exactly and T1 T2 = T2 T1 holds bit for bit. Cyclic states are
// residues mod q.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "retlab/exact.hpp"

namespace retlab {

using u128 = unsigned __int128;
using State = u128;
using Complex = std::complex<double>;

/// Rotation number alpha = frac(rat + coef * sqrt(d)), d squarefree.
/// Rational when coef == 0 or d == 1.
struct Angle {
  Rational rat;
  Rational coef;
  unsigned long d = 1;

  static Angle rational(const Rational& v);
  static Angle golden();                      // (sqrt 5 - 1) / 2
  static Angle sqrt_frac(unsigned long d);    // frac(sqrt d)
  /// "golden", "sqrt:D" or a rational literal.
  static Angle parse(const std::string& text);
  Angle scaled(std::uint64_t p) const;

  bool is_rational() const { return coef == 0 || d == 1; }
  /// floor(alpha * 2^128) mod 2^128.
  u128 fixed128() const;
  double value() const;
  std::string describe() const;
};

/// Bounded observable: a finite character sum sum_k c_k e(kx), a table on
/// Z/q, or the indicator of an open interval (lo, hi).
class Observable {
 public:
  enum class Kind { characters, table, indicator };

  static Observable constant(Complex c, std::string id = "const");
  static Observable character(std::int64_t k, std::string id = "");
  static Observable characters(std::vector<std::pair<std::int64_t, Complex>> terms,
                               std::string id);
  static Observable table(std::vector<Complex> values, std::string id);
  static Observable indicator(const Rational& lo, const Rational& hi, std::string id = "");

  const std::string& id() const noexcept { return id_; }
  Kind kind() const noexcept { return kind_; }
  const std::vector<std::pair<std::int64_t, Complex>>& terms() const noexcept { return terms_; }
  const std::vector<Complex>& values() const noexcept { return table_; }
  const Rational& lo() const noexcept { return lo_; }
  const Rational& hi() const noexcept { return hi_; }
  /// sup |f|, taken from the representation.
  double sup_norm() const;
  /// Exact space mean under Lebesgue (circle) or counting measure (Z/q).
  std::optional<Complex> exact_mean(std::uint64_t modulus = 0) const;

  /// Value at a circle state (modulus 0 meaning 2^128) or residue mod q.
  Complex operator()(State x, std::uint64_t modulus) const;

 private:
  Kind kind_ = Kind::characters;
  std::string id_;
  std::vector<std::pair<std::int64_t, Complex>> terms_;
  std::vector<Complex> table_;
  Rational lo_;
  Rational hi_;
  u128 lo_floor_ = 0;   // floor(lo * 2^128)
  u128 hi_ceil_ = 0;    // ceil(hi * 2^128), valid when !hi_is_one_
  bool hi_is_one_ = false;
};

enum class SystemKind { circle_rotation, torus_pair, doubling, cyclic, power_pair };

class MPSystem {
 public:
  static MPSystem circle_rotation(const Angle& alpha);
  /// T1 x = x + alpha, T2 x = x + beta on the same circle.
  static MPSystem torus_pair(const Angle& alpha, const Angle& beta);
  /// S x = r x mod 1 on the 2^-128 grid.
  static MPSystem doubling(unsigned base = 2);
  /// i -> i + step mod q.
  static MPSystem cyclic(std::uint64_t q, std::uint64_t step = 1);
  /// T1 = T^p1, T2 = T^p2 for a rotation or cyclic T.
  static MPSystem power_pair(const MPSystem& base, std::uint64_t p1, std::uint64_t p2);

  SystemKind kind() const noexcept { return kind_; }
  std::string name() const;
  /// 0 means the circle (2^128); otherwise the size of the finite space.
  std::uint64_t modulus() const noexcept { return modulus_; }
  bool finite() const noexcept { return modulus_ != 0; }

  /// T1^n x (also T^n x for single-map systems).
  State iterate(State x, std::uint64_t n) const;
  State iterate2(State x, std::uint64_t n) const;

  /// Exact orbit for rational points (rational rotations, doubling, cyclic).
  std::optional<Rational> iterate_exact(const Rational& x, std::uint64_t n) const;

  /// Uniform sample from the invariant measure.
  template <class Rng>
  State sample(Rng& rng) const {
    if (finite()) return static_cast<State>(rng() % modulus_);
    const u128 hi = rng();
    return (hi << 64) | static_cast<u128>(rng());
  }
  State from_rational(const Rational& x) const;  // rounds down onto the grid
  double to_unit(State x) const;

  bool ergodic_t1() const;
  bool ergodic_t2() const;

  /// lim (1/N) sum f(T1^n x) when T1 is ergodic and the mean is declared.
  std::optional<Complex> exact_limit_single(const Observable& f) const;
  /// lim (1/N) sum f1(T1^n x) f2(T2^n x) at the point x, when known exactly.
  std::optional<Complex> exact_limit_double(const Observable& f1, const Observable& f2,
                                            State x) const;

  const Angle& alpha() const noexcept { return alpha_; }
  const Angle& beta() const noexcept { return beta_; }

 private:
  MPSystem() = default;
  State step(State x, u128 shift, std::uint64_t n) const;

  SystemKind kind_ = SystemKind::circle_rotation;
  std::uint64_t modulus_ = 0;
  Angle alpha_;
  Angle beta_;
  u128 a1_ = 0;  // per-step shift of T1 (circle: fixed point; cyclic: step)
  u128 a2_ = 0;
  unsigned base_ = 2;
  std::uint64_t step_ = 1;
  std::uint64_t p1_ = 1;
  std::uint64_t p2_ = 1;
};

/// e(t) = exp(2 pi i t) for a circle phase given as a 2^-128 fraction.
Complex expi_fixed(u128 phase);

}  // namespace retlab
