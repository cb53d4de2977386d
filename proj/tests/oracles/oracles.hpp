#pragma once

// Slow, independent reference computations used by the unit and acceptance
// tests. Nothing here calls into the library's algorithms; only the plain
// BigInt/Rational types are shared.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "retlab/exact.hpp"

namespace oracle {

using retlab::BigInt;
using retlab::Rational;

/// Is x^q < n^{-p}, i.e. x < n^{-p/q}, for a rational x >= 0? Exact.
inline bool below_power(const Rational& x, std::uint64_t n, unsigned long p, unsigned long q) {
  if (x <= 0) return false;
  // x^q n^p < 1  <=>  num^q n^p < den^q
  BigInt lhs, rhs, nn;
  mpz_pow_ui(lhs.get_mpz_t(), x.get_num().get_mpz_t(), q);
  nn = static_cast<unsigned long>(n);
  BigInt np;
  mpz_pow_ui(np.get_mpz_t(), nn.get_mpz_t(), p);
  lhs *= np;
  mpz_pow_ui(rhs.get_mpz_t(), x.get_den().get_mpz_t(), q);
  return lhs < rhs;
}

/// frac(r^n y) for rational y.
inline Rational shifted(const Rational& y, unsigned base, std::uint64_t n) {
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), base, n);
  Rational t = y * Rational(scale);
  BigInt fl;
  mpz_fdiv_q(fl.get_mpz_t(), t.get_num().get_mpz_t(), t.get_den().get_mpz_t());
  t -= Rational(fl);
  return t;
}

/// lambda of {y : r^{n_i} y mod 1 in (0, g_i) for all i} by counting cells
/// of width r^{-L}, where every g_i r^{L - n_i} is an integer so each cell
/// is entirely inside or outside.
inline Rational brute_joint_measure(const std::vector<std::uint64_t>& idx, const std::vector<Rational>& g,
                                    unsigned base, unsigned levels) {
  std::uint64_t cells = 1;
  for (unsigned i = 0; i < levels; ++i) cells *= base;
  std::vector<std::uint64_t> bound(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    Rational v = g[i] * Rational(BigInt(static_cast<unsigned long>(cells)));
    if (v.get_den() != 1) throw std::logic_error("levels too small for the targets");
    bound[i] = v.get_num().get_ui();
  }
  std::vector<std::uint64_t> mult(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::uint64_t m = 1;
    for (std::uint64_t k = 0; k < idx[i]; ++k) m = (m * base) % cells;
    mult[i] = m;
  }
  std::uint64_t count = 0;
  for (std::uint64_t c = 0; c < cells; ++c) {
    bool in = true;
    for (std::size_t i = 0; in && i < idx.size(); ++i) {
      const unsigned __int128 pos = static_cast<unsigned __int128>(c) * mult[i] % cells;
      in = pos < bound[i];
    }
    count += in;
  }
  Rational out(BigInt(static_cast<unsigned long>(count)), BigInt(static_cast<unsigned long>(cells)));
  out.canonicalize();
  return out;
}

/// max |sum z_n e(s_n j / points)| over j, by direct incremental rotation.
inline double dense_sup(const std::vector<double>& z, const std::vector<std::uint64_t>& s, std::uint64_t points) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  std::vector<std::complex<double>> acc(points);
  for (std::size_t k = 0; k < z.size(); ++k) {
    // restart the recurrence every 4096 steps to keep rounding drift tiny
    const std::uint64_t step = s[k] % points;
    for (std::uint64_t j0 = 0; j0 < points; j0 += 4096) {
      const double base_phase = two_pi * static_cast<double>((step * j0) % points) / static_cast<double>(points);
      std::complex<double> w(std::cos(base_phase), std::sin(base_phase));
      const double dphi = two_pi * static_cast<double>(step) / static_cast<double>(points);
      const std::complex<double> rot(std::cos(dphi), std::sin(dphi));
      const std::uint64_t end = std::min(points, j0 + 4096);
      for (std::uint64_t j = j0; j < end; ++j) {
        acc[j] += z[k] * w;
        w *= rot;
      }
    }
  }
  double best = 0.0;
  for (const auto& v : acc) best = std::max(best, std::abs(v));
  return best;
}

/// Cov(1_I, 1_J o S^m) for S y = r y mod 1 by exact cell counting: with
/// I, J endpoints having denominators dividing r^k, cells of width r^{-(m+k)}
/// are each inside or outside both sets.
inline Rational brute_cov(const Rational& ilo, const Rational& ihi, const Rational& jlo, const Rational& jhi,
                          unsigned m, unsigned k, unsigned base) {
  std::uint64_t cells = 1;
  for (unsigned i = 0; i < m + k; ++i) cells *= base;
  std::uint64_t shift = 1;
  for (unsigned i = 0; i < m; ++i) shift *= base;
  const Rational c(BigInt(static_cast<unsigned long>(cells)));
  std::uint64_t both = 0, in_i = 0, in_j = 0;
  for (std::uint64_t cell = 0; cell < cells; ++cell) {
    const Rational mid = (Rational(BigInt(static_cast<unsigned long>(cell))) + Rational(1, 2)) / c;
    const bool a = ilo < mid && mid < ihi;
    Rational im(BigInt(static_cast<unsigned long>(2 * ((cell * shift) % cells) + shift)), BigInt(2ul * cells));
    im.canonicalize();
    const bool b = jlo < im && im < jhi;
    both += a && b;
    in_i += a;
    in_j += b;
  }
  return Rational(BigInt(static_cast<unsigned long>(both))) / c -
         Rational(BigInt(static_cast<unsigned long>(in_i))) / c * (Rational(BigInt(static_cast<unsigned long>(in_j))) / c);
}

}  // namespace oracle
