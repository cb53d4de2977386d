#include <cmath>
#include <stdexcept>

#include "retlab/spectral.hpp"

namespace retlab {

namespace {

template <class V>
void check_family(const std::vector<V>& v, std::uint64_t m) {
  if (v.empty()) throw std::invalid_argument("vdc: need at least one vector");
  if (m < 1 || m > v.size()) throw std::invalid_argument("vdc: need 1 <= M <= N");
  for (const auto& x : v) {
    if (x.size() != v.front().size()) throw std::invalid_argument("vdc: vectors differ in dimension");
  }
}

}  // namespace

VdcResult vdc_check(const std::vector<std::vector<double>>& v, std::uint64_t m) {
  check_family(v, m);
  const std::size_t n = v.size();
  const std::size_t d = v.front().size();
  auto dot = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += v[i][k] * v[j][k];
    return s;
  };
  VdcResult r;
  for (std::size_t k = 0; k < d; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i][k];
    r.lhs += s * s;
  }
  double diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag += dot(i, i);
  double off = 0.0;
  for (std::size_t lag = 1; lag <= m; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += dot(i + lag, i);
    off += std::abs(s);
  }
  const double scale = static_cast<double>(n) / static_cast<double>(m);
  r.rhs = 2.0 * scale * diag + 4.0 * scale * off;
  r.holds = r.lhs <= r.rhs * (1.0 + 1e-10);
  return r;
}

VdcExact vdc_check_exact(const std::vector<std::vector<long>>& v, std::uint64_t m) {
  check_family(v, m);
  const std::size_t n = v.size();
  const std::size_t d = v.front().size();
  auto dot = [&](std::size_t i, std::size_t j) {
    BigInt s = 0;
    for (std::size_t k = 0; k < d; ++k) s += BigInt(v[i][k]) * BigInt(v[j][k]);
    return s;
  };
  BigInt lhs = 0;
  for (std::size_t k = 0; k < d; ++k) {
    BigInt s = 0;
    for (std::size_t i = 0; i < n; ++i) s += v[i][k];
    lhs += s * s;
  }
  BigInt diag = 0;
  for (std::size_t i = 0; i < n; ++i) diag += dot(i, i);
  BigInt off = 0;
  for (std::size_t lag = 1; lag <= m; ++lag) {
    BigInt s = 0;
    for (std::size_t i = 0; i + lag < n; ++i) s += dot(i + lag, i);
    off += abs(s);
  }
  VdcExact r;
  r.lhs = Rational(lhs);
  r.rhs = Rational(BigInt(2 * diag + 4 * off) * big_from_u64(n), big_from_u64(m));
  r.rhs.canonicalize();
  return r;
}

}  // namespace retlab
