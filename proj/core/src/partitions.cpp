#include "retlab/partitions.hpp"

#include <cmath>
#include <stdexcept>

namespace retlab {

ResidueClasses residue_classes(std::uint64_t n_max) {
  if (n_max == 0) throw std::invalid_argument("residue_classes: N must be >= 1");
  ResidueClasses out;
  out.modulus = static_cast<std::uint64_t>(std::floor(2.0 * std::log(static_cast<double>(n_max)))) + 1;
  out.classes.resize(out.modulus);
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const std::uint64_t k = (n - 1) % out.modulus;
    out.classes[k].push_back(n);
  }
  return out;
}

LambdaSets lambda_sets(std::uint64_t m, std::uint64_t n_max) {
  if (m == 0) throw std::invalid_argument("lambda_sets: m must be >= 1");
  LambdaSets out;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    (((n - 1) / m) % 2 == 0 ? out.first : out.second).push_back(n);
  }
  return out;
}

std::map<std::uint64_t, std::vector<std::uint64_t>> partition_smr(std::uint64_t m, const Rational& b,
                                                                 std::uint64_t n_max) {
  if (m == 0) throw std::invalid_argument("partition_smr: m must be >= 1");
  if (!(0 < b && b < 1)) throw std::invalid_argument("partition_smr: b must lie in (0, 1)");
  const SmallRational sb = to_small(b);
  const unsigned long num = sb.num + sb.den;
  std::map<std::uint64_t, std::vector<std::uint64_t>> out;
  std::vector<BigInt> powers(n_max + m + 1);
  for (std::uint64_t n = 1; n <= n_max + m; ++n) {
    powers[n] = floor_rational_power(n, num, sb.den);
  }
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    out[big_to_u64(BigInt(powers[n + m] - powers[n]))].push_back(n);
  }
  return out;
}

}  // namespace retlab
