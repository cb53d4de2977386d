#pragma once

// Index-set partitions of [N] = {1, ..., N}.

#include <cstdint>
#include <map>
#include <vector>

#include "retlab/exact.hpp"

namespace retlab {

struct ResidueClasses {
  std::uint64_t modulus = 1;  // R, the smallest integer with R > 2 ln N
  std::vector<std::vector<std::uint64_t>> classes;  // classes[k-1] = {n <= N : n = k mod R}
};

ResidueClasses residue_classes(std::uint64_t n_max);

/// Alternating blocks of length m: Lambda_1 holds n with ceil(n/m) odd.
struct LambdaSets {
  std::vector<std::uint64_t> first;
  std::vector<std::uint64_t> second;
};

LambdaSets lambda_sets(std::uint64_t m, std::uint64_t n_max);

/// S_{m,r} = {n <= N : floor((n+m)^{1+b}) - floor(n^{1+b}) = r}, keyed by r.
/// Powers are exact integer roots, so no class assignment is ever ambiguous.
std::map<std::uint64_t, std::vector<std::uint64_t>> partition_smr(std::uint64_t m, const Rational& b,
                                                                 std::uint64_t n_max);

}  // namespace retlab
