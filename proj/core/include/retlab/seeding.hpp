#pragma once

#include <cstdint>

namespace retlab {

/// splitmix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-trial seed from (master seed, trial index).
///
/// derive_seed(m, i) = mix(mix(m + golden) ^ (i * golden2 + 1)). Each trial
/// depends only on its own index, so appending trials never perturbs the
/// seeds of existing ones.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t index) noexcept {
  const std::uint64_t m = splitmix64_mix(master + 0x9e3779b97f4a7c15ULL);
  return splitmix64_mix(m ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

/// Counter-based generator: word k of stream `key`.
constexpr std::uint64_t counter_word(std::uint64_t key,
                                     std::uint64_t counter) noexcept {
  return splitmix64_mix(key ^ splitmix64_mix(counter + 0x9e3779b97f4a7c15ULL));
}

/// Sequential splitmix64 generator, UniformRandomBitGenerator compatible.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state_);
  }
  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace retlab
