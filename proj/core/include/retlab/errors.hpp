#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace retlab {

/// A digit index beyond the stream's hard cap was requested.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(std::uint64_t index, std::uint64_t cap)
      : std::runtime_error("digit index " + std::to_string(index) +
                           " exceeds cap " + std::to_string(cap)),
        index_(index), cap_(cap) {}
  std::uint64_t index() const noexcept { return index_; }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t index_;
  std::uint64_t cap_;
};

/// A tail comparison was still tied when the digit cap was reached.
class Undecidable : public std::runtime_error {
 public:
  explicit Undecidable(std::uint64_t shift)
      : std::runtime_error("membership of shifted point S^" +
                           std::to_string(shift) +
                           " y is undecidable within the digit cap"),
        shift_(shift) {}
  std::uint64_t shift() const noexcept { return shift_; }

 private:
  std::uint64_t shift_;
};

class SizeExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A hypothesis of a concentration lemma does not hold for the inputs.
class ConditionViolated : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration rejected; the message names the violated hypothesis.
class ConfigInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Certified arithmetic could not resolve a value within its caps.
class PrecisionAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace retlab
