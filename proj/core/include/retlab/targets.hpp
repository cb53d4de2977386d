#pragma once

// Shrinking targets (0, n^{-a}), hitting indicators X_n, and the increasing
// return-time sequence a_1(y) < a_2(y) < ... built from them.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "retlab/digit_stream.hpp"
#include "retlab/exact.hpp"

namespace retlab {

/// Monotone index map n -> phi(n) choosing which iterate S^{phi(n)} y is tested.
class Sampler {
 public:
  static Sampler identity() { return Sampler(); }
  /// phi(n) = floor(n^c) for a rational c >= 1.
  static Sampler power(const Rational& c);

  std::uint64_t operator()(std::uint64_t n) const;
  bool is_identity() const noexcept { return !exponent_.has_value(); }
  const std::optional<Rational>& exponent() const noexcept { return exponent_; }

 private:
  std::optional<Rational> exponent_;
  unsigned long num_ = 1;
  unsigned long den_ = 1;
};

enum class TargetMode { raw, dyadic };

struct TargetFamily {
  Rational a;        // target exponent, 0 < a < 1
  unsigned base = 2;  // r
  Sampler phi = Sampler::identity();
  TargetMode mode = TargetMode::raw;

  void validate() const;  // throws std::invalid_argument
};

/// Closed rational bracket; lo == hi means the value is known exactly.
struct Enclosure {
  Rational lo;
  Rational hi;
  bool exact() const { return lo == hi; }
  Rational width() const { return hi - lo; }
};

/// Certified enclosure of n^{-a} of width at most r^{-precision}.
/// Exact (lo == hi) exactly when n^{-a} is rational.
Enclosure sigma_enclosure(std::uint64_t n, const Rational& a, unsigned precision,
                          unsigned base = 2);

struct DyadicTarget;

/// Per-index thresholds answering "is r^{phi(n)} y mod 1 in (0, sigma_n)?".
///
/// Built once per (family, N) and shared read-only between seeds. Each entry
/// keeps the leading base-r digits of sigma_n in a machine word; the rare
/// ties on those digits fall back to exact comparison.
class MembershipTable {
 public:
  static MembershipTable raw(const TargetFamily& family, std::uint64_t n_max);
  static MembershipTable dyadic(const TargetFamily& family, const DyadicTarget& target);

  const TargetFamily& family() const noexcept { return family_; }
  std::uint64_t size() const noexcept { return entries_.size(); }
  /// sigma_n as a double (n >= 1).
  double sigma(std::uint64_t n) const { return sigma_[n - 1]; }
  std::span<const double> sigmas() const noexcept { return sigma_; }

  /// Decides membership of S^{phi(n)} y in (0, sigma_n). Throws Undecidable.
  bool member(DigitStream& stream, std::uint64_t n) const;

 private:
  enum class Kind : std::uint8_t { full, irrational, exact, terminating, slow };
  struct Entry {
    std::uint64_t lead = 0;  // floor(sigma_n * r^digits)
    Kind kind = Kind::irrational;
  };

  MembershipTable() = default;
  bool slow_member(DigitStream& stream, std::uint64_t n, std::uint64_t shift) const;

  TargetFamily family_;
  unsigned digits_ = 64;                 // base-r digits held in `lead`
  std::vector<std::uint64_t> powers_;    // r^0 .. r^digits_-1
  std::vector<Entry> entries_;
  std::vector<double> sigma_;
  std::shared_ptr<const std::vector<Rational>> exact_;  // exact sigma_n, when known
};

/// X_n, sigma_n, W_N and a_n(y) for n = 1..N.
struct HittingSequence {
  TargetFamily family;
  std::uint64_t n_max = 0;
  std::vector<std::uint8_t> x;          // x[n-1] = X_n
  std::vector<double> sigma;            // sigma[n-1] = sigma_n
  std::vector<double> w;                // w[n-1] = W_n = sum_{k<=n} sigma_k
  std::vector<std::uint64_t> hits;      // a_1 < a_2 < ...
  std::vector<std::uint64_t> undecided;  // indices whose membership was undecidable

  std::uint8_t X(std::uint64_t n) const { return x[n - 1]; }
  double W(std::uint64_t n) const { return n == 0 ? 0.0 : w[n - 1]; }
  /// Z_n = X_n - sigma_n.
  double Z(std::uint64_t n) const { return x[n - 1] - sigma[n - 1]; }
  /// sum_{k<=n} X_k.
  std::uint64_t count_upto(std::uint64_t n) const;
};

/// Builds X_1..X_N. When `stop_after_hits` is non-zero the build stops at
/// the first n where that many hits have been seen (n_max is then that n).
/// Undecidable memberships are recorded and counted as X_n = 0.
HittingSequence build_hitting(DigitStream& stream, const MembershipTable& table,
                              std::uint64_t n_max, std::uint64_t stop_after_hits = 0);
HittingSequence build_hitting(DigitStream& stream, const TargetFamily& family,
                              std::uint64_t n_max);

/// Exact r-adic approximations gamma_n > n^{-a} and the sets
/// J_n = {y : r^n y mod 1 in (0, gamma_n)}.
struct DyadicTarget {
  unsigned base = 2;
  Rational a;
  std::uint64_t n_max = 0;
  std::vector<Rational> gamma;       // gamma[n-1]
  std::vector<unsigned> bracket;     // k with r^{-(k+1)} < n^{-a} <= r^{-k}
  std::vector<unsigned> denom_exp;   // D = ceil(2k/a); gamma_n * r^D is an integer
  std::vector<Rational> f_lo;        // enclosure of lambda(F_n) = gamma_n - n^{-a}
  std::vector<Rational> f_hi;

  const Rational& gamma_at(std::uint64_t n) const { return gamma[n - 1]; }
};

DyadicTarget build_dyadic(const TargetFamily& family, std::uint64_t n_max);

/// Enclosure of sum_{n=first}^{last} lambda(F_n).
Enclosure f_measure_sum(const DyadicTarget& target, std::uint64_t first, std::uint64_t last);
/// sum_{n=first}^{last} r^{-D_n}, the per-index bound on lambda(F_n).
Rational f_tail_bound(const DyadicTarget& target, std::uint64_t first, std::uint64_t last);

inline constexpr std::uint64_t kJointMeasureMaxIndex = 64;
inline constexpr std::size_t kJointMeasureMaxSets = 4;

/// lambda(J_{n_1} cap ... cap J_{n_k}) computed exactly, using that the
/// intersection is periodic with period r^{-n_1}. Throws SizeExceeded when
/// k > 4 or n_k exceeds `max_index`.
Rational exact_joint_measure(const DyadicTarget& target, std::span<const std::uint64_t> indices,
                             std::uint64_t max_index = kJointMeasureMaxIndex);

struct SymmDiffResult {
  std::uint64_t count = 0;                 // |{n <= N : X_n != X'_n}|
  std::vector<std::uint64_t> positions;
  std::vector<std::uint64_t> checkpoint_counts;  // count restricted to n <= checkpoint
  Enclosure f_sum;                         // sum_{n<=N} lambda(F_n)
  std::uint64_t undecided = 0;
};

/// Compares hitting along (0, n^{-a}) with hitting along (0, gamma_n).
SymmDiffResult symm_diff_count(DigitStream& stream, const MembershipTable& raw,
                               const MembershipTable& dyadic, const DyadicTarget& target,
                               std::uint64_t n_max,
                               std::span<const std::uint64_t> checkpoints = {});
SymmDiffResult symm_diff_count(DigitStream& stream, const TargetFamily& family,
                               const DyadicTarget& target, std::uint64_t n_max);

}  // namespace retlab
