#pragma once

// Ergodic averages along hitting sequences, evaluated on lacunary grids.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "retlab/systems.hpp"
#include "retlab/targets.hpp"

namespace retlab {

/// Deduplicated floor(gamma^k) <= N_max for k = 1, 2, ...; gamma > 1.
std::vector<std::uint64_t> lacunary_grid(const Rational& gamma, std::uint64_t n_max);

enum class Scheme { single, double_commuting, semi_random, two_power };
std::string to_string(Scheme s);

struct AverageTrace {
  Scheme scheme = Scheme::single;
  std::uint64_t seed = 0;
  std::uint64_t x_id = 0;
  std::vector<std::uint64_t> grid;
  std::vector<Complex> values;      // count-normalized (1 / sum X_n), or 1/N for semi-random
  std::vector<Complex> values_w;    // 1 / W_N normalized (single, two-power)
  std::vector<Complex> reference;   // per-N reference trace, when the scheme has one
  std::optional<Complex> limit;     // exact limit, when known
  bool truncated = false;           // grid cut short: fewer hits than N
};

struct LlnTrace {
  std::vector<std::uint64_t> grid;
  std::vector<double> ratio;        // sum_{n<=N} X_n / W_N
  double tail_deviation = 0.0;      // max |ratio - 1| over the second half of the grid
  bool degenerate = false;          // no hits at all
};

LlnTrace lln_check(const HittingSequence& h, const std::vector<std::uint64_t>& grid);

/// (sum_{n<=N} X_n f(T^n x)) / (sum_{n<=N} X_n), with the 1/W_N variant.
AverageTrace single_average(const HittingSequence& h, const MPSystem& sys, const Observable& f,
                            State x, const std::vector<std::uint64_t>& grid);

/// Along hits: sum_{n<=N} X_n f1(T1^n x) f2(T2^n x) / sum X_n. The reference
/// trace is the full-sequence average (1/N) sum_{n<=N} f1(T1^n x) f2(T2^n x).
AverageTrace double_average(const HittingSequence& h, const MPSystem& sys, const Observable& f1,
                            const Observable& f2, State x, const std::vector<std::uint64_t>& grid);

/// (1/N) sum_{n<=N} f1(T1^n x) f2(T2^{a_n} x). Grid points beyond the
/// number of hits are dropped and the trace flagged.
AverageTrace semi_random_average(const HittingSequence& h, const MPSystem& sys,
                                 const Observable& f1, const Observable& f2, State x,
                                 const std::vector<std::uint64_t>& grid);

struct TwoPowerResult {
  std::vector<AverageTrace> traces;  // one per x sample
  /// RMS over x of |A_{N_{k+1}}(x) - A_{N_k}(x)|, k = 0 .. grid.size() - 2.
  std::vector<double> cauchy_proxy;
};

/// sum_{n<=N} X_n f(T^n x) g(T^{floor(n^{1+b})} x) / sum X_n per x sample.
/// Throws ConditionViolated unless b + 2a < 1/2.
TwoPowerResult two_power_average(const HittingSequence& h, const MPSystem& sys,
                                 const Observable& f, const Observable& g,
                                 const std::vector<State>& xs, const Rational& b,
                                 const std::vector<std::uint64_t>& grid);

struct InteractionSum {
  std::uint64_t lags = 0;   // floor(N^b)
  std::uint64_t xx = 0;     // sum_{m<=lags} sum_{n<=N} X_{n+m} X_n
  double zz = 0.0;          // same with Z_n = X_n - sigma_n
};

/// Needs h.n_max >= N + floor(N^b).
InteractionSum interaction_sum(const HittingSequence& h, const Rational& b, std::uint64_t n);

/// CSV with columns scheme,seed,x_id,N,re,im,reference_re,reference_im.
void write_traces_csv(std::ostream& out, const std::vector<AverageTrace>& traces);

}  // namespace retlab
