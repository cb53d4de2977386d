#pragma once

// Exponential sums P(t) = sum_n Z_n e(s(n) t): certified suprema,
// concentration trials, the van der Corput inequality and covariances of
// the base-r shift.

#include <cstdint>
#include <string>
#include <vector>

#include "retlab/digit_stream.hpp"
#include "retlab/exact.hpp"
#include "retlab/systems.hpp"

namespace retlab {

struct SupOptions {
  double tol = 1e-3;
  /// Largest FFT grid (complex points) a bracket may use.
  std::uint64_t max_grid = std::uint64_t{1} << 24;
  /// Direct evaluations allowed per branch-and-bound round.
  std::uint64_t max_evals = 1 << 16;
};

struct ExpSumProfile {
  std::uint64_t grid_size = 0;
  double grid_max = 0.0;         // max |P| over the FFT grid
  double grid_mean_square = 0.0; // mean |P|^2 over the FFT grid
  double sup_lo = 0.0;           // sup_lo <= sup |P| <= sup_hi
  double sup_hi = 0.0;
  double argmax = 0.0;           // t attaining sup_lo
  double tol = 0.0;
  bool met_tol = false;
  double lipschitz = 0.0;        // 2 pi max s sum |Z|
  std::uint64_t evaluations = 0; // direct evaluations of P
};

/// Certified bracket for sup_{t in [0,1]} |sum_n Z_n e(s_n t)|.
/// Throws SizeExceeded when the initial grid is over the memory budget.
ExpSumProfile sup_bracket(const std::vector<double>& coeffs, const std::vector<std::uint64_t>& freqs,
                          const SupOptions& options = {});

/// Direct evaluation of P(t).
Complex eval_expsum(const std::vector<double>& coeffs, const std::vector<std::uint64_t>& freqs,
                    double t);

enum class ConcentrationMode { bernoulli, pairs };
std::string to_string(ConcentrationMode m);

struct ConcentrationSpec {
  ConcentrationMode mode = ConcentrationMode::bernoulli;
  std::uint64_t n = 4096;
  std::uint64_t trials = 200;
  std::uint64_t seed = 0;
  Rational a = Rational(3, 10);
  unsigned base = 2;
  std::uint64_t lag = 1;            // m, pair mode
  int lambda_class = 1;             // 1 or 2, pair mode
  std::uint64_t offset = 1;         // k in Z'_q = Z_{k + qR}, pair mode
  std::vector<double> taus;         // Bernoulli probabilities; empty means n^{-a}
  double condition = 1.0 / 7.0;     // need ln N / R_N <= condition
  bool enforce_condition = true;
  double tol = 1e-3;                // bracket width, relative to sqrt(R_N ln N)
  unsigned workers = 1;
};

struct QuantileReport {
  ConcentrationMode mode = ConcentrationMode::bernoulli;
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double scale = 0.0;               // sqrt(R_N ln N)
  std::uint64_t spacing = 1;        // R, pair mode
  std::uint64_t terms = 0;          // length of the sum before Lambda restriction
  double q50 = 0.0, q90 = 0.0, q99 = 0.0, max = 0.0;
  std::vector<double> normalized;   // sup_hi / scale per trial, in trial order
  std::uint64_t unmet_tol = 0;
};

/// Throws ConditionViolated if ln N / R_N exceeds the condition constant.
QuantileReport concentration_trial(const ConcentrationSpec& spec);

/// Nearest-rank quantile of an unsorted sample.
double nearest_rank(std::vector<double> sample, double q);

struct VdcResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;   // lhs <= rhs (1 + 1e-10)
};

/// ||sum v_n||^2 against (2N/M) sum ||v_n||^2 + (4N/M) sum_{m<=M} |sum_n <v_{n+m}, v_n>|.
VdcResult vdc_check(const std::vector<std::vector<double>>& v, std::uint64_t m);

struct VdcExact {
  Rational lhs;
  Rational rhs;
  Rational slack() const { return rhs - lhs; }
};

/// Same inequality for integer vectors, evaluated exactly.
VdcExact vdc_check_exact(const std::vector<std::vector<long>>& v, std::uint64_t m);

/// Cov(1_I, 1_J o S^m) for S y = r y mod 1 under Lebesgue measure, exactly.
Rational exact_cov(const RationalInterval& i, const RationalInterval& j, std::uint64_t m,
                   unsigned base = 2);

struct CovEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo Cov(f, g o T^m) under the system's invariant measure (real parts).
CovEstimate mc_cov(const MPSystem& sys, const Observable& f, const Observable& g, std::uint64_t m,
                   std::uint64_t samples, std::uint64_t seed);

}  // namespace retlab
