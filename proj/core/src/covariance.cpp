#include <cmath>
#include <stdexcept>

#include "retlab/seeding.hpp"
#include "retlab/spectral.hpp"

namespace retlab {

namespace {

// Measure of {u in [0, x) : frac(u) in J}, x >= 0.
Rational count_in(const Rational& x, const RationalInterval& j) {
  const BigInt whole = floor(x);
  const Rational part = x - Rational(whole);
  Rational out = Rational(whole) * j.length();
  const Rational top = part < j.hi() ? part : j.hi();
  if (top > j.lo()) out += top - j.lo();
  return out;
}

}  // namespace

Rational exact_cov(const RationalInterval& i, const RationalInterval& j, std::uint64_t m, unsigned base) {
  if (base < 2) throw std::invalid_argument("exact_cov: base must be >= 2");
  const Rational scale(ipow(static_cast<unsigned long>(base), m));
  const Rational joint = (count_in(i.hi() * scale, j) - count_in(i.lo() * scale, j)) / scale;
  return joint - i.length() * j.length();
}

CovEstimate mc_cov(const MPSystem& sys, const Observable& f, const Observable& g, std::uint64_t m,
                   std::uint64_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("mc_cov: need at least two samples");
  SplitMix64 rng(seed);
  const std::uint64_t q = sys.modulus();
  std::vector<double> fs(samples);
  std::vector<double> gs(samples);
  double mf = 0.0;
  double mg = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const State x = sys.sample(rng);
    fs[s] = f(x, q).real();
    gs[s] = g(sys.iterate(x, m), q).real();
    mf += fs[s];
    mg += gs[s];
  }
  const double n = static_cast<double>(samples);
  mf /= n;
  mg /= n;
  double sum = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) sum += (fs[s] - mf) * (gs[s] - mg);
  CovEstimate out;
  out.estimate = sum / (n - 1.0);
  // standard error of the mean of the centered products, plus the
  // second-order term from estimating both means (dominant when the
  // first-order term degenerates, e.g. f = g an indicator of measure 1/2)
  double var = 0.0, vf = 0.0, vg = 0.0;
  const double mean_prod = sum / n;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const double d = (fs[s] - mf) * (gs[s] - mg) - mean_prod;
    var += d * d;
    vf += (fs[s] - mf) * (fs[s] - mf);
    vg += (gs[s] - mg) * (gs[s] - mg);
  }
  out.stderr_ = std::sqrt(var / (n - 1.0) / n) + std::sqrt(vf / (n - 1.0) * vg / (n - 1.0)) / n;
  return out;
}

}  // namespace retlab
