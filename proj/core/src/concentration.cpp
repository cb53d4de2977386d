#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "retlab/errors.hpp"
#include "retlab/parallel.hpp"
#include "retlab/partitions.hpp"
#include "retlab/seeding.hpp"
#include "retlab/spectral.hpp"
#include "retlab/targets.hpp"

namespace retlab {

std::string to_string(ConcentrationMode m) {
  return m == ConcentrationMode::bernoulli ? "bernoulli" : "pairs";
}

double nearest_rank(std::vector<double> sample, double q) {
  if (sample.empty()) throw std::invalid_argument("nearest_rank: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("nearest_rank: q must lie in [0, 1]");
  std::sort(sample.begin(), sample.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sample.size())));
  return sample[std::clamp<std::size_t>(rank, 1, sample.size()) - 1];
}

namespace {

void check_condition(const ConcentrationSpec& spec, double r_n, std::uint64_t terms) {
  if (!spec.enforce_condition) return;
  const double log_n = std::log(static_cast<double>(terms));
  if (!(r_n > 0.0) || log_n / r_n > spec.condition) {
    throw ConditionViolated("concentration: ln N / R_N = " +
                            (r_n > 0.0 ? format_double(log_n / r_n) : std::string("inf")) +
                            " exceeds " + format_double(spec.condition));
  }
}

}  // namespace

QuantileReport concentration_trial(const ConcentrationSpec& spec) {
  if (spec.n == 0) throw std::invalid_argument("concentration: N must be >= 1");
  if (spec.trials == 0) throw std::invalid_argument("concentration: need at least one trial");
  QuantileReport rep;
  rep.mode = spec.mode;
  rep.n = spec.n;
  rep.trials = spec.trials;
  rep.seed = spec.seed;
  rep.normalized.assign(spec.trials, 0.0);
  std::vector<char> unmet(spec.trials, 0);
  SupOptions opts;
  const double log_n = std::log(static_cast<double>(spec.n));

  auto normalize = [&](double sup) {
    if (sup == 0.0) return 0.0;
    return rep.scale > 0.0 ? sup / rep.scale : std::numeric_limits<double>::infinity();
  };

  if (spec.mode == ConcentrationMode::bernoulli) {
    std::vector<double> taus = spec.taus;
    if (taus.empty()) {
      const double a = spec.a.get_d();
      taus.resize(spec.n);
      for (std::uint64_t n = 1; n <= spec.n; ++n) taus[n - 1] = std::pow(static_cast<double>(n), -a);
    }
    if (taus.size() != spec.n) throw std::invalid_argument("concentration: need one tau per n");
    double r_n = 0.0;
    for (double t : taus) {
      if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("concentration: tau_n must lie in [0, 1]");
      r_n += t;
    }
    check_condition(spec, r_n, spec.n);
    rep.terms = spec.n;
    rep.scale = std::sqrt(r_n * log_n);
    opts.tol = spec.tol * std::max(rep.scale, 1.0);
    std::vector<std::uint64_t> freqs(spec.n);
    for (std::uint64_t n = 1; n <= spec.n; ++n) freqs[n - 1] = n;

    parallel_for(spec.trials, spec.workers, [&](std::uint64_t t) {
      SplitMix64 rng(derive_seed(spec.seed, t));
      std::vector<double> z(spec.n);
      for (std::uint64_t n = 0; n < spec.n; ++n) z[n] = (rng.uniform() < taus[n] ? 1.0 : 0.0) - taus[n];
      const ExpSumProfile p = sup_bracket(z, freqs, opts);
      rep.normalized[t] = normalize(p.sup_hi);
      unmet[t] = !p.met_tol;
    });
  } else {
    if (spec.lambda_class != 1 && spec.lambda_class != 2) {
      throw std::invalid_argument("concentration: lambda class must be 1 or 2");
    }
    TargetFamily fam;
    fam.a = spec.a;
    fam.base = spec.base;
    fam.mode = TargetMode::dyadic;
    const DyadicTarget target = build_dyadic(fam, spec.n);
    // Z'_q = Z_{k + qR}. R is at least every dyadic depth t_n, so indices R
    // apart are exactly independent, and at least 2 ln N.
    const unsigned depth = *std::max_element(target.denom_exp.begin(), target.denom_exp.end());
    const auto spacing = std::max<std::uint64_t>(depth, static_cast<std::uint64_t>(std::ceil(2.0 * log_n)));
    if (spec.offset == 0 || spec.offset > spacing) {
      throw std::invalid_argument("concentration: offset k must lie in [1, R] (R = " + std::to_string(spacing) + ")");
    }
    const std::uint64_t terms = spec.n > spec.offset ? (spec.n - spec.offset) / spacing : 0;
    if (spec.lag == 0) throw std::invalid_argument("concentration: lag m must be >= 1");
    if (spec.lag >= terms) {
      throw std::invalid_argument("concentration: lag m must be below N / R = " + std::to_string(terms));
    }
    auto orig = [&](std::uint64_t q) { return spec.offset + q * spacing; };
    const MembershipTable table = MembershipTable::dyadic(fam, target);
    // Var(Z'_n Z'_{n+m}) <= gamma gamma' <= gamma_{k+nR}^2
    double r_n = 0.0;
    for (std::uint64_t q = 1; q <= terms; ++q) {
      const double g = table.sigma(orig(q));
      r_n += g * g;
    }
    check_condition(spec, r_n, terms);
    rep.spacing = spacing;
    rep.terms = terms;
    rep.scale = std::sqrt(r_n * std::log(static_cast<double>(terms)));
    opts.tol = spec.tol * std::max(rep.scale, 1.0);
    const LambdaSets sets = lambda_sets(spec.lag, terms - spec.lag);
    const auto& idx = spec.lambda_class == 1 ? sets.first : sets.second;
    std::vector<std::uint64_t> freqs(idx.begin(), idx.end());

    parallel_for(spec.trials, spec.workers, [&](std::uint64_t t) {
      DigitStream stream = DigitStream::seeded(derive_seed(spec.seed, t), spec.base);
      const HittingSequence h = build_hitting(stream, table, spec.n);
      std::vector<double> z(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) z[i] = h.Z(orig(idx[i])) * h.Z(orig(idx[i] + spec.lag));
      const ExpSumProfile p = sup_bracket(z, freqs, opts);
      rep.normalized[t] = normalize(p.sup_hi);
      unmet[t] = !p.met_tol;
    });
  }

  for (char u : unmet) rep.unmet_tol += u != 0;
  rep.q50 = nearest_rank(rep.normalized, 0.5);
  rep.q90 = nearest_rank(rep.normalized, 0.9);
  rep.q99 = nearest_rank(rep.normalized, 0.99);
  rep.max = *std::max_element(rep.normalized.begin(), rep.normalized.end());
  return rep;
}

}  // namespace retlab
