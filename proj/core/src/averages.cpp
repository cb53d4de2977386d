#include "retlab/averages.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "retlab/errors.hpp"

namespace retlab {

std::vector<std::uint64_t> lacunary_grid(const Rational& gamma, std::uint64_t n_max) {
  if (gamma <= 1) throw std::invalid_argument("lacunary ratio must exceed 1");
  std::vector<std::uint64_t> grid;
  Rational power = gamma;
  const BigInt limit = big_from_u64(n_max);
  for (;;) {
    const BigInt v = floor(power);
    if (v > limit) break;
    const std::uint64_t n = big_to_u64(v);
    if (grid.empty() || grid.back() != n) grid.push_back(n);
    power *= gamma;
  }
  return grid;
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::single: return "single";
    case Scheme::double_commuting: return "double_commuting";
    case Scheme::semi_random: return "semi_random";
    case Scheme::two_power: return "two_power";
  }
  return "?";
}

namespace {

void check_grid(const HittingSequence& h, const std::vector<std::uint64_t>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] == 0 || (i > 0 && grid[i] <= grid[i - 1])) {
      throw std::invalid_argument("grid must be strictly increasing and positive");
    }
  }
  if (!grid.empty() && grid.back() > h.n_max) {
    throw std::invalid_argument("grid exceeds the hitting sequence length");
  }
}

// Shared kernel for the time-horizon schemes: walks the hits in order and
// records both normalizations at each grid point.
template <class Term>
void accumulate_hits(const HittingSequence& h, const std::vector<std::uint64_t>& grid, Term term,
                     AverageTrace& out) {
  out.grid = grid;
  out.values.reserve(grid.size());
  out.values_w.reserve(grid.size());
  Complex sum = 0.0;
  std::uint64_t count = 0;
  std::size_t next = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const std::uint64_t n_top = grid[g];
    while (next < h.hits.size() && h.hits[next] <= n_top) {
      sum += term(h.hits[next]);
      ++count;
      ++next;
    }
    out.values.push_back(count == 0 ? Complex(0.0) : sum / static_cast<double>(count));
    out.values_w.push_back(sum / h.W(n_top));
  }
}

}  // namespace

LlnTrace lln_check(const HittingSequence& h, const std::vector<std::uint64_t>& grid) {
  check_grid(h, grid);
  LlnTrace out;
  out.grid = grid;
  out.degenerate = h.hits.empty();
  for (std::uint64_t n : grid) {
    out.ratio.push_back(static_cast<double>(h.count_upto(n)) / h.W(n));
  }
  for (std::size_t i = grid.size() / 2; i < grid.size(); ++i) {
    out.tail_deviation = std::max(out.tail_deviation, std::abs(out.ratio[i] - 1.0));
  }
  return out;
}

AverageTrace single_average(const HittingSequence& h, const MPSystem& sys, const Observable& f,
                            State x, const std::vector<std::uint64_t>& grid) {
  check_grid(h, grid);
  AverageTrace out;
  out.scheme = Scheme::single;
  out.limit = sys.exact_limit_single(f);
  const std::uint64_t q = sys.modulus();
  accumulate_hits(h, grid, [&](std::uint64_t n) { return f(sys.iterate(x, n), q); }, out);
  return out;
}

AverageTrace double_average(const HittingSequence& h, const MPSystem& sys, const Observable& f1,
                            const Observable& f2, State x, const std::vector<std::uint64_t>& grid) {
  check_grid(h, grid);
  AverageTrace out;
  out.scheme = Scheme::double_commuting;
  out.limit = sys.exact_limit_double(f1, f2, x);
  const std::uint64_t q = sys.modulus();
  auto term = [&](std::uint64_t n) { return f1(sys.iterate(x, n), q) * f2(sys.iterate2(x, n), q); };
  accumulate_hits(h, grid, term, out);

  out.reference.reserve(grid.size());
  Complex full = 0.0;
  std::uint64_t n = 0;
  for (std::uint64_t n_top : grid) {
    for (; n < n_top; ) {
      ++n;
      full += term(n);
    }
    out.reference.push_back(full / static_cast<double>(n_top));
  }
  return out;
}

AverageTrace semi_random_average(const HittingSequence& h, const MPSystem& sys,
                                 const Observable& f1, const Observable& f2, State x,
                                 const std::vector<std::uint64_t>& grid) {
  check_grid(h, grid);
  AverageTrace out;
  out.scheme = Scheme::semi_random;
  const auto m1 = sys.exact_limit_single(f1);
  std::optional<Complex> m2;
  if (sys.ergodic_t2()) m2 = f2.exact_mean(sys.modulus());
  if (m1 && m2) out.limit = *m1 * *m2;
  const std::uint64_t q = sys.modulus();
  Complex sum = 0.0;
  std::uint64_t n = 0;
  for (std::uint64_t n_top : grid) {
    if (n_top > h.hits.size()) {
      out.truncated = true;
      break;
    }
    for (; n < n_top; ) {
      ++n;
      sum += f1(sys.iterate(x, n), q) * f2(sys.iterate2(x, h.hits[n - 1]), q);
    }
    out.grid.push_back(n_top);
    out.values.push_back(sum / static_cast<double>(n_top));
  }
  return out;
}

TwoPowerResult two_power_average(const HittingSequence& h, const MPSystem& sys,
                                 const Observable& f, const Observable& g,
                                 const std::vector<State>& xs, const Rational& b,
                                 const std::vector<std::uint64_t>& grid) {
  check_grid(h, grid);
  if (!(b > 0 && b + 2 * h.family.a < Rational(1, 2))) {
    throw ConditionViolated("two-power averages need b > 0 and b + 2a < 1/2");
  }
  const SmallRational sb = to_small(b);
  std::vector<std::uint64_t> lifted(h.hits.size());
  for (std::size_t i = 0; i < h.hits.size(); ++i) {
    lifted[i] = big_to_u64(floor_rational_power(h.hits[i], sb.num + sb.den, sb.den));
  }
  const std::uint64_t q = sys.modulus();
  TwoPowerResult out;
  out.traces.reserve(xs.size());
  for (std::size_t id = 0; id < xs.size(); ++id) {
    const State x = xs[id];
    AverageTrace t;
    t.scheme = Scheme::two_power;
    t.x_id = id;
    std::size_t idx = 0;
    accumulate_hits(h, grid,
                    [&](std::uint64_t n) {
                      // hits arrive in order, so idx tracks the position of n
                      const std::uint64_t lift = lifted[idx++];
                      return f(sys.iterate(x, n), q) * g(sys.iterate(x, lift), q);
                    },
                    t);
    out.traces.push_back(std::move(t));
  }
  if (grid.size() >= 2 && !xs.empty()) {
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      double ss = 0.0;
      for (const auto& t : out.traces) ss += std::norm(t.values[k + 1] - t.values[k]);
      out.cauchy_proxy.push_back(std::sqrt(ss / static_cast<double>(xs.size())));
    }
  }
  return out;
}

InteractionSum interaction_sum(const HittingSequence& h, const Rational& b, std::uint64_t n_top) {
  if (b < 0) throw std::invalid_argument("interaction_sum: b must be >= 0");
  const SmallRational sb = to_small(b);
  InteractionSum out;
  out.lags = big_to_u64(floor_rational_power(n_top, sb.num, sb.den));
  if (h.n_max < n_top + out.lags) {
    throw std::invalid_argument("interaction_sum: hitting sequence shorter than N + floor(N^b)");
  }
  // pairs of hits n < n' <= n + lags with n <= N
  std::size_t hi = 0;
  for (std::size_t i = 0; i < h.hits.size() && h.hits[i] <= n_top; ++i) {
    hi = std::max(hi, i + 1);
    while (hi < h.hits.size() && h.hits[hi] <= h.hits[i] + out.lags) ++hi;
    out.xx += hi - i - 1;
  }
  double zz = 0.0;
  for (std::uint64_t m = 1; m <= out.lags; ++m) {
    for (std::uint64_t n = 1; n <= n_top; ++n) zz += h.Z(n + m) * h.Z(n);
  }
  out.zz = zz;
  return out;
}

}  // namespace retlab
