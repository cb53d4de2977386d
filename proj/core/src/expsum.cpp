#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "retlab/errors.hpp"
#include "retlab/spectral.hpp"

namespace retlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftBuffer {
  explicit FftBuffer(std::size_t n)
      : size(n), data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data) throw std::bad_alloc();
    std::fill_n(&data[0][0], 2 * n, 0.0);
  }
  ~FftBuffer() { fftw_free(data); }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  Complex at(std::size_t j) const { return {data[j][0], data[j][1]}; }

  std::size_t size;
  fftw_complex* data;
};

// In-place backward transforms: out[j] = sum_k in[k] e(jk / n).
void backward_fft(FftBuffer& a, FftBuffer& b, FftBuffer& c) {
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(a.size), a.data, a.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute_dft(plan, a.data, a.data);
  fftw_execute_dft(plan, b.data, b.data);
  fftw_execute_dft(plan, c.data, c.data);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

// P, P' and P'' at one point.
struct Jet {
  Complex p;
  Complex d1;
  Complex d2;
};

Jet eval_jet(const std::vector<double>& z, const std::vector<std::uint64_t>& s, double t) {
  Jet j{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] == 0.0) continue;
    double phase = static_cast<double>(s[i]) * t;
    phase -= std::floor(phase);
    const Complex e(std::cos(kTwoPi * phase), std::sin(kTwoPi * phase));
    const double w = kTwoPi * static_cast<double>(s[i]);
    j.p += z[i] * e;
    j.d1 += (w * z[i]) * Complex(-e.imag(), e.real());
    j.d2 -= (w * w * z[i]) * e;
  }
  return j;
}

// Bound on |P(t + d)| for d in [0, r] (sides = 1), [-r, 0] (sides = -1) or
// [-r, r] (sides = 0), from the second-order Taylor polynomial at t and the
// third-derivative bound m3. |a + b d| is convex in d, so its maximum sits
// at an end of the range.
double taylor_bound(const Jet& j, double r, int sides, double m3) {
  double lin = std::abs(j.p);
  if (sides >= 0) lin = std::max(lin, std::abs(j.p + j.d1 * r));
  if (sides <= 0) lin = std::max(lin, std::abs(j.p - j.d1 * r));
  return lin + std::abs(j.d2) * r * r / 2.0 + m3 * r * r * r / 6.0;
}

double wrap01(double t) { return t - std::floor(t); }

}  // namespace

Complex eval_expsum(const std::vector<double>& coeffs, const std::vector<std::uint64_t>& freqs,
                    double t) {
  if (coeffs.size() != freqs.size()) throw std::invalid_argument("coefficient and frequency counts differ");
  Complex p = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    double phase = static_cast<double>(freqs[i]) * t;
    phase -= std::floor(phase);
    p += coeffs[i] * Complex(std::cos(kTwoPi * phase), std::sin(kTwoPi * phase));
  }
  return p;
}

ExpSumProfile sup_bracket(const std::vector<double>& coeffs, const std::vector<std::uint64_t>& freqs,
                          const SupOptions& options) {
  if (coeffs.size() != freqs.size()) throw std::invalid_argument("coefficient and frequency counts differ");
  if (!(options.tol > 0.0)) throw std::invalid_argument("sup_bracket: tol must be positive");
  ExpSumProfile out;
  out.tol = options.tol;

  double sum_abs = 0.0;
  double sum_s1 = 0.0;
  double sum_s2 = 0.0;
  double sum_s3 = 0.0;
  std::uint64_t s_max = 0;
  std::uint64_t nonzero = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!(std::abs(coeffs[i]) <= 1.0)) throw std::invalid_argument("sup_bracket: |Z_n| must be <= 1");
    if (coeffs[i] == 0.0) continue;
    const double z = std::abs(coeffs[i]);
    const double f = static_cast<double>(freqs[i]);
    sum_abs += z;
    sum_s1 += z * f;
    sum_s2 += z * f * f;
    sum_s3 += z * f * f * f;
    s_max = std::max(s_max, freqs[i]);
    ++nonzero;
  }
  out.lipschitz = kTwoPi * static_cast<double>(s_max) * sum_abs;
  if (sum_abs == 0.0) {
    out.grid_size = 0;
    out.met_tol = true;
    return out;
  }

  std::uint64_t g = std::max<std::uint64_t>(64, std::bit_ceil(8 * (s_max + 1)));
  if (g > options.max_grid) {
    throw SizeExceeded("sup_bracket: grid of " + std::to_string(g) + " points exceeds the budget of " +
                       std::to_string(options.max_grid));
  }
  const double m3 = kTwoPi * kTwoPi * kTwoPi * sum_s3;  // sup of the third derivative

  double lo = 0.0;
  double argmax = 0.0;
  bool first_round = true;
  for (;;) {
    out.grid_size = g;
    const double h = 1.0 / static_cast<double>(g);
    // rounding in the transforms and in direct evaluation, for each Taylor
    // term over half a cell
    const double rel =
        DBL_EPSILON * (16.0 * std::log2(static_cast<double>(g)) + 64.0 + 8.0 * static_cast<double>(s_max));
    const double eps = rel * (sum_abs + kTwoPi * sum_s1 * h + kTwoPi * kTwoPi * sum_s2 * h * h);
    FftBuffer a(g);
    FftBuffer b(g);
    FftBuffer c(g);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      const std::size_t k = freqs[i];
      const double w = kTwoPi * static_cast<double>(freqs[i]);
      a.data[k][0] += coeffs[i];
      b.data[k][1] += w * coeffs[i];
      c.data[k][0] -= w * w * coeffs[i];
    }
    backward_fft(a, b, c);
    auto jet_at = [&](std::size_t j) { return Jet{a.at(j), b.at(j), c.at(j)}; };

    std::vector<double> pabs(g);
    double mean_sq = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
      pabs[j] = std::hypot(a.data[j][0], a.data[j][1]);
      mean_sq += pabs[j] * pabs[j];
    }
    const auto best = std::max_element(pabs.begin(), pabs.end());
    if (first_round) {
      out.grid_max = *best;
      out.grid_mean_square = mean_sq / static_cast<double>(g);
      first_round = false;
    }
    if (*best > lo) {
      lo = *best;
      argmax = static_cast<double>(best - pabs.begin()) * h;
    }

    // ternary refinement around the largest grid values
    std::vector<std::size_t> order(g);
    for (std::size_t j = 0; j < g; ++j) order[j] = j;
    const std::size_t top = std::min<std::size_t>(8, g);
    std::partial_sort(order.begin(), order.begin() + top, order.end(),
                      [&](std::size_t x, std::size_t y) { return pabs[x] > pabs[y]; });
    for (std::size_t r = 0; r < top; ++r) {
      double u = static_cast<double>(order[r]) * h - h;
      double v = static_cast<double>(order[r]) * h + h;
      for (int it = 0; it < 60 && v - u > 1e-15; ++it) {
        const double t1 = u + (v - u) / 3.0;
        const double t2 = v - (v - u) / 3.0;
        const double f1 = std::abs(eval_expsum(coeffs, freqs, wrap01(t1)));
        const double f2 = std::abs(eval_expsum(coeffs, freqs, wrap01(t2)));
        out.evaluations += 2;
        if (f1 < f2) {
          u = t1;
        } else {
          v = t2;
        }
      }
      const double t = wrap01(0.5 * (u + v));
      const double val = std::abs(eval_expsum(coeffs, freqs, t));
      ++out.evaluations;
      if (val > lo) {
        lo = val;
        argmax = t;
      }
    }

    // cells [t_j, t_j + h]: each half is covered from its nearer endpoint
    struct Cell {
      double center;
      double half;
      double ub;
    };
    std::vector<Cell> stack;
    double hi_done = lo;
    const double half = h / 2.0;
    for (std::size_t j = 0; j < g; ++j) {
      const std::size_t k = (j + 1) % g;
      const double ub =
          std::max(taylor_bound(jet_at(j), half, 1, m3), taylor_bound(jet_at(k), half, -1, m3)) + eps;
      if (ub <= lo - eps + options.tol) {
        hi_done = std::max(hi_done, ub);
      } else {
        stack.push_back({(static_cast<double>(j) + 0.5) * h, half, ub});
      }
    }

    // refine the grid instead when branch and bound would cost more than a
    // transform of twice the size
    const double bb_cost = static_cast<double>(stack.size()) * 6.0 * static_cast<double>(nonzero) * 10.0;
    const double fft_cost = 12.0 * static_cast<double>(2 * g) * std::log2(static_cast<double>(2 * g));
    const bool can_grow = 2 * g <= options.max_grid;
    const bool tractable = (!can_grow || bb_cost <= fft_cost) && stack.size() * 4 <= options.max_evals;
    std::uint64_t evals = 0;
    while (tractable && !stack.empty() && evals < options.max_evals) {
      const Cell cell = stack.back();
      stack.pop_back();
      const Jet jet = eval_jet(coeffs, freqs, wrap01(cell.center));
      ++evals;
      const double here = std::abs(jet.p);
      if (here > lo) {
        lo = here;
        argmax = wrap01(cell.center);
      }
      const double bound = std::min(taylor_bound(jet, cell.half, 0, m3) + eps, cell.ub);
      if (bound <= lo - eps + options.tol) {
        hi_done = std::max(hi_done, bound);
      } else {
        stack.push_back({cell.center - cell.half / 2.0, cell.half / 2.0, bound});
        stack.push_back({cell.center + cell.half / 2.0, cell.half / 2.0, bound});
      }
    }
    out.evaluations += evals;

    if (stack.empty()) {
      out.sup_lo = std::max(0.0, lo - eps);
      out.sup_hi = std::max(hi_done, lo);
      out.argmax = argmax;
      out.met_tol = out.sup_hi - out.sup_lo <= options.tol;
      return out;
    }
    if (can_grow) {
      g *= 2;
      continue;
    }
    double hi = hi_done;
    for (const auto& cell : stack) hi = std::max(hi, cell.ub);
    out.sup_lo = std::max(0.0, lo - eps);
    out.sup_hi = std::max(hi, lo);
    out.argmax = argmax;
    out.met_tol = out.sup_hi - out.sup_lo <= options.tol;
    return out;
  }
}

}  // namespace retlab
