#include "retlab/lab/experiments.hpp"

#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>

#include "retlab/averages.hpp"
#include "retlab/errors.hpp"
#include "retlab/parallel.hpp"
#include "retlab/partitions.hpp"
#include "retlab/seeding.hpp"
#include "retlab/spectral.hpp"
#include "retlab/systems.hpp"
#include "retlab/targets.hpp"

namespace retlab::lab {

using nlohmann::json;

namespace {

struct Context {
  const ExperimentConfig& cfg;
  json params;
  json system;
  const ProgressFn& progress;
  RunResult result;

  void note(const std::string& msg) const {
    if (progress) progress(msg);
  }
  template <class T>
  T param(const char* key, T fallback) const {
    if (!params.contains(key)) return fallback;
    try {
      return params.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigInvalid(std::string("params.") + key + " has the wrong type");
    }
  }
  double tol(double fallback) const { return cfg.tol.value_or(fallback); }
  void metric(const std::string& k, double v) { result.record.metrics[k] = v; }
  void assert_le(const std::string& name, double value, double threshold, std::string detail = "") {
    result.record.assertions.push_back({name, value <= threshold, value, threshold, std::move(detail)});
  }
  void assert_ge(const std::string& name, double value, double threshold, std::string detail = "") {
    result.record.assertions.push_back({name, value >= threshold, value, threshold, std::move(detail)});
  }
};

std::string fmt(double v) { return format_double(v); }

TargetFamily family_of(const ExperimentConfig& cfg, TargetMode mode = TargetMode::raw) {
  TargetFamily f;
  f.a = *cfg.a;
  f.base = cfg.base;
  f.mode = mode;
  return f;
}

std::uint64_t digit_cap(std::uint64_t last_shift) {
  return std::max<std::uint64_t>(DigitStream::kDefaultMaxDigits, last_shift + 4096);
}

Angle angle_param(const json& sys, const char* key, const std::string& fallback) {
  const std::string text = sys.contains(key) ? sys.at(key).get<std::string>() : fallback;
  try {
    return Angle::parse(text);
  } catch (const std::exception& e) {
    throw ConfigInvalid(std::string("system.") + key + ": " + e.what());
  }
}

MPSystem rotation_system(const Context& ctx) {
  return MPSystem::circle_rotation(angle_param(ctx.system, "alpha", "golden"));
}

MPSystem pair_system(const Context& ctx) {
  const Angle alpha = angle_param(ctx.system, "alpha", "golden");
  const Angle beta = angle_param(ctx.system, "beta", "sqrt:2");
  return MPSystem::torus_pair(alpha, beta);
}

std::vector<State> x_panel(const Context& ctx, const MPSystem& sys) {
  const auto panel_seed = ctx.param<std::uint64_t>("panel_seed", 20240101);
  std::vector<State> xs;
  for (std::uint64_t j = 0; j < ctx.cfg.x_panel; ++j) {
    SplitMix64 rng(derive_seed(panel_seed, j));
    xs.push_back(sys.sample(rng));
  }
  return xs;
}

Table traces_table(const std::vector<AverageTrace>& traces) {
  std::ostringstream ss;
  write_traces_csv(ss, traces);
  Table t;
  t.name = "traces";
  t.preformatted = ss.str();
  return t;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

// ---------------------------------------------------------------- lln

void run_lln(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const TargetFamily fam = family_of(cfg);
  ctx.note("building thresholds for N = " + std::to_string(cfg.n_max));
  const MembershipTable table = MembershipTable::raw(fam, cfg.n_max);
  const auto grid = lacunary_grid(cfg.gamma, cfg.n_max);
  const std::size_t seeds = cfg.seeds.size();
  std::vector<double> final_dev(seeds), tail_dev(seeds), hits(seeds);
  std::vector<std::uint64_t> undecided(seeds);
  std::vector<std::vector<double>> ratios(seeds);
  parallel_for(seeds, cfg.workers, [&](std::uint64_t i) {
    DigitStream stream = DigitStream::seeded(cfg.seeds[i], cfg.base, digit_cap(cfg.n_max));
    const HittingSequence h = build_hitting(stream, table, cfg.n_max);
    const LlnTrace tr = lln_check(h, grid);
    final_dev[i] = std::abs(static_cast<double>(h.hits.size()) / h.W(cfg.n_max) - 1.0);
    tail_dev[i] = tr.tail_deviation;
    hits[i] = static_cast<double>(h.hits.size());
    undecided[i] = h.undecided.size();
    ratios[i] = tr.ratio;
  });
  Table t;
  t.name = "lln";
  t.header = {"seed", "N", "ratio"};
  for (std::size_t i = 0; i < seeds; ++i) {
    ctx.result.record.trials.push_back(
        {cfg.seeds[i], {{"final_deviation", final_dev[i]}, {"tail_deviation", tail_dev[i]}, {"hits", hits[i]}}});
    ctx.result.record.undecided += undecided[i];
    for (std::size_t g = 0; g < grid.size(); ++g) {
      t.rows.push_back({std::to_string(cfg.seeds[i]), std::to_string(grid[g]), fmt(ratios[i][g])});
    }
  }
  ctx.result.tables.push_back(std::move(t));
  const double max_final = *std::max_element(final_dev.begin(), final_dev.end());
  const double max_tail = *std::max_element(tail_dev.begin(), tail_dev.end());
  ctx.metric("max_final_deviation", max_final);
  ctx.metric("max_tail_deviation", max_tail);
  ctx.metric("mean_hits", mean(hits));
  const std::string mode = ctx.param<std::string>("assert", "final");
  if (mode == "tail") {
    ctx.assert_le("max tail deviation", max_tail, ctx.tol(0.05), "max over seeds and the tail half of the grid");
  } else {
    ctx.assert_le("max final deviation", max_final, ctx.tol(0.05), "max over seeds of |sum X_n / W_N - 1| at N");
  }
}

// ---------------------------------------------------------------- A, B

void run_single(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const TargetFamily fam = family_of(cfg);
  const MPSystem sys = rotation_system(ctx);
  const auto k = ctx.param<std::int64_t>("k", 1);
  const Observable f = Observable::character(k);
  const auto limit = sys.exact_limit_single(f);
  if (!limit) throw ConfigInvalid("Theorem A preset needs an ergodic rotation (irrational alpha)");
  const MembershipTable table = MembershipTable::raw(fam, cfg.n_max);
  const auto grid = lacunary_grid(cfg.gamma, cfg.n_max);
  const auto xs = x_panel(ctx, sys);
  const std::size_t seeds = cfg.seeds.size();
  std::vector<std::vector<AverageTrace>> traces(seeds);
  std::vector<double> err(seeds), err_w(seeds), hits(seeds);
  std::vector<std::uint64_t> undecided(seeds);
  parallel_for(seeds, cfg.workers, [&](std::uint64_t i) {
    DigitStream stream = DigitStream::seeded(cfg.seeds[i], cfg.base, digit_cap(cfg.n_max));
    const HittingSequence h = build_hitting(stream, table, cfg.n_max);
    double e = 0.0, ew = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      AverageTrace t = single_average(h, sys, f, xs[j], grid);
      t.seed = cfg.seeds[i];
      t.x_id = j;
      e += std::abs(t.values.back() - *limit);
      ew += std::abs(t.values_w.back() - *limit);
      traces[i].push_back(std::move(t));
    }
    err[i] = e / static_cast<double>(xs.size());
    err_w[i] = ew / static_cast<double>(xs.size());
    hits[i] = static_cast<double>(h.hits.size());
    undecided[i] = h.undecided.size();
  });
  std::vector<AverageTrace> all;
  for (std::size_t i = 0; i < seeds; ++i) {
    ctx.result.record.trials.push_back({cfg.seeds[i], {{"abs_error", err[i]}, {"abs_error_w", err_w[i]}, {"hits", hits[i]}}});
    ctx.result.record.undecided += undecided[i];
    for (auto& t : traces[i]) all.push_back(std::move(t));
  }
  ctx.result.tables.push_back(traces_table(all));
  ctx.metric("final_N", static_cast<double>(grid.back()));
  ctx.metric("mean_abs_error", mean(err));
  ctx.metric("mean_abs_error_stderr", stderr_of(err));
  ctx.metric("mean_abs_error_w", mean(err_w));
  ctx.metric("mean_hits", mean(hits));
  ctx.assert_le("mean |A_N - limit|", mean(err), ctx.tol(0.05), "count-normalized, final lacunary point");
}

void run_double(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const TargetFamily fam = family_of(cfg);
  const MPSystem sys = pair_system(ctx);
  const Observable f1 = Observable::character(ctx.param<std::int64_t>("k1", 1));
  const Observable f2 = Observable::character(ctx.param<std::int64_t>("k2", 1));
  const MembershipTable table = MembershipTable::raw(fam, cfg.n_max);
  const auto grid = lacunary_grid(cfg.gamma, cfg.n_max);
  const auto xs = x_panel(ctx, sys);
  const std::size_t seeds = cfg.seeds.size();
  std::vector<std::vector<AverageTrace>> traces(seeds);
  std::vector<double> diff(seeds), hits(seeds);
  std::vector<std::uint64_t> undecided(seeds);
  parallel_for(seeds, cfg.workers, [&](std::uint64_t i) {
    DigitStream stream = DigitStream::seeded(cfg.seeds[i], cfg.base, digit_cap(cfg.n_max));
    const HittingSequence h = build_hitting(stream, table, cfg.n_max);
    double d = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      AverageTrace t = double_average(h, sys, f1, f2, xs[j], grid);
      t.seed = cfg.seeds[i];
      t.x_id = j;
      d += std::abs(t.values.back() - t.reference.back());
      traces[i].push_back(std::move(t));
    }
    diff[i] = d / static_cast<double>(xs.size());
    hits[i] = static_cast<double>(h.hits.size());
    undecided[i] = h.undecided.size();
  });
  std::vector<AverageTrace> all;
  for (std::size_t i = 0; i < seeds; ++i) {
    ctx.result.record.trials.push_back({cfg.seeds[i], {{"abs_difference", diff[i]}, {"hits", hits[i]}}});
    ctx.result.record.undecided += undecided[i];
    for (auto& t : traces[i]) all.push_back(std::move(t));
  }
  ctx.result.tables.push_back(traces_table(all));
  ctx.metric("final_N", static_cast<double>(grid.back()));
  ctx.metric("mean_abs_difference", mean(diff));
  ctx.metric("mean_abs_difference_stderr", stderr_of(diff));
  ctx.metric("mean_hits", mean(hits));
  ctx.assert_le("mean |along a_n - full sequence|", mean(diff), ctx.tol(0.05), "final lacunary point");
}

// ---------------------------------------------------------------- C

void run_semi_random(Context& ctx) {
  const auto& cfg = ctx.cfg;
  TargetFamily fam = family_of(cfg);
  fam.phi = Sampler::power(*cfg.c);
  const MPSystem sys = pair_system(ctx);
  const Observable f1 = Observable::character(ctx.param<std::int64_t>("k1", 1));
  const Observable f2 = Observable::character(ctx.param<std::int64_t>("k2", 1));
  const std::uint64_t n_hits = cfg.n_max;
  // index range expected to hold n_hits hits with a wide margin
  const double a = cfg.a->get_d();
  double w = 0.0;
  std::uint64_t span = 0;
  const double need = 1.15 * static_cast<double>(n_hits) + 8.0 * std::sqrt(static_cast<double>(n_hits)) + 16.0;
  while (w < need) {
    ++span;
    w += std::pow(static_cast<double>(span), -a);
  }
  ctx.note("thresholds for " + std::to_string(span) + " indices");
  const MembershipTable table = MembershipTable::raw(fam, span);
  const std::uint64_t cap = digit_cap(fam.phi(span));
  const auto grid = lacunary_grid(cfg.gamma, n_hits);
  const auto xs = x_panel(ctx, sys);
  const std::size_t seeds = cfg.seeds.size();
  std::vector<std::vector<AverageTrace>> traces(seeds);
  std::vector<double> err(seeds), truncated(seeds);
  std::vector<std::uint64_t> undecided(seeds);
  std::optional<Complex> limit;
  std::mutex limit_mutex;
  parallel_for(seeds, cfg.workers, [&](std::uint64_t i) {
    DigitStream stream = DigitStream::seeded(cfg.seeds[i], cfg.base, cap);
    const HittingSequence h = build_hitting(stream, table, span, n_hits);
    double e = 0.0;
    bool trunc = false;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      AverageTrace t = semi_random_average(h, sys, f1, f2, xs[j], grid);
      t.seed = cfg.seeds[i];
      t.x_id = j;
      if (!t.limit) throw ConfigInvalid("Theorem C preset needs ergodic rotations with known means");
      {
        std::lock_guard lock(limit_mutex);
        limit = t.limit;
      }
      trunc |= t.truncated;
      e += t.values.empty() ? 1.0 : std::abs(t.values.back() - *t.limit);
      traces[i].push_back(std::move(t));
    }
    err[i] = e / static_cast<double>(xs.size());
    truncated[i] = trunc ? 1.0 : 0.0;
    undecided[i] = h.undecided.size();
  });
  std::vector<AverageTrace> all;
  for (std::size_t i = 0; i < seeds; ++i) {
    ctx.result.record.trials.push_back({cfg.seeds[i], {{"abs_error", err[i]}, {"truncated", truncated[i]}}});
    ctx.result.record.undecided += undecided[i];
    for (auto& t : traces[i]) all.push_back(std::move(t));
  }
  ctx.result.tables.push_back(traces_table(all));
  ctx.metric("final_N", static_cast<double>(grid.back()));
  ctx.metric("index_span", static_cast<double>(span));
  ctx.metric("mean_abs_error", mean(err));
  ctx.metric("mean_abs_error_stderr", stderr_of(err));
  ctx.metric("truncated_seeds", std::accumulate(truncated.begin(), truncated.end(), 0.0));
  ctx.assert_le("mean |value - product of means|", mean(err), ctx.tol(0.08), "final lacunary point");
  ctx.assert_le("truncated traces", std::accumulate(truncated.begin(), truncated.end(), 0.0), 0.0);
}

// ---------------------------------------------------------------- D

void run_two_power(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const TargetFamily fam = family_of(cfg);
  const MPSystem sys = rotation_system(ctx);
  const Observable f = Observable::character(ctx.param<std::int64_t>("k1", 1));
  const Observable g = Observable::character(ctx.param<std::int64_t>("k2", 1));
  const MembershipTable table = MembershipTable::raw(fam, cfg.n_max);
  const auto grid = lacunary_grid(cfg.gamma, cfg.n_max);
  const auto last = ctx.param<std::uint64_t>("last_points", 4);
  if (grid.size() < last + 1) throw ConfigInvalid("lacunary grid too short for the Cauchy diagnostic");
  const auto xs = x_panel(ctx, sys);
  const std::size_t seeds = cfg.seeds.size();
  std::vector<std::vector<double>> proxies(seeds);
  std::vector<double> decreasing(seeds);
  std::vector<std::vector<AverageTrace>> traces(seeds);
  std::vector<std::uint64_t> undecided(seeds);
  parallel_for(seeds, cfg.workers, [&](std::uint64_t i) {
    DigitStream stream = DigitStream::seeded(cfg.seeds[i], cfg.base, digit_cap(cfg.n_max));
    const HittingSequence h = build_hitting(stream, table, cfg.n_max);
    TwoPowerResult r = two_power_average(h, sys, f, g, xs, *cfg.b, grid);
    proxies[i] = r.cauchy_proxy;
    // proxy k belongs to grid point k + 1; compare the last `last` of them
    const auto& p = r.cauchy_proxy;
    bool dec = true;
    for (std::size_t k = p.size() - last + 1; k < p.size(); ++k) dec &= p[k] < p[k - 1];
    decreasing[i] = dec ? 1.0 : 0.0;
    for (auto& t : r.traces) t.seed = cfg.seeds[i];
    traces[i] = std::move(r.traces);
    undecided[i] = h.undecided.size();
  });
  Table pt;
  pt.name = "cauchy_proxy";
  pt.header = {"seed", "N", "proxy"};
  std::vector<AverageTrace> all;
  for (std::size_t i = 0; i < seeds; ++i) {
    ctx.result.record.trials.push_back(
        {cfg.seeds[i], {{"decreasing", decreasing[i]}, {"final_proxy", proxies[i].back()}}});
    ctx.result.record.undecided += undecided[i];
    for (std::size_t k = 0; k < proxies[i].size(); ++k) {
      pt.rows.push_back({std::to_string(cfg.seeds[i]), std::to_string(grid[k + 1]), fmt(proxies[i][k])});
    }
    for (auto& t : traces[i]) all.push_back(std::move(t));
  }
  ctx.result.tables.push_back(std::move(pt));
  ctx.result.tables.push_back(traces_table(all));
  const double frac = mean(decreasing);
  ctx.metric("final_N", static_cast<double>(grid.back()));
  ctx.metric("fraction_decreasing", frac);
  std::vector<double> finals;
  for (const auto& p : proxies) finals.push_back(p.back());
  ctx.metric("mean_final_proxy", mean(finals));
  ctx.assert_ge("fraction of seeds with decreasing proxy", frac, ctx.param<double>("min_fraction", 0.8),
                "strictly decreasing over the last " + std::to_string(last) + " grid points");
}

// ---------------------------------------------------------------- lemma-prop1

void run_prop1(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const std::uint64_t n = cfg.n_max == 0 ? 48 : cfg.n_max;
  const DyadicTarget target = build_dyadic(family_of(cfg, TargetMode::dyadic), n);
  const double gap = 2.0 * std::log(static_cast<double>(n));
  const auto max_index = ctx.param<std::uint64_t>("max_index", kJointMeasureMaxIndex);
  Table t;
  t.name = "joint_measures";
  t.header = {"indices", "joint", "product", "equal"};
  std::uint64_t checked = 0, failures = 0;
  auto check = [&](std::vector<std::uint64_t> idx) {
    const Rational joint = exact_joint_measure(target, idx, max_index);
    Rational product = 1;
    for (auto i : idx) product *= target.gamma_at(i);
    const bool eq = joint == product;
    ++checked;
    failures += !eq;
    std::string key;
    for (auto i : idx) key += (key.empty() ? "" : " ") + std::to_string(i);
    t.rows.push_back({key, to_fraction_string(joint), to_fraction_string(product), eq ? "1" : "0"});
  };
  for (std::uint64_t i = 1; i <= n; ++i) {
    for (std::uint64_t j = i + 1; j <= n; ++j) {
      if (static_cast<double>(j - i) <= gap) continue;
      check({i, j});
      for (std::uint64_t k = j + 1; k <= n; ++k) {
        if (static_cast<double>(k - j) > gap) check({i, j, k});
      }
    }
  }
  ctx.result.tables.push_back(std::move(t));
  ctx.metric("tuples_checked", static_cast<double>(checked));
  ctx.metric("failures", static_cast<double>(failures));
  ctx.assert_le("inexact products", static_cast<double>(failures), 0.0,
                std::to_string(checked) + " pairs and triples with gaps > 2 ln N");
}

// ---------------------------------------------------------------- lemma-prop2

void run_prop2(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto f_n = ctx.param<std::uint64_t>("f_sum_N", std::uint64_t{1} << 16);
  std::vector<std::uint64_t> checkpoints = ctx.param<std::vector<std::uint64_t>>("checkpoints", {});
  if (checkpoints.empty()) {
    for (int e = 10; e <= 17; ++e) checkpoints.push_back(std::uint64_t{1} << e);
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  const std::uint64_t n_sym = std::max(cfg.n_max, checkpoints.back());
  const std::uint64_t n_all = std::max(n_sym, f_n);
  ctx.note("dyadic target up to " + std::to_string(n_all));
  const TargetFamily fam = family_of(cfg);
  const DyadicTarget target = build_dyadic(fam, n_all);

  // partial sums of lambda(F_n) are non-decreasing iff every enclosure is >= 0
  bool monotone = true;
  for (std::uint64_t n = 1; n <= f_n; ++n) monotone &= target.f_lo[n - 1] >= 0 && target.f_lo[n - 1] <= target.f_hi[n - 1];
  ctx.assert_ge("partial sums monotone", monotone ? 1.0 : 0.0, 1.0, "all enclosures of lambda(F_n) non-negative");

  Table tails;
  tails.name = "f_tails";
  tails.header = {"N", "tail_lo", "tail_hi", "bound"};
  bool tail_ok = true;
  for (std::uint64_t n = 1; 2 * n <= f_n; n *= 2) {
    const Enclosure e = f_measure_sum(target, n, 2 * n);
    const Rational bound = f_tail_bound(target, n, 2 * n);
    tail_ok &= e.hi <= bound;
    tails.rows.push_back({std::to_string(n), fmt(e.lo.get_d()), fmt(e.hi.get_d()), fmt(bound.get_d())});
  }
  ctx.result.tables.push_back(std::move(tails));
  ctx.assert_ge("dyadic tail bound", tail_ok ? 1.0 : 0.0, 1.0, "sum_{N}^{2N} lambda(F_n) <= sum r^{-D_n}, exact");

  // bracket totals: complete brackets k only
  std::map<unsigned, Rational> by_k;
  std::map<unsigned, std::uint64_t> last_in_k;
  for (std::uint64_t n = 1; n <= f_n; ++n) {
    by_k[target.bracket[n - 1]] += target.f_hi[n - 1];
    last_in_k[target.bracket[n - 1]] = n;
  }
  const unsigned last_k = target.bracket[f_n - 1];
  bool geometric = true;
  Rational prev = -1;
  for (const auto& [k, total] : by_k) {
    if (k == last_k || k == 0) continue;
    if (prev >= 0) geometric &= total <= prev;
    prev = total;
    ctx.metric("bracket_total_k" + std::to_string(k), total.get_d());
  }
  ctx.assert_ge("bracket totals non-increasing", geometric ? 1.0 : 0.0, 1.0);
  const Enclosure total = f_measure_sum(target, 1, f_n);
  ctx.metric("f_sum_lo", total.lo.get_d());
  ctx.metric("f_sum_hi", total.hi.get_d());

  TargetFamily raw_fam = fam;
  raw_fam.mode = TargetMode::raw;
  TargetFamily dy_fam = fam;
  dy_fam.mode = TargetMode::dyadic;
  const MembershipTable raw = MembershipTable::raw(raw_fam, n_sym);
  const MembershipTable dy = MembershipTable::dyadic(dy_fam, target);
  const std::size_t seeds = cfg.seeds.size();
  std::vector<std::vector<std::uint64_t>> counts(seeds);
  std::vector<std::uint64_t> undecided(seeds);
  parallel_for(seeds, cfg.workers, [&](std::uint64_t i) {
    DigitStream stream = DigitStream::seeded(cfg.seeds[i], cfg.base, digit_cap(n_sym));
    const SymmDiffResult r = symm_diff_count(stream, raw, dy, target, n_sym, checkpoints);
    counts[i] = r.checkpoint_counts;
    undecided[i] = r.undecided;
  });
  Table st;
  st.name = "symm_diff";
  st.header = {"seed", "N", "count"};
  double stable = 0.0;
  for (std::size_t i = 0; i < seeds; ++i) {
    const bool s = counts[i].front() == counts[i].back();
    stable += s;
    ctx.result.record.trials.push_back(
        {cfg.seeds[i], {{"count_first", static_cast<double>(counts[i].front())},
                        {"count_last", static_cast<double>(counts[i].back())},
                        {"stable", s ? 1.0 : 0.0}}});
    ctx.result.record.undecided += undecided[i];
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      st.rows.push_back({std::to_string(cfg.seeds[i]), std::to_string(checkpoints[c]), std::to_string(counts[i][c])});
    }
  }
  ctx.result.tables.push_back(std::move(st));
  const double frac = stable / static_cast<double>(seeds);
  ctx.metric("fraction_stable", frac);
  ctx.assert_ge("symmetric difference stable", frac, ctx.param<double>("min_fraction", 0.95),
                "count unchanged from the first to the last checkpoint");
}

// ---------------------------------------------------------------- concentration

void run_concentration(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const std::string mode = ctx.param<std::string>("mode", "bernoulli");
  std::vector<std::uint64_t> ns = ctx.param<std::vector<std::uint64_t>>("N_list", {});
  if (ns.empty()) ns = {cfg.n_max};
  std::sort(ns.begin(), ns.end());
  std::vector<std::uint64_t> lags = ctx.param<std::vector<std::uint64_t>>("lags", {1});
  if (mode == "bernoulli") lags = {0};
  else if (mode != "pairs") throw ConfigInvalid("params.mode must be 'bernoulli' or 'pairs'");
  const double bound = ctx.param<double>("bound", 3.0);
  const double slack = ctx.param<double>("monotone_slack", 0.10);

  Table t;
  t.name = "quantiles";
  t.header = {"N", "mode", "R", "terms", "q50", "q90", "q99", "max", "trials", "seed"};
  std::uint64_t index = 0;
  for (std::uint64_t lag : lags) {
    double prev_q99 = -1.0;
    for (std::uint64_t n : ns) {
      ConcentrationSpec spec;
      spec.mode = mode == "bernoulli" ? ConcentrationMode::bernoulli : ConcentrationMode::pairs;
      spec.n = n;
      spec.trials = ctx.param<std::uint64_t>("trials", 200);
      spec.seed = derive_seed(cfg.master_seed, index++);
      spec.a = *cfg.a;
      spec.base = cfg.base;
      spec.lag = lag == 0 ? 1 : lag;
      spec.lambda_class = ctx.param<int>("lambda_class", 1);
      spec.offset = ctx.param<std::uint64_t>("offset", 1);
      spec.condition = ctx.param<double>("condition", 1.0 / 7.0);
      spec.enforce_condition = ctx.param<bool>("enforce_condition", true);
      spec.tol = ctx.param<double>("sup_tol", 1e-3);
      spec.workers = cfg.workers;
      const std::string label = mode == "bernoulli" ? "bernoulli" : "pairs:m=" + std::to_string(lag);
      ctx.note(label + " N = " + std::to_string(n));
      QuantileReport rep;
      try {
        rep = concentration_trial(spec);
      } catch (const ConditionViolated& e) {
        throw ConfigInvalid(e.what());
      }
      t.rows.push_back({std::to_string(n), label, std::to_string(rep.spacing), std::to_string(rep.terms), fmt(rep.q50), fmt(rep.q90), fmt(rep.q99), fmt(rep.max),
                        std::to_string(rep.trials), std::to_string(rep.seed)});
      const std::string key = label + ":N=" + std::to_string(n);
      ctx.metric(key + ":q99", rep.q99);
      ctx.metric(key + ":unmet_tol", static_cast<double>(rep.unmet_tol));
      ctx.assert_le("q99 " + key, rep.q99, bound);
      if (prev_q99 >= 0.0) {
        ctx.assert_le("q99 non-increasing " + key, rep.q99, prev_q99 * (1.0 + slack),
                      "previous N q99 = " + fmt(prev_q99));
      }
      prev_q99 = rep.q99;
    }
  }
  ctx.result.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------- sup-bracket

// max |P| over t = j / points by one DFT of that length (any length works,
// frequencies are below it).
double dense_grid_max(const std::vector<double>& z, const std::vector<std::uint64_t>& s, std::uint64_t points) {
  static std::mutex plan_mutex;
  fftw_complex* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * points));
  std::fill_n(&buf[0][0], 2 * points, 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) buf[s[i] % points][0] += z[i];
  fftw_plan plan;
  {
    std::lock_guard lock(plan_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(points), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  double best = 0.0;
  for (std::uint64_t j = 0; j < points; ++j) best = std::max(best, std::hypot(buf[j][0], buf[j][1]));
  {
    std::lock_guard lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return best;
}

void run_sup_bracket(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto instances = ctx.param<std::uint64_t>("instances", 1000);
  const auto max_terms = ctx.param<std::uint64_t>("max_terms", 256);
  const auto points = ctx.param<std::uint64_t>("dense_points", 1000000);
  const double tol = ctx.tol(1e-3);
  std::vector<double> width(instances), dense(instances), lo(instances), hi(instances), slack(instances);
  std::vector<std::uint64_t> terms(instances), grid(instances);
  parallel_for(instances, cfg.workers, [&](std::uint64_t i) {
    SplitMix64 rng(derive_seed(cfg.master_seed, i));
    const std::uint64_t n = 1 + rng() % max_terms;
    std::vector<double> z(n);
    std::vector<std::uint64_t> s(n);
    for (std::uint64_t k = 1; k <= n; ++k) {
      z[k - 1] = 2.0 * rng.uniform() - 1.0;
      s[k - 1] = 1 + rng() % (k * k);
    }
    SupOptions opt;
    opt.tol = tol;
    const ExpSumProfile p = sup_bracket(z, s, opt);
    if (points <= *std::max_element(s.begin(), s.end())) throw ConfigInvalid("dense_points must exceed max s(n)");
    dense[i] = dense_grid_max(z, s, points);
    lo[i] = p.sup_lo;
    hi[i] = p.sup_hi;
    width[i] = p.sup_hi - p.sup_lo;
    slack[i] = p.lipschitz / (2.0 * static_cast<double>(points));
    terms[i] = n;
    grid[i] = p.grid_size;
  });
  Table t;
  t.name = "brackets";
  t.header = {"instance", "terms", "grid", "sup_lo", "sup_hi", "dense_max"};
  std::uint64_t above = 0, inconsistent = 0, literal = 0, narrow = 0;
  for (std::uint64_t i = 0; i < instances; ++i) {
    above += dense[i] > hi[i];
    inconsistent += lo[i] > dense[i] + slack[i];
    literal += dense[i] >= lo[i] && dense[i] <= hi[i];
    narrow += width[i] <= tol;
    t.rows.push_back({std::to_string(i), std::to_string(terms[i]), std::to_string(grid[i]), fmt(lo[i]), fmt(hi[i]),
                      fmt(dense[i])});
  }
  ctx.result.tables.push_back(std::move(t));
  const double n = static_cast<double>(instances);
  ctx.metric("dense_above_sup_hi", static_cast<double>(above));
  ctx.metric("sup_lo_above_dense_bracket", static_cast<double>(inconsistent));
  ctx.metric("literal_containment_fraction", static_cast<double>(literal) / n);
  ctx.metric("width_within_tol_fraction", static_cast<double>(narrow) / n);
  ctx.assert_le("dense max above sup_hi", static_cast<double>(above), 0.0);
  ctx.assert_le("sup_lo above the dense bracket", static_cast<double>(inconsistent), 0.0,
                "dense max + Lipschitz slack of its grid");
  ctx.assert_ge("width within tol", static_cast<double>(narrow) / n, 0.99);
}

// ---------------------------------------------------------------- vdc

void run_vdc(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto families = ctx.param<std::uint64_t>("families", 10000);
  const auto max_dim = ctx.param<std::uint64_t>("max_dim", 8);
  const auto max_n = ctx.param<std::uint64_t>("max_n", 64);
  const auto max_entry = ctx.param<long>("max_entry", 1000);
  std::vector<std::uint64_t> exact_violations(families), float_violations(families), checks(families);
  std::vector<double> min_slack(families);
  parallel_for(families, cfg.workers, [&](std::uint64_t f) {
    SplitMix64 rng(derive_seed(cfg.master_seed, f));
    const std::size_t d = 1 + rng() % max_dim;
    const std::size_t n = 1 + rng() % max_n;
    // mix of fully random and strongly correlated families
    const bool correlated = rng() % 2 == 0;
    std::vector<std::vector<long>> v(n, std::vector<long>(d));
    std::vector<long> base(d);
    for (auto& b : base) b = static_cast<long>(rng() % (2 * max_entry + 1)) - max_entry;
    for (auto& row : v) {
      for (std::size_t k = 0; k < d; ++k) {
        const long noise = static_cast<long>(rng() % (2 * max_entry + 1)) - max_entry;
        row[k] = correlated ? base[k] + noise / 8 : noise;
      }
    }
    std::vector<std::vector<double>> vd(n, std::vector<double>(d));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < d; ++k) vd[i][k] = static_cast<double>(v[i][k]);
    }
    // exact integer sweep over every M
    auto dot = [&](std::size_t i, std::size_t j) {
      __int128 s = 0;
      for (std::size_t k = 0; k < d; ++k) s += static_cast<__int128>(v[i][k]) * v[j][k];
      return s;
    };
    __int128 lhs = 0;
    for (std::size_t k = 0; k < d; ++k) {
      __int128 s = 0;
      for (std::size_t i = 0; i < n; ++i) s += v[i][k];
      lhs += s * s;
    }
    __int128 diag = 0;
    for (std::size_t i = 0; i < n; ++i) diag += dot(i, i);
    __int128 off = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m <= n; ++m) {
      __int128 lag = 0;
      for (std::size_t i = 0; i + m < n; ++i) lag += dot(i + m, i);
      off += lag < 0 ? -lag : lag;
      const __int128 rhs_times_m = 2 * static_cast<__int128>(n) * diag + 4 * static_cast<__int128>(n) * off;
      const __int128 lhs_times_m = lhs * static_cast<__int128>(m);
      if (lhs_times_m > rhs_times_m) ++exact_violations[f];
      const double slack_v = static_cast<double>(rhs_times_m - lhs_times_m) / static_cast<double>(m);
      worst = std::min(worst, slack_v);
      if (!vdc_check(vd, m).holds) ++float_violations[f];
      ++checks[f];
    }
    min_slack[f] = worst;
  });
  const double ev = std::accumulate(exact_violations.begin(), exact_violations.end(), 0.0);
  const double fv = std::accumulate(float_violations.begin(), float_violations.end(), 0.0);
  const double slack = *std::min_element(min_slack.begin(), min_slack.end());
  ctx.metric("families", static_cast<double>(families));
  ctx.metric("checks", std::accumulate(checks.begin(), checks.end(), 0.0));
  ctx.metric("exact_violations", ev);
  ctx.metric("float_violations", fv);
  ctx.metric("min_exact_slack", slack);
  ctx.assert_le("exact violations", ev, 0.0);
  ctx.assert_le("floating-point violations", fv, 0.0);
  ctx.assert_ge("min exact slack", slack, 0.0);
}

// ---------------------------------------------------------------- cov-decay

void run_cov_decay(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto m_max = ctx.param<std::uint64_t>("m_max", 30);
  const RationalInterval i(Rational(0), Rational(1, 3));
  Table t;
  t.name = "exact_cov";
  t.header = {"m", "cov", "scaled"};
  double c_fit = 0.0;
  for (std::uint64_t m = 0; m <= m_max; ++m) {
    const Rational cov = exact_cov(i, i, m, cfg.base);
    const Rational scaled = abs(cov) * Rational(ipow(static_cast<unsigned long>(cfg.base), m));
    c_fit = std::max(c_fit, scaled.get_d());
    t.rows.push_back({std::to_string(m), to_fraction_string(cov), fmt(scaled.get_d())});
  }
  ctx.result.tables.push_back(std::move(t));
  ctx.metric("fitted_C", c_fit);
  ctx.assert_le("fitted C", c_fit, ctx.param<double>("max_C", 2.0), "|Cov| <= C r^{-m}, m <= " + std::to_string(m_max));

  const auto pairs = ctx.param<std::uint64_t>("pairs", 50);
  const auto samples = ctx.param<std::uint64_t>("samples", 20000);
  const auto max_den = ctx.param<std::uint64_t>("max_den", 32);
  const auto max_lag = ctx.param<std::uint64_t>("max_lag", 8);
  const MPSystem sys = MPSystem::doubling(cfg.base);
  std::vector<double> z(pairs);
  Table mt;
  mt.name = "mc_cov";
  mt.header = {"pair", "I", "J", "m", "exact", "estimate", "stderr"};
  std::vector<std::vector<std::string>> rows(pairs);
  parallel_for(pairs, cfg.workers, [&](std::uint64_t p) {
    SplitMix64 rng(derive_seed(cfg.master_seed, p));
    auto interval = [&] {
      const std::uint64_t den = 2 + rng() % (max_den - 1);
      std::uint64_t x = rng() % (den + 1);
      std::uint64_t y = rng() % (den + 1);
      if (x == y) y = x == den ? x - 1 : x + 1;
      if (x > y) std::swap(x, y);
      Rational lo(big_from_u64(x), big_from_u64(den));
      Rational hi(big_from_u64(y), big_from_u64(den));
      lo.canonicalize();
      hi.canonicalize();
      return RationalInterval(lo, hi);
    };
    const RationalInterval a = interval();
    const RationalInterval b = interval();
    const std::uint64_t m = rng() % (max_lag + 1);
    const double exact = exact_cov(a, b, m, cfg.base).get_d();
    const CovEstimate est = mc_cov(sys, Observable::indicator(a.lo(), a.hi()), Observable::indicator(b.lo(), b.hi()),
                                   m, samples, derive_seed(cfg.master_seed ^ 0xc0fa11ULL, p));
    z[p] = est.stderr_ > 0.0 ? std::abs(est.estimate - exact) / est.stderr_
                             : (std::abs(est.estimate - exact) < 1e-12 ? 0.0 : 1e9);
    rows[p] = {std::to_string(p),
               "(" + to_fraction_string(a.lo()) + "," + to_fraction_string(a.hi()) + ")",
               "(" + to_fraction_string(b.lo()) + "," + to_fraction_string(b.hi()) + ")",
               std::to_string(m), fmt(exact), fmt(est.estimate), fmt(est.stderr_)};
  });
  mt.rows = std::move(rows);
  ctx.result.tables.push_back(std::move(mt));
  const double worst = *std::max_element(z.begin(), z.end());
  ctx.metric("max_z", worst);
  ctx.assert_le("max |mc - exact| / stderr", worst, 4.0, std::to_string(pairs) + " random interval pairs");
}

// ---------------------------------------------------------------- interaction

void run_interaction(Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<std::uint64_t> ns = ctx.param<std::vector<std::uint64_t>>("N_list", {});
  if (ns.empty()) {
    for (int e = 12; e <= 17; ++e) ns.push_back(std::uint64_t{1} << e);
  }
  std::sort(ns.begin(), ns.end());
  const SmallRational sb = to_small(*cfg.b);
  const std::uint64_t top = ns.back() + big_to_u64(floor_rational_power(ns.back(), sb.num, sb.den));
  const MembershipTable table = MembershipTable::raw(family_of(cfg), top);
  const std::size_t seeds = cfg.seeds.size();
  std::vector<std::vector<InteractionSum>> sums(seeds);
  std::vector<std::uint64_t> undecided(seeds);
  parallel_for(seeds, cfg.workers, [&](std::uint64_t i) {
    DigitStream stream = DigitStream::seeded(cfg.seeds[i], cfg.base, digit_cap(top));
    const HittingSequence h = build_hitting(stream, table, top);
    for (auto n : ns) sums[i].push_back(interaction_sum(h, *cfg.b, n));
    undecided[i] = h.undecided.size();
  });
  Table t;
  t.name = "interaction";
  t.header = {"seed", "N", "lags", "xx", "zz"};
  std::vector<double> mean_xx(ns.size(), 0.0);
  for (std::size_t i = 0; i < seeds; ++i) {
    TrialOutput out{cfg.seeds[i], {}};
    for (std::size_t k = 0; k < ns.size(); ++k) {
      const auto& s = sums[i][k];
      mean_xx[k] += static_cast<double>(s.xx) / static_cast<double>(seeds);
      t.rows.push_back({std::to_string(cfg.seeds[i]), std::to_string(ns[k]), std::to_string(s.lags),
                        std::to_string(s.xx), fmt(s.zz)});
      out.values["xx_N" + std::to_string(ns[k])] = static_cast<double>(s.xx);
    }
    ctx.result.record.trials.push_back(std::move(out));
    ctx.result.record.undecided += undecided[i];
  }
  ctx.result.tables.push_back(std::move(t));
  // least-squares slope of log(mean sum) on log N
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(ns.size());
  for (std::size_t j = 0; j < ns.size(); ++j) {
    const double x = std::log(static_cast<double>(ns[j]));
    const double y = std::log(mean_xx[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double predicted = Rational(1 + *cfg.b - 2 * *cfg.a).get_d();
  ctx.metric("slope", slope);
  ctx.metric("predicted_slope", predicted);
  ctx.assert_le("|slope - (1 + b - 2a)|", std::abs(slope - predicted), ctx.tol(0.15));
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  Context ctx{cfg, json::parse(cfg.params_json), json::parse(cfg.system_json), progress, {}};
  RunRecord& rec = ctx.result.record;
  rec.id = cfg.id;
  rec.theorem = cfg.theorem;
  rec.config_json = cfg.canonical_json();
  rec.config_hash = fnv1a_hex(rec.config_json);
  rec.version = code_version();

  const std::string& t = cfg.theorem;
  try {
    if (t == "A") run_single(ctx);
    else if (t == "B") run_double(ctx);
    else if (t == "C") run_semi_random(ctx);
    else if (t == "D") run_two_power(ctx);
    else if (t == "lemma-prop1") run_prop1(ctx);
    else if (t == "lemma-prop2") run_prop2(ctx);
    else if (t == "lln") run_lln(ctx);
    else if (t == "concentration") run_concentration(ctx);
    else if (t == "vdc") run_vdc(ctx);
    else if (t == "cov-decay") run_cov_decay(ctx);
    else if (t == "sup-bracket") run_sup_bracket(ctx);
    else if (t == "interaction") run_interaction(ctx);
  } catch (const CapExceeded& e) {
    throw PrecisionAbort(e.what());
  }
  rec.metrics["undecided"] = static_cast<double>(rec.undecided);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return std::move(ctx.result);
}

void write_run(const RunResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    out << content;
  };
  write("record.json", record_to_json(result.record));
  for (const auto& t : result.tables) write(t.name + ".csv", t.to_csv());
}

}  // namespace retlab::lab
