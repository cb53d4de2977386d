#include <benchmark/benchmark.h>

#include "retlab/seeding.hpp"
#include "retlab/spectral.hpp"

using namespace retlab;

namespace {

void random_poly(std::uint64_t n, std::uint64_t seed, std::vector<double>& z, std::vector<std::uint64_t>& s) {
  SplitMix64 rng(seed);
  z.resize(n);
  s.resize(n);
  for (std::uint64_t k = 0; k < n; ++k) {
    z[k] = 2.0 * rng.uniform() - 1.0;
    s[k] = k + 1;
  }
}

void BM_SupBracket(benchmark::State& state) {
  std::vector<double> z;
  std::vector<std::uint64_t> s;
  random_poly(state.range(0), 3, z, s);
  SupOptions opt;
  opt.tol = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(sup_bracket(z, s, opt).sup_hi);
}
BENCHMARK(BM_SupBracket)->RangeMultiplier(4)->Range(64, 1 << 14)->Unit(benchmark::kMillisecond);

void BM_EvalExpsum(benchmark::State& state) {
  std::vector<double> z;
  std::vector<std::uint64_t> s;
  random_poly(state.range(0), 5, z, s);
  double t = 0.123;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_expsum(z, s, t));
    t += 1e-7;
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvalExpsum)->Arg(256)->Arg(4096);

}  // namespace
