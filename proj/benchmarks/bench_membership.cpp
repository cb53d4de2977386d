#include <benchmark/benchmark.h>

#include "retlab/averages.hpp"
#include "retlab/targets.hpp"

using namespace retlab;

namespace {

TargetFamily family(long num, long den) {
  TargetFamily f;
  f.a = Rational(num, den);
  return f;
}

void BM_TableBuild(benchmark::State& state) {
  const auto fam = family(2, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(MembershipTable::raw(fam, state.range(0)).size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TableBuild)->Arg(1 << 12)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

void BM_BuildHitting(benchmark::State& state) {
  const std::uint64_t n = state.range(0);
  const MembershipTable table = MembershipTable::raw(family(2, 5), n);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    DigitStream stream = DigitStream::seeded(seed++, 2);
    benchmark::DoNotOptimize(build_hitting(stream, table, n).hits.size());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_BuildHitting)->Arg(1 << 14)->Arg(1 << 17)->Unit(benchmark::kMillisecond);

void BM_SingleAverage(benchmark::State& state) {
  const std::uint64_t n = state.range(0);
  const MembershipTable table = MembershipTable::raw(family(3, 10), n);
  DigitStream stream = DigitStream::seeded(7, 2);
  const HittingSequence h = build_hitting(stream, table, n);
  const MPSystem sys = MPSystem::circle_rotation(Angle::golden());
  const Observable f = Observable::character(1);
  const auto grid = lacunary_grid(Rational(6, 5), n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(single_average(h, sys, f, 0, grid).values.back());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SingleAverage)->Arg(1 << 17)->Unit(benchmark::kMillisecond);

}  // namespace
