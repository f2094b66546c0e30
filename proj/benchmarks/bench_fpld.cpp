#include <benchmark/benchmark.h>

#include "fpld/saddlepoint.hpp"
#include "fpld/sampling.hpp"
#include "fpld/tilt.hpp"

using namespace fpld;

static void BM_SamplerDraw(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  SrsworSampler sampler(N);
  auto rng = block_stream(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sampler.draw(N / 4, rng).data());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SamplerDraw)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_McTailT(benchmark::State& state) {
  const auto pop = family_power(1000, 1.0);
  const auto d = Design::make(1000, 250);
  const std::vector<double> xs{2.0, 2.5, 3.0};
  McOptions opt{static_cast<std::uint64_t>(state.range(0)), 1, 1};
  for (auto _ : state) benchmark::DoNotOptimize(mc_tail_t(pop, d, xs, opt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_McTailT)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_SolveAlpha(benchmark::State& state) {
  const auto pop = standardize(family_power(static_cast<std::size_t>(state.range(0)), 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_alpha(pop.values(), 0.25, 0.05));
}
BENCHMARK(BM_SolveAlpha)->Arg(100)->Arg(1000)->Arg(10000);

static void BM_SaddlepointT(benchmark::State& state) {
  const auto pop = family_power(1000, 1.0);
  const auto d = Design::make(1000, 250);
  for (auto _ : state) benchmark::DoNotOptimize(saddlepoint_t_tail(pop, d, 2.5));
}
BENCHMARK(BM_SaddlepointT)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
