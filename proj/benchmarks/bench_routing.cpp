#include <benchmark/benchmark.h>

#include "ammroute/harness.hpp"
#include "ammroute/oracle.hpp"
#include "ammroute/routing.hpp"

namespace {

using namespace ammroute;

std::vector<Pool> pools_for(const benchmark::State& state) {
  GeneratorSpec spec;
  spec.seed = 42;
  spec.kind = state.range(1) == 0 ? PoolKind::v2 : PoolKind::piecewise;
  return gen_pools(spec, static_cast<std::size_t>(state.range(0)));
}

void Args(benchmark::internal::Benchmark* b) {
  for (int kind : {0, 1}) {
    for (int n : {3, 10, 30, 100}) b->Args({n, kind});
  }
  b->ArgNames({"n", "piecewise"});
}

void BM_SolveExtended(benchmark::State& state) {
  const auto pools = pools_for(state);
  const SolverConfig cfg;
  std::size_t rounds = 0;
  for (auto _ : state) {
    const Solution s = solve_extended(pools, 100.0, cfg);
    rounds = s.rounds;
    benchmark::DoNotOptimize(s.objective);
  }
  state.counters["rounds"] = static_cast<double>(rounds);
}
BENCHMARK(BM_SolveExtended)->Apply(Args);

void BM_SolveBaseline(benchmark::State& state) {
  const auto pools = pools_for(state);
  const SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(solve_baseline(pools, 100.0, cfg).objective);
}
BENCHMARK(BM_SolveBaseline)->Apply(Args);

void BM_OracleSolve(benchmark::State& state) {
  const auto pools = pools_for(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle_solve(pools, 100.0, Domain::extended).objective);
  }
}
BENCHMARK(BM_OracleSolve)->Apply(Args);

void BM_QuoteExtended(benchmark::State& state) {
  const auto pools = pools_for(state);
  for (auto _ : state) {
    double acc = 0.0;
    for (const Pool& p : pools) {
      acc += quote_extended(p, 0.3 * reserve_x(p)) + quote_extended(p, -0.3 * reserve_x(p));
    }
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * 2 * state.range(0));
}
BENCHMARK(BM_QuoteExtended)->Args({100, 0})->Args({100, 1})->ArgNames({"n", "piecewise"});

}  // namespace

BENCHMARK_MAIN();
