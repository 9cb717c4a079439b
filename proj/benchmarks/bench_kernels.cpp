#include <benchmark/benchmark.h>

#include "cpdeflate/experiments.hpp"
#include "cpdeflate/solvers.hpp"

using namespace cpdeflate;

namespace {

Tensor cube(benchmark::State& state, Field field = Field::kReal) {
  const Index n = state.range(0);
  return random_tensor({n, n, n}, field, Distribution::kUniform, 7);
}

// Predicted multiplication count for one call, reported per second so the
// ratio against wall time is visible in the output.
void set_model(benchmark::State& state, const std::string& algorithm, Index rank, int k) {
  const Index n = state.range(0);
  state.counters["model_mults"] = benchmark::Counter(
      static_cast<double>(complexity_estimate(algorithm, {n, n, n}, rank, k).count),
      benchmark::Counter::kIsIterationInvariantRate);
  state.SetComplexityN(n * n * n);
}

void BM_Thosvd(benchmark::State& state) {
  const Tensor t = cube(state);
  for (auto _ : state) benchmark::DoNotOptimize(thosvd(t));
  set_model(state, "thosvd", 1, 1);
}

void BM_Seroap(benchmark::State& state) {
  const Tensor t = cube(state);
  for (auto _ : state) benchmark::DoNotOptimize(seroap(t));
  set_model(state, "seroap", 1, 1);
}

void BM_CoupledEigen(benchmark::State& state) {
  const Tensor t = cube(state);
  const Rank1Term init = seroap(t);
  for (auto _ : state) benchmark::DoNotOptimize(ce_refine(t, init));
  state.SetComplexityN(t.size());
}

void BM_AlsSweep(benchmark::State& state) {
  const Tensor t = cube(state);
  Rng rng(3);
  const CPModel init = random_cp_model(t.shape(), 3, Field::kReal, rng);
  for (auto _ : state) benchmark::DoNotOptimize(als(t, init, {1, 0.0, 0.0}));
  set_model(state, "als", 3, 0);
}

void BM_CgSweep(benchmark::State& state) {
  const Tensor t = cube(state);
  Rng rng(3);
  const CPModel init = random_cp_model(t.shape(), 3, Field::kReal, rng);
  for (auto _ : state) benchmark::DoNotOptimize(cg_els(t, init, {1, 0.0, 0.0}));
  set_model(state, "cg", 3, 0);
}

void BM_DcpdSweep(benchmark::State& state) {
  const Tensor t = cube(state);
  DcpdOptions opts;
  opts.stop = {1, 0.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(dcpd(t, 3, seroap_operator(), opts));
  set_model(state, "dcpd-seroap", 3, 1);
}

}  // namespace

BENCHMARK(BM_Thosvd)->RangeMultiplier(2)->Range(4, 32)->Complexity();
BENCHMARK(BM_Seroap)->RangeMultiplier(2)->Range(4, 32)->Complexity();
BENCHMARK(BM_CoupledEigen)->DenseRange(3, 8, 1)->Complexity();
BENCHMARK(BM_AlsSweep)->RangeMultiplier(2)->Range(4, 32)->Complexity();
BENCHMARK(BM_CgSweep)->RangeMultiplier(2)->Range(4, 16)->Complexity();
BENCHMARK(BM_DcpdSweep)->RangeMultiplier(2)->Range(4, 32)->Complexity();

BENCHMARK_MAIN();
