#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "critwave/dalembert.hpp"
#include "critwave/energy.hpp"
#include "critwave/ground_state.hpp"
#include "critwave/profiles.hpp"
#include "critwave/solver.hpp"

using namespace critwave;

namespace {

FieldState ground_state_on(double h, double r_max) {
  auto m = std::make_shared<const RadialMesh>(RadialMesh::uniform(h, r_max));
  return FieldState::from_functions(m, [](double r) { return eval_w(r); }, [](double) { return 0.0; });
}

void BM_Step(benchmark::State& state) {
  const FieldState s = ground_state_on(20.0 / state.range(0), 20.0);
  const double dt = 0.5 * s.mesh->min_spacing();
  for (auto _ : state) benchmark::DoNotOptimize(step(s, dt));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Step)->Arg(1000)->Arg(4000)->Arg(16000);

void BM_Energy(benchmark::State& state) {
  const FieldState s = ground_state_on(20.0 / state.range(0), 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(energy(s));
}
BENCHMARK(BM_Energy)->Arg(1000)->Arg(16000);

void BM_ChannelBatch(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(channel_batch(state.range(0), 7));
}
BENCHMARK(BM_ChannelBatch)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ExtractTwoBubbles(benchmark::State& state) {
  auto m = std::make_shared<const RadialMesh>(RadialMesh::graded(1e-9, 1.02, 2e4));
  const FieldState a = combine(1.0, sample_w(m, 1.0), 1.0, sample_w(m, 1e-3, -1));
  for (auto _ : state) benchmark::DoNotOptimize(extract(a));
}
BENCHMARK(BM_ExtractTwoBubbles)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
