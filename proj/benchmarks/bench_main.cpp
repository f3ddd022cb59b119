#include <benchmark/benchmark.h>

#include "amw/geometry.hpp"
#include "amw/matching.hpp"
#include "amw/rng.hpp"
#include "amw/simulator.hpp"

namespace {

amw::IntMatrix random_queue(int n, std::uint64_t seed) {
  amw::rng::Xoshiro256StarStar g(seed);
  amw::IntMatrix q(n, 0);
  for (auto& v : q.flat()) v = static_cast<std::int64_t>(g() % 10000);
  return q;
}

void BM_MaxWeightMatching(benchmark::State& state) {
  const auto q = random_queue(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(amw::max_weight_matching(q));
}
BENCHMARK(BM_MaxWeightMatching)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_BruteForceMatching(benchmark::State& state) {
  const auto q = random_queue(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(amw::brute_force_matching(q));
}
BENCHMARK(BM_BruteForceMatching)->Arg(4)->Arg(6)->Arg(8);

void BM_ProjectCone(benchmark::State& state) {
  const auto q = random_queue(static_cast<int>(state.range(0)), 2).cast<double>();
  for (auto _ : state) benchmark::DoNotOptimize(amw::project_cone(q));
}
BENCHMARK(BM_ProjectCone)->Arg(4)->Arg(8)->Arg(16);

void BM_SimulatorSlot(benchmark::State& state) {
  amw::SimConfig c;
  c.n = static_cast<int>(state.range(0));
  c.traffic = amw::TrafficSpec::uniform(c.n, 0.04);
  c.horizon = std::int64_t{1} << 62;
  c.warmup = 0;
  c.sample_ssc_every = 100;
  amw::Simulator sim(c);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimulatorSlot)->Arg(4)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
