#include <benchmark/benchmark.h>

#include <numbers>

#include "bellspin/local_polytope.hpp"
#include "bellspin/parity_chsh.hpp"
#include "bellspin/quantum_search.hpp"

using namespace bellspin;

namespace {

void BM_LocalBound(benchmark::State& state) {
  const BellInequality ineq = randomInequality(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(localBound(ineq).value);
}
BENCHMARK(BM_LocalBound)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_LocalBoundReference(benchmark::State& state) {
  const BellInequality ineq = randomInequality(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(localBoundReference(ineq).value);
}
BENCHMARK(BM_LocalBoundReference)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_QuantumValue(benchmark::State& state) {
  const BellInequality ineq = randomInequality(4, 3);
  MeasurementSettings s;
  for (int i = 0; i < 4; ++i) {
    s.alpha.emplace_back(0.3 * i + 0.1, 0.7 * i);
    s.beta.emplace_back(0.5 * i + 0.2, 1.1 * i);
  }
  const BellOperatorEvaluator ev(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ev.maxValue(assembleWV(ineq, s)));
}
BENCHMARK(BM_QuantumValue)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

const Direction kA(0.7, 0.2), kB(2.1, -1.3);

void BM_JointDistribution(benchmark::State& state) {
  const SplitState s = splitState(oneAxisTwisted(static_cast<int>(state.range(0)), 0.4));
  for (auto _ : state) benchmark::DoNotOptimize(jointDistribution(s, kA, kB).n_atoms);
}
BENCHMARK(BM_JointDistribution)->Arg(10)->Arg(40)->Arg(80)->Unit(benchmark::kMicrosecond);

void BM_JointDistributionReference(benchmark::State& state) {
  const SplitState s = splitState(oneAxisTwisted(static_cast<int>(state.range(0)), 0.4));
  for (auto _ : state) benchmark::DoNotOptimize(jointDistributionReference(s, kA, kB).n_atoms);
}
BENCHMARK(BM_JointDistributionReference)->Arg(10)->Arg(40)->Arg(80)->Unit(benchmark::kMicrosecond);

const ChshSettings kSettings{{0.3, 0.1}, {1.4, 2.0}, {0.9, -0.4}, {2.5, 1.2}};

void BM_ChshBlocks(benchmark::State& state) {
  const ParityEvaluator ev(splitState(oneAxisTwisted(static_cast<int>(state.range(0)), std::numbers::pi / 2)));
  for (auto _ : state) benchmark::DoNotOptimize(ev.chsh(kSettings));
}
BENCHMARK(BM_ChshBlocks)->Arg(10)->Arg(20)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_ChshFactorized(benchmark::State& state) {
  const FactorizedParityEvaluator ev(oneAxisTwisted(static_cast<int>(state.range(0)), std::numbers::pi / 2));
  for (auto _ : state) benchmark::DoNotOptimize(ev.chsh(kSettings));
}
BENCHMARK(BM_ChshFactorized)->Arg(10)->Arg(20)->Arg(60)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
