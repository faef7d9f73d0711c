#include <benchmark/benchmark.h>

#include "zeta_ladder/zeta_core.hpp"

namespace {

const zeta_ladder::ZEvaluator& evaluator() {
  static const zeta_ladder::ZEvaluator ev;
  return ev;
}

void BM_HardyZ(benchmark::State& state) {
  const auto& ev = evaluator();
  double t = static_cast<double>(state.range(0));
  double dt = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ev.hardy_z(t + dt));
    dt += 1e-3;  // defeat value caching without moving the height regime
    if (dt > 1.0) dt = 0.0;
  }
}
BENCHMARK(BM_HardyZ)->Arg(100)->Arg(2000)->Arg(20000)->Arg(200000);

void BM_Theta(benchmark::State& state) {
  const auto& ev = evaluator();
  double t = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ev.theta(t));
  }
}
BENCHMARK(BM_Theta)->Arg(100)->Arg(100000);

void BM_Z4Block(benchmark::State& state) {
  const auto& ev = evaluator();
  std::vector<double> t(256), out(256);
  double base = static_cast<double>(state.range(0));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = base + 0.01 * i;
  for (auto _ : state) {
    ev.z4_block(t, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * t.size());
}
BENCHMARK(BM_Z4Block)->Arg(20000)->Arg(400000);

}  // namespace
