#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "zeta_ladder/moments.hpp"
#include "zeta_ladder/quadrature.hpp"
#include "zeta_ladder/weighted_moments.hpp"

namespace {

using namespace zeta_ladder;

void BM_IntegrateSin(benchmark::State& state) {
  PanelPolicy pol;
  for (auto _ : state) {
    auto r = integrate([](double t) { return std::sin(t); }, 0.0,
                       static_cast<double>(state.range(0)));
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_IntegrateSin)->Arg(100)->Arg(1000);

struct WCtx {
  std::shared_ptr<const ZEvaluator> ev = std::make_shared<const ZEvaluator>();
  std::shared_ptr<ThreadPool> pool = std::make_shared<ThreadPool>(1);
  PanelPolicy pol;
  std::shared_ptr<Z4PanelLattice> lat =
      std::make_shared<Z4PanelLattice>(ev, pol, pool);
  WeightedMomentContext wm{MuFamily{}, lat, pol};
};

WCtx& wctx() {
  static WCtx c;
  return c;
}

// first call pays the lattice fill; steady state measures assembly cost
void BM_WeightedMoment(benchmark::State& state) {
  auto& c = wctx();
  double x = static_cast<double>(state.range(0));
  double dx = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(weighted_fourth_moment(x + dx, c.wm));
    dx += 0.25;  // dodge the memo
    if (dx > 64.0) dx = 0.0;
  }
}
BENCHMARK(BM_WeightedMoment)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FourthMomentTable(benchmark::State& state) {
  auto& c = wctx();
  static auto table = std::make_shared<MomentTable>(c.lat, c.pol);
  table->extend_to(500.0);
  double T = 100.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(table->fourth_moment(T));
    T += 0.37;
    if (T > 480.0) T = 100.0;
  }
}
BENCHMARK(BM_FourthMomentTable)->Unit(benchmark::kMicrosecond);

}  // namespace
