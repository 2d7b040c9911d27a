#include <benchmark/benchmark.h>

#include "boolmf/annealer.hpp"
#include "boolmf/energy.hpp"
#include "boolmf/instgen.hpp"

using namespace boolmf;

namespace {

PlantedInstance instance(std::size_t mn, std::size_t k, double rho) {
  GeneratorConfig g;
  g.m = mn;
  g.n = mn;
  g.rank = k;
  g.rho = rho;
  g.rho_tol = 0.02;
  g.seed = 1;
  return generate(g);
}

// flip_delta alone over every spin of a random state.
void BM_FlipDelta(benchmark::State& st) {
  const auto mn = static_cast<std::size_t>(st.range(0));
  const auto k = static_cast<std::size_t>(st.range(1));
  const auto cost = st.range(2) ? CostKind::RectifiedLinear : CostKind::Binary;
  const auto inst = instance(mn, k, 0.3);
  SolverConfig c;
  c.rank = k;
  c.seed = 2;
  c.mode = cost == CostKind::Binary ? Mode::BC : Mode::RLU;
  FactorState s = init_state(inst.v, c);
  std::size_t spin = 0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(s.flip_delta(s.site(spin)));
    if (++spin == s.spin_count()) spin = 0;
  }
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_FlipDelta)->ArgsProduct({{30, 100}, {8}, {0, 1}});

// Whole annealer sweeps; reports MCS per second.
void BM_Mcs(benchmark::State& st) {
  const auto mode = static_cast<Mode>(st.range(0));
  const auto inst = instance(30, 8, 0.1);
  SolverConfig c;
  c.mode = mode;
  c.rank = 8;
  c.max_mcs = 1000;
  c.target = Target::BestWithinBudget;
  c.schedule.stall_limit_mcs = 0;
  std::uint64_t mcs = 0;
  for (auto _ : st) {
    c.seed = mcs;
    const auto r = run(inst.v, c);
    mcs += r.total_mcs;
    benchmark::DoNotOptimize(r.best_energy);
  }
  st.counters["mcs_per_s"] = benchmark::Counter(static_cast<double>(mcs), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Mcs)->Arg(static_cast<int>(Mode::BC))->Arg(static_cast<int>(Mode::RLU))->Unit(benchmark::kMillisecond);

}  // namespace

// The packaged libbenchmark_main.a carries LTO bytecode from another compiler
// release, so main comes from the macro instead.
BENCHMARK_MAIN();
