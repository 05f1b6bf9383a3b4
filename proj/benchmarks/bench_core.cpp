#include <benchmark/benchmark.h>

#include <random>

#include "qaia/descent.hpp"
#include "qaia/io.hpp"
#include "qaia/oracle.hpp"
#include "qaia/sampler.hpp"
#include "qaia/solvers.hpp"

using namespace qaia;

namespace {

IsingInstance glass(std::int64_t n) {
  return generate_random_instance(InstanceKind::spin_glass, static_cast<std::size_t>(n), 1);
}

void BM_Energy(benchmark::State& st) {
  const auto inst = glass(st.range(0));
  auto cfg = SpinConfig::all_up(inst.size());
  for (auto _ : st) benchmark::DoNotOptimize(energy(inst, cfg));
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_Energy)->Arg(16)->Arg(64)->Arg(256);

template <Variant V>
void BM_Step(benchmark::State& st) {
  const auto inst = glass(st.range(0));
  const auto params = default_params(V, inst);
  std::mt19937_64 rng(3);
  auto state = initial_state(V, inst.size(), params, rng);
  const std::int64_t steps = std::visit([](const auto& p) { return p.steps; }, params);
  for (auto _ : st) {
    // stay inside the pump ramp
    if (state.step_index >= steps) {
      state.t = 0.0;
      state.step_index = 0;
    }
    if constexpr (V == Variant::dsb) {
      const auto& p = std::get<SbParams>(params);
      step_dsb(state, inst, p, p.dt);
    } else {
      const auto& p = std::get<CimParams>(params);
      if constexpr (V == Variant::cac) step_cac(state, inst, p, p.dt);
      if constexpr (V == Variant::cfc) step_cfc(state, inst, p, p.dt);
      if constexpr (V == Variant::sfc) step_sfc(state, inst, p, p.dt);
    }
    benchmark::DoNotOptimize(state.x.data());
  }
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_Step<Variant::cac>)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Step<Variant::cfc>)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Step<Variant::sfc>)->Arg(16)->Arg(64)->Arg(256);
BENCHMARK(BM_Step<Variant::dsb>)->Arg(16)->Arg(64)->Arg(256);

void BM_Descent(benchmark::State& st) {
  const auto inst = glass(st.range(0));
  std::mt19937_64 rng(5);
  std::vector<SpinConfig> starts;
  for (int k = 0; k < 64; ++k) {
    std::vector<std::int8_t> s(inst.size());
    for (auto& v : s) v = (rng() & 1) ? 1 : -1;
    starts.emplace_back(s);
  }
  std::size_t k = 0;
  for (auto _ : st) benchmark::DoNotOptimize(steepest_descent(inst, starts[k++ % starts.size()]).energy);
}
BENCHMARK(BM_Descent)->Arg(16)->Arg(64)->Arg(256);

void BM_BruteForce(benchmark::State& st) {
  const auto inst = glass(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(brute_force(inst).ground_energy);
  st.SetItemsProcessed(st.iterations() * (std::int64_t{1} << st.range(0)));
}
BENCHMARK(BM_BruteForce)->Arg(12)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Shot(benchmark::State& st) {
  const auto v = kAllVariants[st.range(0)];
  const auto inst = glass(16);
  const auto params = default_params(v, inst);
  std::uint64_t seed = 0;
  for (auto _ : st) benchmark::DoNotOptimize(run_shot(v, inst, params, seed++).energy);
  st.SetLabel(std::string(to_string(v)));
}
BENCHMARK(BM_Shot)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
