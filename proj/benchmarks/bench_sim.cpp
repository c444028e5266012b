#include <benchmark/benchmark.h>

#include "shortsim/attention.hpp"
#include "shortsim/rng.hpp"
#include "shortsim/scenario.hpp"
#include "shortsim/sim_engine.hpp"

namespace {

using namespace shortsim;

void BM_AdvanceWeek(benchmark::State& state) {
  const ScenarioSpec spec = generate_scenario(3, 1);
  const SimConfig sim = effective_config(SimConfig{}, spec);
  JointAction monitor;
  for (const auto& d : spec.drugs) monitor[d.id] = ActionKind::Monitor;
  World world = make_world(spec, sim);
  Rng env(1), obs(2);
  for (auto _ : state) {
    if (world.week >= spec.horizon_weeks) {
      state.PauseTiming();
      world = make_world(spec, sim);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(advance_week(world, monitor, sim, env, obs));
  }
}
BENCHMARK(BM_AdvanceWeek);

void BM_EvaluateUrgency(benchmark::State& state) {
  std::vector<DrugBelief> beliefs;
  Rng rng(3);
  for (int i = 0; i < 19; ++i) {
    DrugBelief b;
    b.id = "D" + std::to_string(i);
    b.qoh_mean = 20.0 + 300.0 * sample_uniform(rng);
    b.qoh_std = 1.0 + 30.0 * sample_uniform(rng);
    b.utz_mean = 5.0 + 35.0 * sample_uniform(rng);
    b.utz_std = 0.5 + 5.0 * sample_uniform(rng);
    beliefs.push_back(b);
  }
  const AttentionWeights w;
  const SimConfig sim;
  const AttentionParams params;
  for (auto _ : state) {
    const UrgencyTable t = evaluate_urgency(beliefs, w, sim, params);
    benchmark::DoNotOptimize(select_focus(t.entries(beliefs), w));
  }
}
BENCHMARK(BM_EvaluateUrgency);

}  // namespace

BENCHMARK_MAIN();
