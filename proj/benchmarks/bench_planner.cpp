#include <benchmark/benchmark.h>

#include "shortsim/belief.hpp"
#include "shortsim/planner.hpp"
#include "shortsim/rng.hpp"
#include "shortsim/scenario.hpp"

namespace {

using namespace shortsim;

struct Week0 {
  SimConfig sim;
  std::vector<DrugBelief> beliefs;
  std::vector<SupplyBelief> supply;
};

Week0 week0(int set, std::uint64_t seed) {
  const ScenarioSpec spec = generate_scenario(set, seed);
  Week0 w;
  w.sim = effective_config(SimConfig{}, spec);
  const World world = make_world(spec, w.sim);
  Rng obs(seed);
  for (const auto& d : world.drugs) {
    const PendingOrder* first = world.earliest_order(d);
    const std::optional<Week> erd = first ? std::optional<Week>(first->erd_week) : std::nullopt;
    const Observation o = emit_observation(d, erd, ActionKind::Monitor, w.sim, obs);
    w.beliefs.push_back(initial_belief(d, o, world.supplier(d.active_supplier).reliability, w.sim));
    w.supply.push_back(believed_supply(world, d, w.beliefs.back()));
  }
  return w;
}

void BM_PlanDrug(benchmark::State& state) {
  const Week0 w = week0(2, 1);
  PlannerConfig p;
  p.rollouts = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_drug(w.beliefs[0], w.supply[0], 0, w.sim, p, ++seed));
  }
  state.SetItemsProcessed(state.iterations() * p.rollouts * static_cast<int64_t>(p.candidates.size()));
}
BENCHMARK(BM_PlanDrug)->Arg(8)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

// Planning cost against focus size; the attention agents' saving comes from here.
void BM_PlanJointFocus(benchmark::State& state) {
  const Week0 w = week0(1, 2);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<DrugId> focus;
  for (std::size_t i = 0; i < n; ++i) focus.push_back(w.beliefs[i].id);
  const PlannerConfig p;
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_joint(w.beliefs, w.supply, focus, 0, w.sim, p, 7));
  }
  state.counters["focus"] = static_cast<double>(n);
}
BENCHMARK(BM_PlanJointFocus)->Arg(1)->Arg(5)->Arg(10)->Arg(19)->Unit(benchmark::kMillisecond);

}  // namespace
