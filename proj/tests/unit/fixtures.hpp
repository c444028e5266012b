#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shortsim/belief.hpp"
#include "shortsim/planner.hpp"
#include "shortsim/rng.hpp"
#include "shortsim/scenario.hpp"
#include "shortsim/sim_engine.hpp"

namespace shortsim::testing {

/// One drug on one reliable supplier "P" with alternate "A"; no orders.
inline World single_drug_world(double qoh, double utz, const std::string& id = "D1") {
  World w;
  w.suppliers.push_back({"P", 1.0, false, 0.5, 2, {}});
  w.suppliers.push_back({"A", 1.0, false, 0.5, 2, {}});
  DrugTrueState d;
  d.id = id;
  d.qoh = qoh;
  d.utz = utz;
  d.base_utz = utz;
  d.primary_supplier = "P";
  d.alternate_supplier = "A";
  d.active_supplier = "P";
  w.drugs.push_back(d);
  return w;
}

/// Demand fixed to utz, no LMA compliance noise.
inline SimConfig exact_config() {
  SimConfig c;
  c.demand_variation = 0.0;
  c.lma_compliance_std = 0.0;
  return c;
}

inline DrugBelief make_belief(const std::string& id, double qoh, double qoh_std, double utz, double utz_std) {
  DrugBelief b;
  b.id = id;
  b.qoh_mean = qoh;
  b.qoh_std = qoh_std;
  b.utz_mean = utz;
  b.utz_std = utz_std;
  return b;
}

/// Reliable primary "P", alternate "A", no orders in flight.
inline SupplyBelief plain_supply(double routine = 0.0) {
  SupplyBelief s;
  s.active = {"P", 1.0, false, 0.5, 2, {}};
  s.other = {"A", 1.0, false, 0.5, 2, {}};
  s.primary = "P";
  s.alternate = "A";
  s.routine_order_qty = routine;
  return s;
}

/// Week-0 beliefs and supply views the way a run forms them.
struct Snapshot {
  World world;
  SimConfig sim;
  std::vector<DrugBelief> beliefs;
  std::vector<SupplyBelief> supply;
};

inline Snapshot snapshot(const ScenarioSpec& spec, std::uint64_t seed = 1) {
  Snapshot s;
  s.sim = effective_config(SimConfig{}, spec);
  s.world = make_world(spec, s.sim);
  Rng obs_rng(seed);
  for (const auto& d : s.world.drugs) {
    const PendingOrder* first = s.world.earliest_order(d);
    const std::optional<Week> erd = first ? std::optional<Week>(first->erd_week) : std::nullopt;
    const Observation obs = emit_observation(d, erd, ActionKind::Monitor, s.sim, obs_rng);
    s.beliefs.push_back(initial_belief(d, obs, s.world.supplier(d.active_supplier).reliability, s.sim));
  }
  for (std::size_t i = 0; i < s.world.drugs.size(); ++i) {
    s.supply.push_back(believed_supply(s.world, s.world.drugs[i], s.beliefs[i]));
  }
  return s;
}

/// A small valid scenario: three drugs on two primaries.
inline ScenarioSpec tiny_spec(int horizon = 6) {
  ScenarioSpec s;
  s.name = "tiny";
  s.horizon_weeks = horizon;
  s.seed = 7;
  s.demand_variation = 0.1;
  s.suppliers = {{"P1", 0.95, 2, false, 0.5, {{2, 2, 0.5}}},
                 {"P2", 0.9, 2, false, 0.5, {}},
                 {"A1", 0.88, 2, false, 0.5, {}}};
  s.drugs = {
      {"D1", 120.0, 20.0, 0.5, 0.0, "P1", "A1", 20.0, 0.0, LmaStatus::None, {{20.0, 0, 0}, {20.0, 1, 0}}},
      {"D2", 15.0, 10.0, 1.0, 0.4, "P1", "A1", 5.0, 0.0, LmaStatus::None, {{5.0, 1, 0}}},
      {"D3", 300.0, 25.0, 0.2, 0.0, "P2", "A1", 25.0, 0.002, LmaStatus::Soft, {}},
  };
  return s;
}

}  // namespace shortsim::testing
