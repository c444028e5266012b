#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "shortsim/belief.hpp"
#include "shortsim/sim_engine.hpp"
#include "shortsim/types.hpp"

namespace shortsim {

enum class RolloutPolicy : std::uint8_t {
  GreedyRunway,  // emergency / audit / soft-LMA cascade on the simulated runway
  Myopic,        // one-step lookahead over the candidate set
};

std::string_view to_string(RolloutPolicy p) noexcept;
RolloutPolicy rollout_policy_from_string(std::string_view name);

struct PlannerConfig {
  int horizon = 6;
  int rollouts = 32;
  double discount = 0.95;
  RolloutPolicy rollout_policy = RolloutPolicy::GreedyRunway;
  double audit_std_threshold = 20.0;  // greedy-runway audits above this notional qoh std
  double assumed_recovery_hazard = 0.5;  // weekly recovery chance of a supplier known to be disrupted
  bool enabled = true;                // false forces Monitor everywhere without planning
  std::vector<ActionKind> candidates{kAllActions.begin(), kAllActions.end()};

  void validate() const;
};

/// What the agent believes about one drug's supply channel. Pending orders
/// carry their quoted dates; the earliest one is re-dated from the belief
/// inside each rollout.
struct SupplyBelief {
  SupplierState active;  // reliability = reliability_est; disrupted only when reported
  SupplierState other;   // the non-active supplier at nominal reliability
  SupplierId primary;
  SupplierId alternate;
  std::optional<SupplierId> switch_target;
  Week switch_effective_week = 0;
  double routine_order_qty = 0.0;
};

/// Builds the agent-side view of a drug's supply from what it ordered and its belief.
/// Only agent-knowable facts are copied: order quantities and quoted dates,
/// lead times, nominal reliability of the inactive supplier.
SupplyBelief believed_supply(const World& world, const DrugTrueState& drug, const DrugBelief& belief,
                            double assumed_recovery_hazard = 0.5);

struct CandidateValue {
  ActionKind action = ActionKind::Monitor;
  double value = 0.0;
};

struct PlanResult {
  ActionKind action = ActionKind::Monitor;
  std::vector<CandidateValue> values;  // in candidate order
};

/// Monte-Carlo rollout planning for a single drug. Rollout r uses the stream
/// derive_seed(plan_seed, week, drug, r) for every candidate.
PlanResult plan_drug(const DrugBelief& belief, const SupplyBelief& supply, Week week, const SimConfig& sim,
                     const PlannerConfig& planner, std::uint64_t plan_seed);

/// Focus drugs are planned; everything else is monitored.
JointAction plan_joint(std::span<const DrugBelief> beliefs, std::span<const SupplyBelief> supply,
                       std::span<const DrugId> focus, Week week, const SimConfig& sim,
                       const PlannerConfig& planner, std::uint64_t plan_seed);

/// The greedy-runway rollout rule applied to a simulated drug state.
ActionKind greedy_runway_action(const DrugTrueState& drug, double notional_qoh_std, const SimConfig& sim,
                                const PlannerConfig& planner);

}  // namespace shortsim
