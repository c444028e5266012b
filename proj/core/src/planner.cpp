#include "shortsim/planner.hpp"

#include <algorithm>
#include <cmath>

#include "shortsim/rng.hpp"

namespace shortsim {

std::string_view to_string(RolloutPolicy p) noexcept {
  switch (p) {
    case RolloutPolicy::GreedyRunway: return "greedy-runway";
    case RolloutPolicy::Myopic: return "myopic";
  }
  return "?";
}

RolloutPolicy rollout_policy_from_string(std::string_view name) {
  if (name == "greedy-runway") return RolloutPolicy::GreedyRunway;
  if (name == "myopic") return RolloutPolicy::Myopic;
  throw ValidationError("planner.rollout_policy", "unknown rollout policy '" + std::string(name) + "'");
}

void PlannerConfig::validate() const {
  if (horizon < 1) throw ValidationError("planner.horizon", "must be >= 1");
  if (rollouts < 1) throw ValidationError("planner.rollouts", "must be >= 1");
  if (!(discount > 0.0 && discount <= 1.0)) throw ValidationError("planner.discount", "must be in (0, 1]");
  if (candidates.empty()) throw ValidationError("planner.candidates", "must be nonempty");
  if (!(assumed_recovery_hazard >= 0.0 && assumed_recovery_hazard <= 1.0)) {
    throw ValidationError("planner.assumed_recovery_hazard", "must be in [0, 1]");
  }
}

SupplyBelief believed_supply(const World& world, const DrugTrueState& drug, const DrugBelief& belief,
                            double assumed_recovery_hazard) {
  SupplyBelief s;
  s.primary = drug.primary_supplier;
  s.alternate = drug.alternate_supplier;
  s.switch_target = drug.switch_target;
  s.switch_effective_week = drug.switch_effective_week;
  s.routine_order_qty = drug.routine_order_qty;

  auto view = [&](const SupplierId& id, bool is_active) {
    const SupplierState& truth = world.supplier(id);
    SupplierState v;
    v.id = truth.id;
    v.lead_time_weeks = truth.lead_time_weeks;
    v.reliability = is_active ? belief.reliability_est : truth.reliability;
    v.disrupted = is_active && belief.supplier_disrupted;
    v.recovery_hazard = assumed_recovery_hazard;
    for (const auto& o : truth.pending_orders) {
      if (o.drug != drug.id) continue;
      PendingOrder b = o;
      b.erd_week = std::max(o.quoted_week, world.week);
      v.pending_orders.push_back(b);
    }
    std::stable_sort(v.pending_orders.begin(), v.pending_orders.end(),
                     [](const PendingOrder& a, const PendingOrder& c) { return a.erd_week < c.erd_week; });
    return v;
  };
  s.active = view(drug.active_supplier, true);
  const SupplierId& other_id =
      drug.active_supplier == drug.primary_supplier ? drug.alternate_supplier : drug.primary_supplier;
  if (!other_id.empty()) s.other = view(other_id, false);
  return s;
}

ActionKind greedy_runway_action(const DrugTrueState& drug, double notional_qoh_std, const SimConfig& sim,
                                const PlannerConfig& planner) {
  const double runway = compute_runway(drug.qoh, drug.utz, sim.runway_cap);
  if (runway < 1.0) return ActionKind::GrayMarketBuy;
  if (notional_qoh_std > planner.audit_std_threshold) return ActionKind::AuditInventory;
  if (runway < 3.0) return drug.lma == LmaStatus::None ? ActionKind::ApplySoftLMA : ActionKind::Monitor;
  return ActionKind::Monitor;
}

namespace {

// One sampled ground-truth world for a single drug, drawn from the belief.
World sample_particle(const DrugBelief& belief, const SupplyBelief& supply, Week week, const SimConfig& sim,
                      Rng& rng) {
  World w;
  w.week = week;
  DrugTrueState d;
  d.id = belief.id;
  d.qoh = std::max(0.0, sample_normal(rng, belief.qoh_mean, belief.qoh_std));
  d.utz = std::max(0.0, sample_normal(rng, belief.utz_mean, belief.utz_std));
  const double keep = 1.0 - lma_effect_fraction(belief.lma_known, sim);
  d.base_utz = keep > 0.0 ? d.utz / keep : d.utz;
  d.lma = belief.lma_known;
  d.primary_supplier = supply.primary;
  d.alternate_supplier = supply.alternate;
  d.active_supplier = supply.active.id;
  d.switch_target = supply.switch_target;
  d.switch_effective_week = supply.switch_effective_week;
  d.reputation = belief.reputation;
  d.clinical_impact = belief.clinical_impact;
  d.routine_order_qty = supply.routine_order_qty;

  w.suppliers.push_back(supply.active);
  if (!supply.other.id.empty()) w.suppliers.push_back(supply.other);

  // Orders keep their quoted date until they miss it; only an overdue earliest
  // order is re-dated from the erd belief.
  const double erd_draw = belief.erd_mean ? sample_normal(rng, *belief.erd_mean, belief.erd_std) : 0.0;
  if (belief.erd_mean) {
    PendingOrder* earliest = nullptr;
    SupplierState* owner = nullptr;
    for (auto& s : w.suppliers) {
      for (auto& o : s.pending_orders) {
        if (o.emergency) continue;
        if (earliest == nullptr || o.erd_week < earliest->erd_week) {
          earliest = &o;
          owner = &s;
        }
        break;
      }
    }
    if (earliest != nullptr && earliest->quoted_week < week) {
      earliest->erd_week = std::max(week, static_cast<Week>(std::lround(erd_draw)));
      std::stable_sort(owner->pending_orders.begin(), owner->pending_orders.end(),
                       [](const PendingOrder& a, const PendingOrder& b) { return a.erd_week < b.erd_week; });
    }
  }
  w.drugs.push_back(std::move(d));
  return w;
}

ActionKind myopic_action(const World& world, const SimConfig& sim, const PlannerConfig& planner, const Rng& rng) {
  ActionKind best = planner.candidates.front();
  double best_value = 0.0;
  bool first = true;
  for (ActionKind a : planner.candidates) {
    World trial = world;
    Rng trial_rng = rng;
    const ActionKind one[1] = {a};
    const double r = transition(trial, one, sim, trial_rng).reward;
    if (first || r > best_value) {
      best = a;
      best_value = r;
      first = false;
    }
  }
  return best;
}

double rollout(World world, ActionKind first, double notional_std, const SimConfig& sim,
               const PlannerConfig& planner, Rng& rng) {
  double value = 0.0;
  double weight = 1.0;
  for (int h = 0; h < planner.horizon; ++h) {
    ActionKind a = first;
    if (h > 0) {
      a = planner.rollout_policy == RolloutPolicy::Myopic
              ? myopic_action(world, sim, planner, rng)
              : greedy_runway_action(world.drugs.front(), notional_std, sim, planner);
    }
    const ActionKind one[1] = {a};
    value += weight * transition(world, one, sim, rng).reward;
    weight *= planner.discount;
    notional_std = a == ActionKind::AuditInventory ? sim.audit_qoh_std
                                                   : std::min(sim.qoh_std_cap, notional_std + sim.qoh_diffusion);
  }
  return value;
}

}  // namespace

PlanResult plan_drug(const DrugBelief& belief, const SupplyBelief& supply, Week week, const SimConfig& sim,
                     const PlannerConfig& planner, std::uint64_t plan_seed) {
  PlanResult result;
  const auto& candidates = planner.candidates;
  std::vector<double> totals(candidates.size(), 0.0);
  const std::uint64_t drug_key = hash_label(belief.id);

  for (int r = 0; r < planner.rollouts; ++r) {
    const std::uint64_t seed =
        derive_seed(plan_seed, static_cast<std::uint64_t>(week), drug_key, static_cast<std::uint64_t>(r));
    Rng particle_rng(seed);
    const World particle = sample_particle(belief, supply, week, sim, particle_rng);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      Rng rng = particle_rng;  // common random numbers across candidates
      totals[c] += rollout(particle, candidates[c], belief.qoh_std, sim, planner, rng);
    }
  }

  result.values.reserve(candidates.size());
  std::size_t best = 0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double v = totals[c] / static_cast<double>(planner.rollouts);
    result.values.push_back({candidates[c], v});
    if (c == 0) continue;
    const double bv = result.values[best].value;
    if (v > bv || (v == bv && sim.action_cost(candidates[c]) > sim.action_cost(candidates[best]))) best = c;
  }
  result.action = candidates[best];
  return result;
}

JointAction plan_joint(std::span<const DrugBelief> beliefs, std::span<const SupplyBelief> supply,
                       std::span<const DrugId> focus, Week week, const SimConfig& sim,
                       const PlannerConfig& planner, std::uint64_t plan_seed) {
  if (supply.size() != beliefs.size()) throw ContractError("plan_joint: one supply belief per drug required");
  JointAction joint;
  for (const auto& b : beliefs) joint[b.id] = ActionKind::Monitor;
  if (!planner.enabled) return joint;
  for (const auto& id : focus) {
    auto it = std::find_if(beliefs.begin(), beliefs.end(), [&](const DrugBelief& b) { return b.id == id; });
    if (it == beliefs.end()) throw ContractError("plan_joint: focus drug not in belief set: " + id);
    const auto i = static_cast<std::size_t>(it - beliefs.begin());
    joint[id] = plan_drug(beliefs[i], supply[i], week, sim, planner, plan_seed).action;
  }
  return joint;
}

}  // namespace shortsim
