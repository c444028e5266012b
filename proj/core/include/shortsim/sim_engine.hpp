#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "shortsim/rng.hpp"
#include "shortsim/types.hpp"

namespace shortsim {

using JointAction = std::map<DrugId, ActionKind>;

struct DisruptionWindow {
  SupplierId supplier;
  Week start_week = 0;
  int duration_weeks = 1;  // guaranteed length; afterwards recovery is stochastic
  double recovery_hazard = 0.5;

  bool operator==(const DisruptionWindow&) const = default;
};

struct Observation {
  DrugId drug;
  ActionKind source = ActionKind::Monitor;
  double qoh_obs = 0.0;
  double utz_obs = 0.0;
  std::optional<double> erd_obs;
  double obs_std_qoh = 1.0;
  double obs_std_utz = 1.0;
  double obs_std_erd = 1.0;  // meaningful only when erd_obs is present
};

struct Delivery {
  DrugId drug;
  double quantity = 0.0;
  bool emergency = false;
};

struct WeeklyOutcome {
  Week week = 0;
  double reward = 0.0;
  std::map<DrugId, double> per_drug_scores;
  std::vector<DrugId> stockout_events;
  std::vector<Delivery> deliveries;
  std::vector<DrugId> delivery_failures;   // one entry per supplier order that missed its date
  std::vector<DrugId> disruption_events;   // drugs whose active supplier was disrupted
  std::vector<double> realized_consumption;  // per drug, in world order
  std::vector<Observation> observations;
};

/// Ground truth of the whole pharmacy at the start of `week`.
struct World {
  Week week = 0;
  std::vector<DrugTrueState> drugs;
  std::vector<SupplierState> suppliers;
  std::vector<DisruptionWindow> disruptions;
  std::map<SupplierId, Week> disruption_min_end;

  SupplierState& supplier(const SupplierId& id);
  const SupplierState& supplier(const SupplierId& id) const;
  std::size_t drug_index(const DrugId& id) const;

  /// Earliest non-emergency pending order of a drug across its suppliers.
  const PendingOrder* earliest_order(const DrugTrueState& drug) const;
  std::vector<PendingOrder> orders_for(const DrugTrueState& drug) const;
};

/// Steps one week in place: action effects, routine ordering, deliveries,
/// consumption, stockout flags, reputation, supplier recovery, scoring.
/// Observations are not emitted. `actions` is indexed like `world.drugs`.
WeeklyOutcome transition(World& world, std::span<const ActionKind> actions,
                         const SimConfig& config, Rng& env_rng);

/// Validated full step: `transition` followed by one observation per drug.
/// Throws ContractError when `joint_action` names an unknown drug or misses one.
WeeklyOutcome advance_week(World& world, const JointAction& joint_action,
                           const SimConfig& config, Rng& env_rng, Rng& obs_rng);

Observation emit_observation(const DrugTrueState& drug, std::optional<Week> earliest_erd,
                             ActionKind action, const SimConfig& config, Rng& obs_rng);

/// Passive (non-audit) qoh observation std.
double passive_qoh_std(double qoh, const SimConfig& config) noexcept;

double bucket_score(double runway, const SimConfig& config) noexcept;

/// Per-drug state score: runway bucket, stockout penalty, weekly LMA holding cost.
double score_drug(const DrugTrueState& drug, const SimConfig& config);

/// Returns (total reward, per-drug scores); total adds the action costs.
std::pair<double, std::map<DrugId, double>> score_week(const std::vector<DrugTrueState>& drugs,
                                                       const JointAction& joint_action,
                                                       const SimConfig& config);

/// Sample a utilization draw for a restriction level: base*(1-effect)*compliance noise.
double lma_effect_fraction(LmaStatus lma, const SimConfig& config) noexcept;

}  // namespace shortsim
