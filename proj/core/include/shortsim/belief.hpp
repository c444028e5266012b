#pragma once

#include <optional>
#include <utility>

#include "shortsim/sim_engine.hpp"
#include "shortsim/types.hpp"

namespace shortsim {

/// Independent scalar Gaussian beliefs over one drug's hidden quantities.
struct DrugBelief {
  DrugId id;
  double qoh_mean = 0.0;
  double qoh_std = 1.0;
  double utz_mean = 0.0;
  double utz_std = 1.0;
  std::optional<double> erd_mean;  // weeks; absent when no pending order is known
  double erd_std = 1.0;
  Week last_audit_week = 0;
  double reliability_est = 1.0;
  bool supplier_disrupted = false;  // a disruption of the active supplier was reported last week
  LmaStatus lma_known = LmaStatus::None;
  double reputation = 0.0;
  double clinical_impact = 0.0;

  bool operator==(const DrugBelief&) const = default;
};

struct Gaussian {
  double mean = 0.0;
  double std = 1.0;
};

/// Scalar conjugate update. obs_std == +inf leaves the prior untouched; prior_std == 0 is absorbing.
Gaussian conjugate_update(Gaussian prior, double obs, double obs_std);

/// Time update: diffuse stds (capped) and propagate means by expected consumption.
/// `inflow` is inventory known to have arrived this week (observed receipts).
DrugBelief predict(const DrugBelief& belief, const SimConfig& config, double inflow = 0.0);

/// Measurement update from one observation of the same drug. `week` is the
/// index recorded as the last audit when the observation came from an audit.
DrugBelief update(const DrugBelief& belief, const Observation& obs, Week week);

/// Known deterministic effect of the agent's own action on its belief (LMA rescaling).
DrugBelief apply_action_effect(const DrugBelief& belief, ActionKind action, const SimConfig& config);

struct RunwayBelief {
  double mean = 0.0;
  double std = 0.0;
};

inline constexpr double kRunwayEpsilon = 1e-6;

/// Runway mean and first-order (delta-method) std.
RunwayBelief belief_runway(const DrugBelief& belief, const SimConfig& config);

/// Observable per-drug events of one week.
struct DrugEvents {
  int deliveries_on_time = 0;  // supplier orders that arrived (emergency receipts excluded)
  int delivery_failures = 0;
  bool stockout = false;
  bool supplier_disrupted = false;
  LmaStatus lma = LmaStatus::None;
};

/// Reliability smoothing from delivery outcomes and the reputation recursion.
DrugBelief record_events(const DrugBelief& belief, const DrugEvents& events, const SimConfig& config);

/// Belief formed from a single initial observation.
DrugBelief initial_belief(const DrugTrueState& drug, const Observation& obs, double reliability_prior,
                          const SimConfig& config);

}  // namespace shortsim
