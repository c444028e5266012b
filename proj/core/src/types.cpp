#include "shortsim/types.hpp"

#include <algorithm>
#include <cmath>

namespace shortsim {

ActionCategory category(ActionKind a) noexcept {
  switch (a) {
    case ActionKind::Monitor:
    case ActionKind::AuditInventory:
      return ActionCategory::Monitoring;
    case ActionKind::ApplySoftLMA:
    case ActionKind::ApplyHardLMA:
    case ActionKind::LiftLMA:
      return ActionCategory::DemandLimits;
    case ActionKind::ContactManufacturer:
    case ActionKind::QuerySupplierERD:
      return ActionCategory::InformationGathering;
    case ActionKind::SwitchToAlternate:
    case ActionKind::SwitchToPrimary:
    case ActionKind::ExpediteOrder:
      return ActionCategory::SwitchingSuppliers;
    case ActionKind::EmergencyBuy:
    case ActionKind::GrayMarketBuy:
      return ActionCategory::Emergency;
  }
  return ActionCategory::Monitoring;
}

std::string_view to_string(ActionKind a) noexcept {
  switch (a) {
    case ActionKind::Monitor: return "Monitor";
    case ActionKind::AuditInventory: return "AuditInventory";
    case ActionKind::ApplySoftLMA: return "ApplySoftLMA";
    case ActionKind::ApplyHardLMA: return "ApplyHardLMA";
    case ActionKind::LiftLMA: return "LiftLMA";
    case ActionKind::ContactManufacturer: return "ContactManufacturer";
    case ActionKind::QuerySupplierERD: return "QuerySupplierERD";
    case ActionKind::SwitchToAlternate: return "SwitchToAlternate";
    case ActionKind::SwitchToPrimary: return "SwitchToPrimary";
    case ActionKind::ExpediteOrder: return "ExpediteOrder";
    case ActionKind::EmergencyBuy: return "EmergencyBuy";
    case ActionKind::GrayMarketBuy: return "GrayMarketBuy";
  }
  return "?";
}

std::string_view to_string(ActionCategory c) noexcept {
  switch (c) {
    case ActionCategory::Monitoring: return "Monitoring";
    case ActionCategory::DemandLimits: return "DemandLimits";
    case ActionCategory::InformationGathering: return "InformationGathering";
    case ActionCategory::SwitchingSuppliers: return "SwitchingSuppliers";
    case ActionCategory::Emergency: return "Emergency";
  }
  return "?";
}

std::string_view to_string(LmaStatus s) noexcept {
  switch (s) {
    case LmaStatus::None: return "None";
    case LmaStatus::Soft: return "Soft";
    case LmaStatus::Hard: return "Hard";
  }
  return "?";
}

ActionKind action_from_string(std::string_view name) {
  for (ActionKind a : kAllActions) {
    if (to_string(a) == name) return a;
  }
  throw ContractError("unknown action: " + std::string(name));
}

LmaStatus lma_from_string(std::string_view name) {
  for (LmaStatus s : {LmaStatus::None, LmaStatus::Soft, LmaStatus::Hard}) {
    if (to_string(s) == name) return s;
  }
  throw ContractError("unknown LMA status: " + std::string(name));
}

double compute_runway(double qoh, double utz, double runway_cap) {
  if (!(qoh >= 0.0) || !(utz >= 0.0) || !(runway_cap > 0.0)) {
    throw ContractError("compute_runway: inputs must be non-negative and cap positive");
  }
  if (utz == 0.0) return runway_cap;
  return std::clamp(qoh / utz, 0.0, runway_cap);
}

namespace {

void require_probability(double p, const char* field) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(field, "must be in [0, 1]");
}

void require_positive(double v, const char* field) {
  if (!(v > 0.0)) throw ValidationError(field, "must be > 0");
}

void require_nonnegative(double v, const char* field) {
  if (!(v >= 0.0)) throw ValidationError(field, "must be >= 0");
}

}  // namespace

void SimConfig::validate() const {
  require_positive(runway_cap, "sim.runway_cap");
  if (reward_buckets.empty()) throw ValidationError("sim.reward_buckets", "must be nonempty");
  for (std::size_t i = 1; i < reward_buckets.size(); ++i) {
    if (!(reward_buckets[i].lower_bound < reward_buckets[i - 1].lower_bound)) {
      throw ValidationError("sim.reward_buckets[" + std::to_string(i) + "].lower_bound",
                            "bucket lower bounds must be strictly decreasing");
    }
  }
  if (reward_buckets.back().lower_bound > 0.0) {
    throw ValidationError("sim.reward_buckets", "last bucket must start at 0");
  }
  if (!(stockout_penalty < 0.0)) throw ValidationError("sim.stockout_penalty", "must be < 0");
  for (ActionKind a : kAllActions) {
    if (!(action_cost(a) <= 0.0)) {
      throw ValidationError("sim.action_costs." + std::string(to_string(a)), "must be <= 0");
    }
  }
  if (!(soft_lma_weekly_cost <= 0.0)) throw ValidationError("sim.soft_lma_weekly_cost", "must be <= 0");
  if (!(hard_lma_weekly_cost <= 0.0)) throw ValidationError("sim.hard_lma_weekly_cost", "must be <= 0");
  require_probability(soft_lma_effect, "sim.soft_lma_effect");
  require_probability(hard_lma_effect, "sim.hard_lma_effect");
  require_nonnegative(lma_compliance_std, "sim.lma_compliance_std");
  if (switch_delay_weeks < 0) throw ValidationError("sim.switch_delay_weeks", "must be >= 0");
  require_probability(expedite_success_prob, "sim.expedite_success_prob");
  if (requeue_min_weeks < 1 || requeue_max_weeks < requeue_min_weeks) {
    throw ValidationError("sim.requeue_max_weeks", "requeue range must satisfy 1 <= min <= max");
  }
  require_positive(emergency_buy_weeks, "sim.emergency_buy_weeks");
  require_positive(gray_market_weeks, "sim.gray_market_weeks");
  if (emergency_latency_weeks < 0) throw ValidationError("sim.emergency_latency_weeks", "must be >= 0");
  require_probability(reputation_decay, "sim.reputation_decay");
  require_nonnegative(demand_variation, "sim.demand_variation");
  require_positive(audit_qoh_std, "sim.audit_qoh_std");
  require_nonnegative(passive_qoh_std_frac, "sim.passive_qoh_std_frac");
  require_positive(passive_qoh_std_floor, "sim.passive_qoh_std_floor");
  if (!(passive_qoh_std_floor > audit_qoh_std)) {
    throw ValidationError("sim.passive_qoh_std_floor", "must exceed sim.audit_qoh_std");
  }
  require_nonnegative(utz_obs_std_frac, "sim.utz_obs_std_frac");
  require_positive(utz_obs_std_floor, "sim.utz_obs_std_floor");
  require_positive(erd_obs_std, "sim.erd_obs_std");
  require_positive(erd_obs_std_contact, "sim.erd_obs_std_contact");
  require_positive(erd_obs_std_query, "sim.erd_obs_std_query");
  require_nonnegative(qoh_diffusion, "sim.qoh_diffusion");
  require_nonnegative(utz_diffusion, "sim.utz_diffusion");
  require_nonnegative(erd_diffusion, "sim.erd_diffusion");
  require_positive(qoh_std_cap, "sim.qoh_std_cap");
  require_positive(utz_std_cap, "sim.utz_std_cap");
  require_positive(erd_std_cap, "sim.erd_std_cap");
  require_probability(reliability_smoothing, "sim.reliability_smoothing");
}

}  // namespace shortsim
