#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shortsim {

using DrugId = std::string;
using SupplierId = std::string;
using Week = int;

/// Raised when a caller violates an operation's preconditions.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by file/config validation. `field()` is the dotted path of the
/// offending field, e.g. "drugs[3].qoh".
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class LmaStatus : std::uint8_t { None, Soft, Hard };

enum class ActionKind : std::uint8_t {
  Monitor,
  AuditInventory,
  ApplySoftLMA,
  ApplyHardLMA,
  LiftLMA,
  ContactManufacturer,
  QuerySupplierERD,
  SwitchToAlternate,
  SwitchToPrimary,
  ExpediteOrder,
  EmergencyBuy,
  GrayMarketBuy,
};

inline constexpr std::size_t kActionCount = 12;

inline constexpr std::array<ActionKind, kActionCount> kAllActions = {
    ActionKind::Monitor,           ActionKind::AuditInventory,
    ActionKind::ApplySoftLMA,      ActionKind::ApplyHardLMA,
    ActionKind::LiftLMA,           ActionKind::ContactManufacturer,
    ActionKind::QuerySupplierERD,  ActionKind::SwitchToAlternate,
    ActionKind::SwitchToPrimary,   ActionKind::ExpediteOrder,
    ActionKind::EmergencyBuy,      ActionKind::GrayMarketBuy,
};

enum class ActionCategory : std::uint8_t {
  Monitoring,
  DemandLimits,
  InformationGathering,
  SwitchingSuppliers,
  Emergency,
};

ActionCategory category(ActionKind a) noexcept;

std::string_view to_string(ActionKind a) noexcept;
std::string_view to_string(ActionCategory c) noexcept;
std::string_view to_string(LmaStatus s) noexcept;
/// Throws ContractError on unknown names.
ActionKind action_from_string(std::string_view name);
LmaStatus lma_from_string(std::string_view name);

inline constexpr std::size_t index_of(ActionKind a) noexcept {
  return static_cast<std::size_t>(a);
}

struct PendingOrder {
  DrugId drug;
  double quantity = 0.0;
  Week erd_week = 0;     // supplier's current estimate; moves on failed deliveries
  Week placed_week = 0;
  Week quoted_week = 0;  // erd at placement time, known to the ordering agent
  bool expedited = false;
  bool emergency = false;  // reserve/loan-network order; bypasses supplier state

  bool operator==(const PendingOrder&) const = default;
};

struct SupplierState {
  SupplierId id;
  double reliability = 1.0;
  bool disrupted = false;
  double recovery_hazard = 0.0;
  int lead_time_weeks = 2;
  std::vector<PendingOrder> pending_orders;  // sorted by erd_week ascending

  bool operator==(const SupplierState&) const = default;
};

struct DrugTrueState {
  DrugId id;
  double qoh = 0.0;
  double utz = 0.0;
  double base_utz = 0.0;
  SupplierId primary_supplier;
  SupplierId alternate_supplier;
  SupplierId active_supplier;
  std::optional<SupplierId> switch_target;
  Week switch_effective_week = 0;
  LmaStatus lma = LmaStatus::None;
  bool stocked_out = false;
  double reputation = 0.0;
  double clinical_impact = 0.0;
  double routine_order_qty = 0.0;  // standing weekly order placed with the active supplier
  double utz_drift = 0.0;          // multiplicative per-week drift of base demand

  bool operator==(const DrugTrueState&) const = default;
};

struct RewardBucket {
  double lower_bound = 0.0;  // weeks of runway
  double score = 0.0;
  bool operator==(const RewardBucket&) const = default;
};

/// Every tunable constant of the simulated environment.
struct SimConfig {
  double runway_cap = 999.0;
  std::vector<RewardBucket> reward_buckets = {
      {8.0, 10.0}, {4.0, 6.0}, {2.0, 2.0}, {1.0, -5.0}, {0.0, -20.0}};
  double stockout_penalty = -10000.0;
  std::array<double, kActionCount> action_costs = {
      0.0,    // Monitor
      -2.0,   // AuditInventory
      0.0,    // ApplySoftLMA (charged weekly while active)
      0.0,    // ApplyHardLMA (charged weekly while active)
      0.0,    // LiftLMA
      -3.0,   // ContactManufacturer
      -1.0,   // QuerySupplierERD
      -5.0,   // SwitchToAlternate
      -5.0,   // SwitchToPrimary
      -4.0,   // ExpediteOrder
      -50.0,  // EmergencyBuy
      -200.0  // GrayMarketBuy
  };
  double soft_lma_weekly_cost = -1.0;
  double hard_lma_weekly_cost = -4.0;

  double soft_lma_effect = 0.10;
  double hard_lma_effect = 0.40;
  double lma_compliance_std = 0.05;

  int switch_delay_weeks = 2;
  double expedite_success_prob = 0.7;
  int requeue_min_weeks = 1;
  int requeue_max_weeks = 3;
  double emergency_buy_weeks = 4.0;     // EmergencyBuy quantity in weeks of utz
  double gray_market_weeks = 2.0;       // GrayMarketBuy quantity in weeks of utz
  int emergency_latency_weeks = 1;
  double reputation_decay = 0.9;
  double demand_variation = 0.05;       // overridden per scenario

  // Observation noise.
  double audit_qoh_std = 1.0;
  double passive_qoh_std_frac = 0.10;
  double passive_qoh_std_floor = 2.0;
  double utz_obs_std_frac = 0.15;
  double utz_obs_std_floor = 0.5;
  double erd_obs_std = 1.5;
  double erd_obs_std_contact = 0.3;
  double erd_obs_std_query = 0.8;

  // Belief diffusion and caps.
  double qoh_diffusion = 2.0;
  double utz_diffusion = 0.5;
  double erd_diffusion = 0.5;
  double qoh_std_cap = 40.0;
  double utz_std_cap = 10.0;
  double erd_std_cap = 6.0;
  double reliability_smoothing = 0.2;

  double action_cost(ActionKind a) const noexcept { return action_costs[index_of(a)]; }

  /// Throws ValidationError naming the first offending field.
  void validate() const;

  bool operator==(const SimConfig&) const = default;
};

/// Weeks of supply remaining: qoh/utz clamped to [0, runway_cap]; runway_cap when utz == 0.
double compute_runway(double qoh, double utz, double runway_cap);

}  // namespace shortsim
