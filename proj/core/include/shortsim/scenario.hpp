#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shortsim/sim_engine.hpp"
#include "shortsim/types.hpp"

namespace shortsim {

inline constexpr int kScenarioSchemaVersion = 1;

struct OrderSpec {
  double quantity = 0.0;
  Week erd_week = 0;
  Week placed_week = 0;
  bool operator==(const OrderSpec&) const = default;
};

struct DrugSpec {
  DrugId id;
  double qoh = 0.0;
  double base_utz = 0.0;
  double clinical_impact = 0.0;
  double reputation = 0.0;
  SupplierId primary_supplier;
  SupplierId alternate_supplier;
  double routine_order_qty = 0.0;
  double utz_drift = 0.0;
  LmaStatus lma = LmaStatus::None;
  std::vector<OrderSpec> pending_orders;  // placed with the primary supplier
  bool operator==(const DrugSpec&) const = default;
};

struct WindowSpec {
  Week start_week = 0;
  int duration_weeks = 1;
  double recovery_hazard = 0.5;
  bool operator==(const WindowSpec&) const = default;
};

struct SupplierSpec {
  SupplierId id;
  double reliability = 1.0;
  int lead_time_weeks = 2;
  bool disrupted = false;
  double recovery_hazard = 0.5;
  std::vector<WindowSpec> disruptions;
  bool operator==(const SupplierSpec&) const = default;
};

/// Optional per-scenario overrides of the observation noise in SimConfig.
struct NoiseSpec {
  std::optional<double> audit_qoh_std;
  std::optional<double> passive_qoh_std_frac;
  std::optional<double> passive_qoh_std_floor;
  std::optional<double> utz_obs_std_frac;
  std::optional<double> utz_obs_std_floor;
  std::optional<double> erd_obs_std;
  bool operator==(const NoiseSpec&) const = default;
};

struct ScenarioSpec {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  int horizon_weeks = 1;
  std::uint64_t seed = 0;
  std::vector<DrugSpec> drugs;
  std::vector<SupplierSpec> suppliers;
  double demand_variation = 0.05;
  NoiseSpec noise;

  /// Throws ValidationError naming the offending field path.
  void validate() const;
  bool operator==(const ScenarioSpec&) const = default;
};

/// Generator constants for the three built-in scenario sets.
struct ScenarioGenConfig {
  int drug_count = 19;
  double qoh_min = 20.0;
  double qoh_max = 400.0;
  double utz_min = 5.0;
  double utz_max = 40.0;
  double healthy_runway_min = 9.0;
  double healthy_runway_max = 18.0;
  double stressed_runway_min = 1.0;
  double stressed_runway_max = 3.0;
  std::vector<double> clinical_levels = {0.2, 0.5, 0.8, 1.0};
  std::vector<double> clinical_weights = {0.45, 0.35, 0.12, 0.08};

  bool operator==(const ScenarioGenConfig&) const = default;
};

/// Pure function of (set, seed, generator constants). Sets: 1 (3 weeks), 2 (10 weeks), 3 (52 weeks).
ScenarioSpec generate_scenario(int set, std::uint64_t seed, const ScenarioGenConfig& gen = {});

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
/// Strict parse: missing or unknown fields raise ValidationError with the field path.
ScenarioSpec scenario_from_json(const nlohmann::json& j);

void save_spec(const ScenarioSpec& spec, const std::filesystem::path& path);
ScenarioSpec load_spec(const std::filesystem::path& path);

/// Initial ground truth for a validated spec.
World make_world(const ScenarioSpec& spec, const SimConfig& config = {});

/// SimConfig with the scenario's demand variation and noise overrides applied.
SimConfig effective_config(const SimConfig& base, const ScenarioSpec& spec);

}  // namespace shortsim
