#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "shortsim/belief.hpp"
#include "shortsim/types.hpp"

namespace shortsim {

/// Weighted urgency features; runway is the implicit unit-weight base term.
enum class Feature : std::uint8_t { Uncertainty, Utilization, Clinical, Reputation };

inline constexpr std::size_t kFeatureCount = 4;
inline constexpr std::array<Feature, kFeatureCount> kAllFeatures = {
    Feature::Uncertainty, Feature::Utilization, Feature::Clinical, Feature::Reputation};

std::string_view to_string(Feature f) noexcept;

using FeatureVector = std::array<double, kFeatureCount>;

struct UrgencyComponents {
  double u_runway = 0.0;
  double u_uncertainty = 0.0;
  double u_utilization = 0.0;
  double u_clinical = 0.0;
  double u_reputation = 0.0;

  /// The four weighted features in `kAllFeatures` order.
  FeatureVector weighted_features() const noexcept {
    return {u_uncertainty, u_utilization, u_clinical, u_reputation};
  }
};

struct AttentionWeights {
  FeatureVector beta = {0.25, 0.15, 0.3, 0.2};
  double tau = 0.65;
  std::size_t k = 3;
  std::optional<std::size_t> cap;
  double beta_max = 2.0;

  double weight(Feature f) const noexcept { return beta[static_cast<std::size_t>(f)]; }
  void validate() const;
};

/// Normalizing constants of the urgency components.
struct AttentionParams {
  double runway_horizon = 12.0;      // R_max: runway at which runway risk reaches 0
  double runway_std_scale = 4.0;     // sigma_runway_max
};

/// Scenario-wide utilization statistics for the current week.
struct ScenarioStats {
  double mean_utz = 0.0;
  double max_utz_deviation = 0.0;
  double max_utz_std = 0.0;
};

ScenarioStats scenario_stats(std::span<const DrugBelief> beliefs);

UrgencyComponents component_vector(const DrugBelief& belief, const ScenarioStats& stats,
                                   const SimConfig& sim, const AttentionParams& params);

/// U = u_runway + sum_f beta_f * u_f.
double urgency_score(const UrgencyComponents& c, const AttentionWeights& w);

struct UrgencyEntry {
  DrugId drug;
  double urgency = 0.0;
  double runway_mean = 0.0;
};

/// Threshold selection with top-k fallback and optional cap. Ordered by
/// urgency descending, ties by lower runway then id.
std::vector<DrugId> select_focus(std::span<const UrgencyEntry> urgencies, const AttentionWeights& w);

/// Per-drug urgency evaluation for one week.
struct UrgencyTable {
  std::vector<UrgencyComponents> components;  // in belief order
  std::vector<double> scores;
  std::vector<double> runway_means;

  std::vector<UrgencyEntry> entries(std::span<const DrugBelief> beliefs) const;
  /// Row i = weighted features of drug i.
  std::vector<FeatureVector> activations() const;
};

UrgencyTable evaluate_urgency(std::span<const DrugBelief> beliefs, const AttentionWeights& w,
                              const SimConfig& sim, const AttentionParams& params);

}  // namespace shortsim
