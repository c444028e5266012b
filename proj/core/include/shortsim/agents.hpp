#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "shortsim/attention.hpp"
#include "shortsim/belief.hpp"
#include "shortsim/planner.hpp"
#include "shortsim/rng.hpp"
#include "shortsim/sim_engine.hpp"

namespace shortsim {

enum class AgentKind : std::uint8_t { Random, Greedy, Heuristic, Expert, Learner, FullPOMDP };

inline constexpr std::array<AgentKind, 6> kAllAgents = {AgentKind::Random, AgentKind::Greedy,
                                                        AgentKind::Heuristic, AgentKind::Expert,
                                                        AgentKind::Learner, AgentKind::FullPOMDP};

std::string_view to_string(AgentKind k) noexcept;
/// Accepts the canonical names case-insensitively ("expert", "FullPOMDP", "full-pomdp").
AgentKind agent_from_string(std::string_view name);

bool uses_planner(AgentKind k) noexcept;

struct LearnerParams {
  double alpha = 0.0002;
  double eta = 0.1;
  double temperature = 1.0;
  double beta_max = 2.0;

  void validate() const;
};

struct LearnerState {
  AttentionWeights weights;
  std::optional<double> baseline;  // unset until the first reward arrives
  LearnerParams params;
};

struct AttentionTraceRow {
  Week week = 0;
  Feature feature = Feature::Uncertainty;
  double beta = 0.0;
  double advantage = 0.0;
};

/// Surrogate gradient of log prod_{i in focus} p_i w.r.t. each beta_f, where
/// p = softmax(scores / T). Throws ContractError on an empty drug set.
FeatureVector softmax_focus_grad(std::span<const FeatureVector> activations, std::span<const double> scores,
                                 std::span<const std::size_t> focus, double temperature);

/// One REINFORCE-style step on the attention weights. Returns the new state
/// and appends one trace row per feature.
LearnerState learner_update(const LearnerState& state, Week week, double reward,
                            std::span<const FeatureVector> activations, std::span<const double> scores,
                            std::span<const std::size_t> focus, std::vector<AttentionTraceRow>* trace = nullptr);

/// Everything an agent may look at when choosing this week's joint action.
struct AgentInputs {
  Week week = 0;
  std::span<const DrugBelief> beliefs;
  std::span<const SupplyBelief> supply;
  const SimConfig* sim = nullptr;
  const PlannerConfig* planner = nullptr;
  const AttentionParams* attention = nullptr;
  std::uint64_t plan_seed = 0;
  Week episode_end = std::numeric_limits<Week>::max();  // planning never looks past this week
};

struct Decision {
  JointAction actions;
  std::optional<std::vector<DrugId>> focus;
  UrgencyTable urgency;               // diagnostics; weights are the agent's own (Expert defaults otherwise)
  std::vector<std::size_t> focus_index;
  double planning_seconds = 0.0;      // wall-clock inside planner calls only
};

JointAction random_actions(std::span<const DrugBelief> beliefs, Rng& rng);
JointAction greedy_actions(std::span<const DrugBelief> beliefs, const SimConfig& sim, std::size_t count = 5);
JointAction heuristic_actions(std::span<const DrugBelief> beliefs, std::span<const SupplyBelief> supply,
                              Week week, const SimConfig& sim);

/// One of the six decision agents behind a common observe/act interface.
class Agent {
 public:
  Agent(AgentKind kind, AttentionWeights expert_weights, LearnerParams learner_params = {},
        std::optional<AttentionWeights> learner_initial = std::nullopt);

  AgentKind kind() const noexcept { return kind_; }
  const AttentionWeights& weights() const noexcept;
  const LearnerState& learner_state() const noexcept { return learner_; }

  Decision act(const AgentInputs& in, Rng& agent_rng);

  /// Feeds the realized weekly reward of the last decision; only the Learner adapts.
  void observe_reward(Week week, double reward, const Decision& last);

  const std::vector<AttentionTraceRow>& attention_trace() const noexcept { return trace_; }

 private:
  AgentKind kind_;
  AttentionWeights expert_;
  LearnerState learner_;
  std::vector<AttentionTraceRow> trace_;
};

}  // namespace shortsim
