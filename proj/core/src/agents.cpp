#include "shortsim/agents.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <numeric>

namespace shortsim {

std::string_view to_string(AgentKind k) noexcept {
  switch (k) {
    case AgentKind::Random: return "Random";
    case AgentKind::Greedy: return "Greedy";
    case AgentKind::Heuristic: return "Heuristic";
    case AgentKind::Expert: return "Expert";
    case AgentKind::Learner: return "Learner";
    case AgentKind::FullPOMDP: return "FullPOMDP";
  }
  return "?";
}

AgentKind agent_from_string(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == '-' || c == '_' || c == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  for (AgentKind k : kAllAgents) {
    std::string canon;
    for (char c : to_string(k)) canon.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (canon == key) return k;
  }
  throw ContractError("unknown agent kind: " + std::string(name));
}

bool uses_planner(AgentKind k) noexcept {
  return k == AgentKind::Expert || k == AgentKind::Learner || k == AgentKind::FullPOMDP;
}

void LearnerParams::validate() const {
  if (!(alpha >= 0.0)) throw ValidationError("learner.alpha", "must be >= 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw ValidationError("learner.eta", "must be in (0, 1]");
  if (!(temperature > 0.0)) throw ValidationError("learner.temperature", "must be > 0");
  if (!(beta_max > 0.0)) throw ValidationError("learner.beta_max", "must be > 0");
}

FeatureVector softmax_focus_grad(std::span<const FeatureVector> activations, std::span<const double> scores,
                                 std::span<const std::size_t> focus, double temperature) {
  if (activations.empty()) throw ContractError("softmax_focus_grad: empty drug set");
  if (scores.size() != activations.size()) throw ContractError("softmax_focus_grad: size mismatch");
  if (!(temperature > 0.0)) throw ContractError("softmax_focus_grad: temperature must be > 0");

  const double z_max = *std::max_element(scores.begin(), scores.end());
  std::vector<double> p(scores.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    p[i] = std::exp((scores[i] - z_max) / temperature);
    norm += p[i];
  }
  for (double& v : p) v /= norm;

  FeatureVector expected{};
  for (std::size_t i = 0; i < activations.size(); ++i) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) expected[f] += p[i] * activations[i][f];
  }
  FeatureVector g{};
  for (std::size_t i : focus) {
    if (i >= activations.size()) throw ContractError("softmax_focus_grad: focus index out of range");
    for (std::size_t f = 0; f < kFeatureCount; ++f) g[f] += activations[i][f] - expected[f];
  }
  for (double& v : g) v /= temperature;
  return g;
}

LearnerState learner_update(const LearnerState& state, Week week, double reward,
                            std::span<const FeatureVector> activations, std::span<const double> scores,
                            std::span<const std::size_t> focus, std::vector<AttentionTraceRow>* trace) {
  LearnerState next = state;
  const double baseline = state.baseline.value_or(reward);
  const double advantage = reward - baseline;
  if (advantage != 0.0 && state.params.alpha != 0.0) {
    const FeatureVector g = softmax_focus_grad(activations, scores, focus, state.params.temperature);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      next.weights.beta[f] =
          std::clamp(state.weights.beta[f] + state.params.alpha * advantage * g[f], 0.0, state.params.beta_max);
    }
  }
  next.baseline = (1.0 - state.params.eta) * baseline + state.params.eta * reward;
  if (trace != nullptr) {
    for (Feature f : kAllFeatures) {
      trace->push_back({week, f, next.weights.weight(f), advantage});
    }
  }
  return next;
}

JointAction random_actions(std::span<const DrugBelief> beliefs, Rng& rng) {
  JointAction joint;
  for (const auto& b : beliefs) {
    joint[b.id] = kAllActions[static_cast<std::size_t>(sample_int(rng, 0, static_cast<int>(kActionCount) - 1))];
  }
  return joint;
}

namespace {

// Applies a restriction only when it tightens the current one.
ActionKind tighten(LmaStatus current, LmaStatus wanted) {
  if (static_cast<int>(wanted) <= static_cast<int>(current)) return ActionKind::Monitor;
  return wanted == LmaStatus::Hard ? ActionKind::ApplyHardLMA : ActionKind::ApplySoftLMA;
}

}  // namespace

JointAction greedy_actions(std::span<const DrugBelief> beliefs, const SimConfig& sim, std::size_t count) {
  JointAction joint;
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    joint[beliefs[i].id] = ActionKind::Monitor;
    order.emplace_back(belief_runway(beliefs[i], sim).mean, i);
  }
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return beliefs[a.second].id < beliefs[b.second].id;
  });
  for (std::size_t n = 0; n < std::min(count, order.size()); ++n) {
    const auto [runway, i] = order[n];
    const DrugBelief& b = beliefs[i];
    ActionKind a = ActionKind::AuditInventory;
    if (runway < 1.0) {
      a = ActionKind::GrayMarketBuy;
    } else if (runway < 2.0) {
      a = tighten(b.lma_known, LmaStatus::Hard);
    } else if (runway < 4.0) {
      a = tighten(b.lma_known, LmaStatus::Soft);
    }
    joint[b.id] = a;
  }
  return joint;
}

JointAction heuristic_actions(std::span<const DrugBelief> beliefs, std::span<const SupplyBelief> supply,
                              Week week, const SimConfig& sim) {
  JointAction joint;
  for (std::size_t i = 0; i < beliefs.size(); ++i) {
    const DrugBelief& b = beliefs[i];
    const double runway = belief_runway(b, sim).mean;
    ActionKind a = ActionKind::Monitor;
    const bool on_primary = i < supply.size() && supply[i].active.id == supply[i].primary;
    const bool alternate_better =
        i < supply.size() && !supply[i].switch_target && supply[i].other.reliability > b.reliability_est;
    if (week - b.last_audit_week > 4 || b.qoh_std > 20.0) {
      a = ActionKind::AuditInventory;
    } else if (b.erd_mean && b.erd_std > 3.0) {
      a = ActionKind::ContactManufacturer;
    } else if (b.reliability_est < 0.5 && on_primary && alternate_better) {
      a = ActionKind::SwitchToAlternate;
    } else if (runway < 1.0) {
      a = ActionKind::EmergencyBuy;
    } else if (runway < 3.0) {
      a = tighten(b.lma_known, LmaStatus::Soft);
    }
    joint[b.id] = a;
  }
  return joint;
}

Agent::Agent(AgentKind kind, AttentionWeights expert_weights, LearnerParams learner_params,
             std::optional<AttentionWeights> learner_initial)
    : kind_(kind), expert_(std::move(expert_weights)) {
  learner_.weights = learner_initial.value_or(expert_);
  learner_.params = learner_params;
  learner_.weights.beta_max = learner_params.beta_max;
}

const AttentionWeights& Agent::weights() const noexcept {
  return kind_ == AgentKind::Learner ? learner_.weights : expert_;
}

Decision Agent::act(const AgentInputs& in, Rng& agent_rng) {
  if (in.sim == nullptr || in.planner == nullptr || in.attention == nullptr) {
    throw ContractError("Agent::act: configuration pointers must be set");
  }
  Decision d;
  d.urgency = evaluate_urgency(in.beliefs, weights(), *in.sim, *in.attention);

  switch (kind_) {
    case AgentKind::Random:
      d.actions = random_actions(in.beliefs, agent_rng);
      return d;
    case AgentKind::Greedy:
      d.actions = greedy_actions(in.beliefs, *in.sim);
      return d;
    case AgentKind::Heuristic:
      d.actions = heuristic_actions(in.beliefs, in.supply, in.week, *in.sim);
      return d;
    case AgentKind::Expert:
    case AgentKind::Learner:
    case AgentKind::FullPOMDP:
      break;
  }

  std::vector<DrugId> focus;
  if (kind_ == AgentKind::FullPOMDP) {
    for (const auto& b : in.beliefs) focus.push_back(b.id);
  } else {
    const auto entries = d.urgency.entries(in.beliefs);
    focus = select_focus(entries, weights());
  }
  for (const auto& id : focus) {
    for (std::size_t i = 0; i < in.beliefs.size(); ++i) {
      if (in.beliefs[i].id == id) d.focus_index.push_back(i);
    }
  }

  PlannerConfig planner = *in.planner;
  if (in.episode_end > in.week) planner.horizon = std::min(planner.horizon, in.episode_end - in.week);

  const auto start = std::chrono::steady_clock::now();
  d.actions = plan_joint(in.beliefs, in.supply, focus, in.week, *in.sim, planner, in.plan_seed);
  d.planning_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  d.focus = std::move(focus);
  return d;
}

void Agent::observe_reward(Week week, double reward, const Decision& last) {
  if (kind_ == AgentKind::Learner) {
    const auto activations = last.urgency.activations();
    learner_ = learner_update(learner_, week, reward, activations, last.urgency.scores, last.focus_index, &trace_);
  } else if (kind_ == AgentKind::Expert) {
    for (Feature f : kAllFeatures) trace_.push_back({week, f, expert_.weight(f), 0.0});
  }
}

}  // namespace shortsim
