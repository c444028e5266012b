#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "shortsim/agents.hpp"
#include "shortsim/attention.hpp"
#include "shortsim/planner.hpp"
#include "shortsim/scenario.hpp"
#include "shortsim/types.hpp"

namespace shortsim {

/// Everything configurable in one experiment; maps 1:1 onto the config file
/// sections {sim, planner, attention, learner, scenario_gen}.
struct ExperimentConfig {
  SimConfig sim;
  PlannerConfig planner;
  AttentionWeights attention;
  AttentionParams attention_params;
  LearnerParams learner;
  std::optional<AttentionWeights> learner_initial;  // defaults to the Expert weights
  ScenarioGenConfig scenario_gen;

  void validate() const;
};

/// Missing sections/keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace shortsim
