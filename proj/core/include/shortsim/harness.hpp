#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shortsim/agents.hpp"
#include "shortsim/config.hpp"
#include "shortsim/scenario.hpp"

namespace shortsim {

struct WeeklyTraceRow {
  Week week = 0;
  DrugId drug;
  double qoh_true = 0.0;   // ground truth when the action was chosen
  double qoh_mean = 0.0;   // belief the agent acted on
  double qoh_std = 0.0;
  double utz_true = 0.0;
  double utz_mean = 0.0;
  double runway_mean = 0.0;
  double urgency = 0.0;
  bool in_focus = false;
  ActionKind action = ActionKind::Monitor;
  double per_drug_score = 0.0;  // score realized at the end of the week
};

struct RunMetrics {
  std::string run_id;
  std::string scenario;
  AgentKind agent = AgentKind::Random;
  std::uint64_t seed = 0;
  int weeks = 0;
  double total_reward = 0.0;
  int stockout_count = 0;  // drug-weeks
  double avg_focus_size = 0.0;
  std::size_t max_focus_size = 0;
  double planning_seconds_per_week = 0.0;
  std::vector<double> weekly_rewards;
  std::vector<std::size_t> focus_sizes;  // one per week; 0 for agents without a focus set
  std::vector<WeeklyTraceRow> weekly;
  std::vector<AttentionTraceRow> attention;
  std::vector<std::string> flags;
  std::optional<std::filesystem::path> weekly_trace_path;
  std::optional<std::filesystem::path> attention_trace_path;
};

std::string run_id(const ScenarioSpec& spec, AgentKind agent, std::uint64_t seed);

/// Closed-loop run of one agent on one scenario. When `trace_root` is set,
/// writes trace_root/<run_id>/{weekly,attention}.csv.
RunMetrics run(const ScenarioSpec& spec, AgentKind agent, std::uint64_t seed, const ExperimentConfig& config,
               const std::optional<std::filesystem::path>& trace_root = std::nullopt);

void write_weekly_csv(const std::vector<WeeklyTraceRow>& rows, const std::filesystem::path& path);
void write_attention_csv(const std::vector<AttentionTraceRow>& rows, const std::filesystem::path& path);

struct GridCell {
  ScenarioSpec spec;
  AgentKind agent = AgentKind::Random;
  std::uint64_t seed = 0;
  ExperimentConfig config;
};

/// Runs every cell on up to `workers` threads; results come back in cell order.
std::vector<RunMetrics> run_grid(const std::vector<GridCell>& cells, std::size_t workers,
                                 const std::optional<std::filesystem::path>& trace_root = std::nullopt);

struct AgentSummary {
  AgentKind agent = AgentKind::Random;
  std::size_t runs = 0;
  double mean_reward = 0.0;
  double reward_std = 0.0;  // sample std across seeds; 0 for one run
  double mean_planning_seconds = 0.0;
  int total_stockouts = 0;
  double mean_avg_focus = 0.0;
  std::size_t max_focus = 0;
};

struct CompareResult {
  std::vector<RunMetrics> runs;
  std::vector<AgentSummary> summary;  // in requested agent order
};

struct CompareOptions {
  int scenario_set = 1;
  std::vector<AgentKind> agents;
  std::vector<std::uint64_t> seeds;
  std::size_t workers = 1;
  std::optional<std::filesystem::path> out_dir;  // runs.csv, summary.json, summary.txt, traces/
};

/// Throws ValidationError on an empty agent or seed list.
CompareResult compare(const CompareOptions& options, const ExperimentConfig& config);

std::vector<AgentSummary> summarize(const std::vector<RunMetrics>& runs, const std::vector<AgentKind>& agents);
std::string format_table(const std::vector<AgentSummary>& summary);
nlohmann::json summary_to_json(const CompareOptions& options, const CompareResult& result);
void write_runs_csv(const std::vector<RunMetrics>& runs, const std::filesystem::path& path);

struct AblationRow {
  double tau = 0.0;
  double expert_reward = 0.0;
  double learner_reward = 0.0;
  double expert_avg_focus = 0.0;
  double learner_avg_focus = 0.0;
  double avg_focus_size = 0.0;  // over Expert and Learner runs
  int expert_stockouts = 0;
  int learner_stockouts = 0;
};

struct AblationOptions {
  std::vector<double> taus;
  int scenario_set = 3;
  std::vector<std::uint64_t> seeds;
  std::size_t workers = 1;
  std::optional<std::filesystem::path> out_dir;  // ablation_tau.csv
};

/// Throws ValidationError when a tau is outside (0, 1.5] or the lists are empty.
std::vector<AblationRow> ablate_tau(const AblationOptions& options, const ExperimentConfig& config);
void write_ablation_csv(const std::vector<AblationRow>& rows, const std::filesystem::path& path);

}  // namespace shortsim
