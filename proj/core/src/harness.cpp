#include "shortsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include <fmt/format.h>

namespace shortsim {

namespace fs = std::filesystem;

std::string run_id(const ScenarioSpec& spec, AgentKind agent, std::uint64_t seed) {
  return fmt::format("{}__{}__s{}", spec.name, to_string(agent), seed);
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

bool is_long_horizon(const ScenarioSpec& spec) { return spec.horizon_weeks > 26; }

}  // namespace

void write_weekly_csv(const std::vector<WeeklyTraceRow>& rows, const fs::path& path) {
  auto out = open_out(path);
  out << "week,drug,qoh_true,qoh_mean,qoh_std,utz_true,utz_mean,runway_mean,urgency,in_focus,action,per_drug_score\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{},{:.6f}\n", r.week, r.drug,
                       r.qoh_true, r.qoh_mean, r.qoh_std, r.utz_true, r.utz_mean, r.runway_mean, r.urgency,
                       r.in_focus ? 1 : 0, to_string(r.action), r.per_drug_score);
  }
}

void write_attention_csv(const std::vector<AttentionTraceRow>& rows, const fs::path& path) {
  auto out = open_out(path);
  out << "week,feature,beta,advantage\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{:.9f},{:.6f}\n", r.week, to_string(r.feature), r.beta, r.advantage);
  }
}

RunMetrics run(const ScenarioSpec& spec, AgentKind agent_kind, std::uint64_t seed, const ExperimentConfig& config,
               const std::optional<fs::path>& trace_root) {
  spec.validate();
  config.validate();
  const SimConfig sim = effective_config(config.sim, spec);

  RunMetrics m;
  m.run_id = run_id(spec, agent_kind, seed);
  m.scenario = spec.name;
  m.agent = agent_kind;
  m.seed = seed;
  m.weeks = spec.horizon_weeks;
  if (agent_kind == AgentKind::FullPOMDP && is_long_horizon(spec)) m.flags.emplace_back("full-pomdp-long-horizon");

  World world = make_world(spec, sim);
  RunStreams streams(seed);
  Agent agent(agent_kind, config.attention, config.learner, config.learner_initial);

  // Week-0 belief from one passive look at every drug.
  std::vector<DrugBelief> beliefs;
  beliefs.reserve(world.drugs.size());
  for (const auto& d : world.drugs) {
    const PendingOrder* first = world.earliest_order(d);
    const std::optional<Week> erd = first ? std::optional<Week>(first->erd_week) : std::nullopt;
    const Observation obs = emit_observation(d, erd, ActionKind::Monitor, sim, streams.observation);
    beliefs.push_back(initial_belief(d, obs, world.supplier(d.active_supplier).reliability, sim));
  }

  double planning_total = 0.0;
  std::size_t focus_total = 0;
  std::vector<SupplyBelief> supply(world.drugs.size());

  for (Week t = 0; t < spec.horizon_weeks; ++t) {
    for (std::size_t i = 0; i < world.drugs.size(); ++i) {
      supply[i] = believed_supply(world, world.drugs[i], beliefs[i], config.planner.assumed_recovery_hazard);
    }

    AgentInputs in;
    in.week = world.week;
    in.beliefs = beliefs;
    in.supply = supply;
    in.sim = &sim;
    in.planner = &config.planner;
    in.attention = &config.attention_params;
    in.plan_seed = streams.planning_seed;
    in.episode_end = spec.horizon_weeks;
    const Decision decision = agent.act(in, streams.agent);
    planning_total += decision.planning_seconds;

    const std::size_t focus_size = decision.focus ? decision.focus->size() : 0;
    m.focus_sizes.push_back(focus_size);
    focus_total += focus_size;
    m.max_focus_size = std::max(m.max_focus_size, focus_size);

    std::vector<bool> in_focus(world.drugs.size(), false);
    for (std::size_t i : decision.focus_index) in_focus[i] = true;

    const std::size_t first_row = m.weekly.size();
    for (std::size_t i = 0; i < world.drugs.size(); ++i) {
      const auto& d = world.drugs[i];
      const auto& b = beliefs[i];
      WeeklyTraceRow row;
      row.week = world.week;
      row.drug = d.id;
      row.qoh_true = d.qoh;
      row.qoh_mean = b.qoh_mean;
      row.qoh_std = b.qoh_std;
      row.utz_true = d.utz;
      row.utz_mean = b.utz_mean;
      row.runway_mean = decision.urgency.runway_means[i];
      row.urgency = decision.urgency.scores[i];
      row.in_focus = in_focus[i];
      row.action = decision.actions.at(d.id);
      m.weekly.push_back(std::move(row));
    }

    const Week week = world.week;
    const WeeklyOutcome outcome = advance_week(world, decision.actions, sim, streams.environment, streams.observation);

    for (std::size_t i = 0; i < world.drugs.size(); ++i) {
      const auto& d = world.drugs[i];
      double inflow = 0.0;
      DrugEvents ev;
      for (const auto& del : outcome.deliveries) {
        if (del.drug != d.id) continue;
        inflow += del.quantity;
        if (!del.emergency) ++ev.deliveries_on_time;
      }
      ev.delivery_failures = static_cast<int>(std::count(outcome.delivery_failures.begin(),
                                                         outcome.delivery_failures.end(), d.id));
      ev.stockout = std::find(outcome.stockout_events.begin(), outcome.stockout_events.end(), d.id) !=
                    outcome.stockout_events.end();
      ev.supplier_disrupted = std::find(outcome.disruption_events.begin(), outcome.disruption_events.end(), d.id) !=
                              outcome.disruption_events.end();
      ev.lma = d.lma;

      DrugBelief b = apply_action_effect(beliefs[i], decision.actions.at(d.id), sim);
      b = predict(b, sim, inflow);
      for (const auto& obs : outcome.observations) {
        if (obs.drug == d.id) b = update(b, obs, week);
      }
      beliefs[i] = record_events(b, ev, sim);
      m.weekly[first_row + i].per_drug_score = outcome.per_drug_scores.at(d.id);
    }

    m.total_reward += outcome.reward;
    m.weekly_rewards.push_back(outcome.reward);
    m.stockout_count += static_cast<int>(outcome.stockout_events.size());
    agent.observe_reward(week, outcome.reward, decision);
  }

  const double weeks = static_cast<double>(std::max(1, spec.horizon_weeks));
  m.planning_seconds_per_week = planning_total / weeks;
  m.avg_focus_size = static_cast<double>(focus_total) / weeks;
  m.attention = agent.attention_trace();

  if (trace_root) {
    const fs::path dir = *trace_root / m.run_id;
    m.weekly_trace_path = dir / "weekly.csv";
    m.attention_trace_path = dir / "attention.csv";
    write_weekly_csv(m.weekly, *m.weekly_trace_path);
    write_attention_csv(m.attention, *m.attention_trace_path);
  }
  return m;
}

std::vector<RunMetrics> run_grid(const std::vector<GridCell>& cells, std::size_t workers,
                                 const std::optional<fs::path>& trace_root) {
  std::vector<RunMetrics> results(cells.size());
  if (cells.empty()) return results;
  workers = std::clamp<std::size_t>(workers, 1, cells.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const GridCell& c = cells[i];
        results[i] = run(c.spec, c.agent, c.seed, c.config, trace_root);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::vector<AgentSummary> summarize(const std::vector<RunMetrics>& runs, const std::vector<AgentKind>& agents) {
  std::vector<AgentSummary> out;
  for (AgentKind a : agents) {
    AgentSummary s;
    s.agent = a;
    std::vector<double> rewards;
    for (const auto& r : runs) {
      if (r.agent != a) continue;
      rewards.push_back(r.total_reward);
      s.mean_planning_seconds += r.planning_seconds_per_week;
      s.total_stockouts += r.stockout_count;
      s.mean_avg_focus += r.avg_focus_size;
      s.max_focus = std::max(s.max_focus, r.max_focus_size);
    }
    s.runs = rewards.size();
    if (s.runs > 0) {
      const double n = static_cast<double>(s.runs);
      s.mean_reward = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
      s.mean_planning_seconds /= n;
      s.mean_avg_focus /= n;
      if (s.runs > 1) {
        double ss = 0.0;
        for (double x : rewards) ss += (x - s.mean_reward) * (x - s.mean_reward);
        s.reward_std = std::sqrt(ss / (n - 1.0));
      }
    }
    out.push_back(s);
  }
  return out;
}

std::string format_table(const std::vector<AgentSummary>& summary) {
  std::string out = fmt::format("{:<10} {:>5} {:>14} {:>12} {:>14} {:>10} {:>10} {:>9}\n", "agent", "runs",
                                "mean_reward", "reward_std", "plan_s/week", "stockouts", "avg_focus", "max_focus");
  for (const auto& s : summary) {
    out += fmt::format("{:<10} {:>5} {:>14.2f} {:>12.2f} {:>14.6f} {:>10} {:>10.2f} {:>9}\n", to_string(s.agent),
                       s.runs, s.mean_reward, s.reward_std, s.mean_planning_seconds, s.total_stockouts,
                       s.mean_avg_focus, s.max_focus);
  }
  return out;
}

void write_runs_csv(const std::vector<RunMetrics>& runs, const fs::path& path) {
  auto out = open_out(path);
  out << "run_id,scenario,agent,seed,weeks,total_reward,stockout_count,avg_focus_size,max_focus_size,"
         "planning_seconds_per_week,flags\n";
  for (const auto& r : runs) {
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    out << fmt::format("{},{},{},{},{},{:.6f},{},{:.6f},{},{:.9f},{}\n", r.run_id, r.scenario, to_string(r.agent),
                       r.seed, r.weeks, r.total_reward, r.stockout_count, r.avg_focus_size, r.max_focus_size,
                       r.planning_seconds_per_week, flags);
  }
}

nlohmann::json summary_to_json(const CompareOptions& options, const CompareResult& result) {
  nlohmann::json j;
  j["scenario_set"] = options.scenario_set;
  j["seeds"] = options.seeds;
  nlohmann::json agents = nlohmann::json::array();
  for (const auto& s : result.summary) {
    agents.push_back({{"agent", std::string(to_string(s.agent))},
                      {"runs", s.runs},
                      {"mean_reward", s.mean_reward},
                      {"reward_std", s.reward_std},
                      {"mean_planning_seconds_per_week", s.mean_planning_seconds},
                      {"total_stockouts", s.total_stockouts},
                      {"mean_avg_focus_size", s.mean_avg_focus},
                      {"max_focus_size", s.max_focus}});
  }
  j["agents"] = agents;
  nlohmann::json flagged = nlohmann::json::array();
  for (const auto& r : result.runs) {
    for (const auto& f : r.flags) flagged.push_back({{"run_id", r.run_id}, {"flag", f}});
  }
  j["flags"] = flagged;
  return j;
}

CompareResult compare(const CompareOptions& options, const ExperimentConfig& config) {
  if (options.agents.empty()) throw ValidationError("--agents", "agent list must not be empty");
  if (options.seeds.empty()) throw ValidationError("--seed", "at least one seed is required");

  std::vector<GridCell> cells;
  for (std::uint64_t seed : options.seeds) {
    const ScenarioSpec spec = generate_scenario(options.scenario_set, seed, config.scenario_gen);
    for (AgentKind a : options.agents) cells.push_back({spec, a, seed, config});
  }
  std::optional<fs::path> traces;
  if (options.out_dir) traces = *options.out_dir / "traces";

  CompareResult result;
  result.runs = run_grid(cells, options.workers, traces);
  result.summary = summarize(result.runs, options.agents);

  if (options.out_dir) {
    write_runs_csv(result.runs, *options.out_dir / "runs.csv");
    auto js = open_out(*options.out_dir / "summary.json");
    js << summary_to_json(options, result).dump(2) << '\n';
    auto txt = open_out(*options.out_dir / "summary.txt");
    txt << format_table(result.summary);
  }
  return result;
}

std::vector<AblationRow> ablate_tau(const AblationOptions& options, const ExperimentConfig& config) {
  if (options.taus.empty()) throw ValidationError("--tau", "at least one tau is required");
  if (options.seeds.empty()) throw ValidationError("--seed", "at least one seed is required");
  for (double tau : options.taus) {
    if (!(tau > 0.0 && tau <= 1.5)) throw ValidationError("--tau", fmt::format("tau {} outside (0, 1.5]", tau));
  }

  std::vector<GridCell> cells;
  for (double tau : options.taus) {
    ExperimentConfig c = config;
    c.attention.tau = tau;
    if (c.learner_initial) c.learner_initial->tau = tau;
    for (std::uint64_t seed : options.seeds) {
      const ScenarioSpec spec = generate_scenario(options.scenario_set, seed, c.scenario_gen);
      cells.push_back({spec, AgentKind::Expert, seed, c});
      cells.push_back({spec, AgentKind::Learner, seed, c});
    }
  }
  const auto runs = run_grid(cells, options.workers);

  std::vector<AblationRow> rows;
  const double n = static_cast<double>(options.seeds.size());
  std::size_t k = 0;
  for (double tau : options.taus) {
    AblationRow row;
    row.tau = tau;
    for (std::size_t s = 0; s < options.seeds.size(); ++s) {
      const RunMetrics& e = runs[k++];
      const RunMetrics& l = runs[k++];
      row.expert_reward += e.total_reward / n;
      row.learner_reward += l.total_reward / n;
      row.expert_avg_focus += e.avg_focus_size / n;
      row.learner_avg_focus += l.avg_focus_size / n;
      row.expert_stockouts += e.stockout_count;
      row.learner_stockouts += l.stockout_count;
    }
    row.avg_focus_size = 0.5 * (row.expert_avg_focus + row.learner_avg_focus);
    rows.push_back(row);
  }
  if (options.out_dir) write_ablation_csv(rows, *options.out_dir / "ablation_tau.csv");
  return rows;
}

void write_ablation_csv(const std::vector<AblationRow>& rows, const fs::path& path) {
  auto out = open_out(path);
  out << "tau,expert_reward,learner_reward,expert_avg_focus,learner_avg_focus,avg_focus_size,expert_stockouts,"
         "learner_stockouts\n";
  for (const auto& r : rows) {
    out << fmt::format("{:.4f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n", r.tau, r.expert_reward, r.learner_reward,
                       r.expert_avg_focus, r.learner_avg_focus, r.avg_focus_size, r.expert_stockouts,
                       r.learner_stockouts);
  }
}

}  // namespace shortsim
