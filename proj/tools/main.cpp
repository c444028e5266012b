#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "shortsim/config.hpp"
#include "shortsim/harness.hpp"
#include "shortsim/scenario.hpp"

namespace fs = std::filesystem;
using namespace shortsim;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

struct GlobalOptions {
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out = "out";
  int scenario_set = 0;  // 0: subcommand default
  std::vector<std::string> agents;
  std::vector<double> taus;
  std::size_t parallel = 1;
  std::string scenario_file;
};

ExperimentConfig load(const GlobalOptions& g) {
  return g.config_path.empty() ? ExperimentConfig{} : load_config(g.config_path);
}

std::vector<std::uint64_t> seeds_or(const GlobalOptions& g, std::vector<std::uint64_t> fallback) {
  return g.seeds.empty() ? fallback : g.seeds;
}

std::vector<AgentKind> agents_or(const GlobalOptions& g, std::vector<AgentKind> fallback) {
  if (g.agents.empty()) return fallback;
  std::vector<AgentKind> out;
  for (const auto& name : g.agents) {
    try {
      out.push_back(agent_from_string(name));
    } catch (const ContractError& e) {
      throw ValidationError("--agents", e.what());
    }
  }
  return out;
}

int set_or(const GlobalOptions& g, int fallback) {
  const int set = g.scenario_set == 0 ? fallback : g.scenario_set;
  if (set < 1 || set > 3) throw ValidationError("--scenario-set", "must be 1, 2 or 3");
  return set;
}

void warn_flags(const std::vector<RunMetrics>& runs) {
  for (const auto& r : runs) {
    for (const auto& f : r.flags) std::cerr << "warning: " << r.run_id << ": " << f << '\n';
  }
}

int cmd_gen_scenarios(const GlobalOptions& g) {
  const ExperimentConfig cfg = load(g);
  const fs::path dir = fs::path(g.out) / "scenarios";
  const std::vector<int> sets = g.scenario_set == 0 ? std::vector<int>{1, 2, 3} : std::vector<int>{set_or(g, 1)};
  for (int set : sets) {
    for (std::uint64_t seed : seeds_or(g, {1, 2, 3})) {
      const ScenarioSpec spec = generate_scenario(set, seed, cfg.scenario_gen);
      const fs::path path = dir / (spec.name + ".json");
      save_spec(spec, path);
      std::cout << path.string() << '\n';
    }
  }
  return 0;
}

int cmd_run(const GlobalOptions& g) {
  const ExperimentConfig cfg = load(g);
  const auto agents = agents_or(g, {AgentKind::Expert});
  const auto seeds = seeds_or(g, {1});

  std::vector<GridCell> cells;
  for (std::uint64_t seed : seeds) {
    const ScenarioSpec spec =
        g.scenario_file.empty() ? generate_scenario(set_or(g, 1), seed, cfg.scenario_gen) : load_spec(g.scenario_file);
    for (AgentKind a : agents) cells.push_back({spec, a, seed, cfg});
  }
  const fs::path out(g.out);
  const auto runs = run_grid(cells, g.parallel, out / "traces");
  write_runs_csv(runs, out / "runs.csv");
  warn_flags(runs);
  for (const auto& r : runs) {
    std::cout << fmt::format("{}  reward={:.2f}  stockouts={}  avg_focus={:.2f}  max_focus={}  plan_s/week={:.6f}\n",
                             r.run_id, r.total_reward, r.stockout_count, r.avg_focus_size, r.max_focus_size,
                             r.planning_seconds_per_week);
  }
  return 0;
}

int cmd_compare(const GlobalOptions& g) {
  const ExperimentConfig cfg = load(g);
  CompareOptions opt;
  opt.scenario_set = set_or(g, 1);
  opt.agents = agents_or(g, {kAllAgents.begin(), kAllAgents.end()});
  opt.seeds = seeds_or(g, {1, 2, 3});
  opt.workers = g.parallel;
  opt.out_dir = fs::path(g.out);
  const CompareResult result = compare(opt, cfg);
  warn_flags(result.runs);
  std::cout << format_table(result.summary);
  return 0;
}

int cmd_ablate_tau(const GlobalOptions& g) {
  const ExperimentConfig cfg = load(g);
  AblationOptions opt;
  opt.taus = g.taus.empty() ? std::vector<double>{0.55, 0.65, 0.75} : g.taus;
  opt.scenario_set = set_or(g, 3);
  opt.seeds = seeds_or(g, {1, 2, 3});
  opt.workers = g.parallel;
  opt.out_dir = fs::path(g.out);
  const auto rows = ablate_tau(opt, cfg);
  std::cout << fmt::format("{:>6} {:>14} {:>14} {:>10}\n", "tau", "expert_reward", "learner_reward", "avg_focus");
  for (const auto& r : rows) {
    std::cout << fmt::format("{:>6.2f} {:>14.2f} {:>14.2f} {:>10.2f}\n", r.tau, r.expert_reward, r.learner_reward,
                             r.avg_focus_size);
  }
  return 0;
}

int cmd_trace_attention(const GlobalOptions& g) {
  ExperimentConfig cfg = load(g);
  if (!g.taus.empty()) cfg.attention.tau = g.taus.front();
  const auto agents = agents_or(g, {AgentKind::Learner});
  const auto seeds = seeds_or(g, {1});
  std::vector<GridCell> cells;
  for (std::uint64_t seed : seeds) {
    const ScenarioSpec spec = generate_scenario(set_or(g, 3), seed, cfg.scenario_gen);
    for (AgentKind a : agents) cells.push_back({spec, a, seed, cfg});
  }
  const auto runs = run_grid(cells, g.parallel, fs::path(g.out) / "traces");
  for (const auto& r : runs) {
    std::cout << r.attention_trace_path->string() << '\n';
    if (r.attention.empty()) continue;
    for (std::size_t i = r.attention.size() - kFeatureCount; i < r.attention.size(); ++i) {
      std::cout << fmt::format("  final {:<12} {:.4f}\n", to_string(r.attention[i].feature), r.attention[i].beta);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drug-shortage simulator and attention-guided planning experiments"};
  app.require_subcommand(1);
  GlobalOptions g;

  app.add_option("--config", g.config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seeds, "Seed(s); comma separated")->delimiter(',');
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--scenario-set", g.scenario_set, "Scenario set {1,2,3}")->check(CLI::Range(1, 3));
  app.add_option("--agents", g.agents, "Agents; comma separated")->delimiter(',');
  app.add_option("--tau", g.taus, "Urgency threshold(s); comma separated")->delimiter(',');
  app.add_option("--parallel", g.parallel, "Worker threads for grid cells")->check(CLI::PositiveNumber);
  app.add_option("--scenario", g.scenario_file, "Scenario JSON file (run only)")->check(CLI::ExistingFile);

  int rc = 0;
  auto bind = [&](CLI::App* sub, int (*fn)(const GlobalOptions&)) {
    sub->fallthrough();
    sub->callback([&rc, &g, fn] { rc = fn(g); });
  };
  bind(app.add_subcommand("gen-scenarios", "Write generated scenario JSON files"), cmd_gen_scenarios);
  bind(app.add_subcommand("run", "Run agents on one scenario and write traces"), cmd_run);
  bind(app.add_subcommand("compare", "Compare agents over seeds on a scenario set"), cmd_compare);
  bind(app.add_subcommand("ablate-tau", "Sweep the urgency threshold for Expert and Learner"), cmd_ablate_tau);
  bind(app.add_subcommand("trace-attention", "Write attention-weight traces"), cmd_trace_attention);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ContractError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return rc;
}
