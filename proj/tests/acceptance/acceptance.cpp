// Acceptance suite: one PASS/FAIL line per criterion; nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "shortsim/agents.hpp"
#include "shortsim/belief.hpp"
#include "shortsim/harness.hpp"
#include "shortsim/planner.hpp"

using namespace shortsim;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kPlannerRewardBand = 0.10;     // Expert/Learner vs FullPOMDP mean reward
constexpr double kTimingRatioSet1 = 0.6;
constexpr double kTimingRatioSet2 = 0.5;
constexpr std::size_t kMaxFocusSet3 = 10;
constexpr double kFocusTrendSlack = 1.0;        // last-quarter mean <= first-quarter mean + slack
constexpr double kTauRewardSpread = 0.10;       // (max - min) / |mean| across taus
constexpr double kTauFocusSpread = 2.0;         // drugs
constexpr double kGradRelTol = 1e-6;
constexpr double kBeliefRelTol = 1e-3;
constexpr double kPlannerValueTol = 1e-9;
constexpr int kGradInstances = 100;
constexpr int kBeliefInstances = 50;

const std::vector<std::uint64_t> kSeeds = {1, 2, 3};

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

const AgentSummary& of(const CompareResult& r, AgentKind a) {
  for (const auto& s : r.summary) {
    if (s.agent == a) return s;
  }
  throw std::logic_error("agent missing from summary");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "shortsim_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

CompareResult compare_all(int set) {
  CompareOptions opt;
  opt.scenario_set = set;
  opt.agents = {kAllAgents.begin(), kAllAgents.end()};
  opt.seeds = kSeeds;
  return compare(opt, ExperimentConfig{});
}

void ordinal_and_timing() {
  std::string ord_detail, time_detail;
  bool ord_ok = true, time_ok = true;
  for (int set : {1, 2}) {
    const auto r = compare_all(set);
    const auto& rnd = of(r, AgentKind::Random);
    const double baseline = std::max(of(r, AgentKind::Heuristic).mean_reward, of(r, AgentKind::Greedy).mean_reward);
    const auto& e = of(r, AgentKind::Expert);
    const auto& l = of(r, AgentKind::Learner);
    const auto& f = of(r, AgentKind::FullPOMDP);
    const double planners_min = std::min({e.mean_reward, l.mean_reward, f.mean_reward});
    bool ok = rnd.mean_reward < 0.0 && baseline > 0.0 && baseline < planners_min;
    ok = ok && std::abs(e.mean_reward - f.mean_reward) <= kPlannerRewardBand * std::abs(f.mean_reward);
    ok = ok && std::abs(l.mean_reward - f.mean_reward) <= kPlannerRewardBand * std::abs(f.mean_reward);
    ok = ok && e.total_stockouts == 0 && l.total_stockouts == 0 && f.total_stockouts == 0;
    ord_ok = ord_ok && ok;
    ord_detail += "set" + std::to_string(set) + " Random=" + fmt2(rnd.mean_reward) + " best(Heur,Greedy)=" +
                  fmt2(baseline) + " Expert=" + fmt2(e.mean_reward) + " Learner=" + fmt2(l.mean_reward) +
                  " Full=" + fmt2(f.mean_reward) + " stockouts(E,L,F)=" + std::to_string(e.total_stockouts) + "," +
                  std::to_string(l.total_stockouts) + "," + std::to_string(f.total_stockouts) + "; ";

    const double limit = set == 1 ? kTimingRatioSet1 : kTimingRatioSet2;
    const double re = e.mean_planning_seconds / f.mean_planning_seconds;
    const double rl = l.mean_planning_seconds / f.mean_planning_seconds;
    time_ok = time_ok && re <= limit && rl <= limit;
    time_detail += "set" + std::to_string(set) + " Expert/Full=" + fmt2(re) + " Learner/Full=" + fmt2(rl) +
                   " (limit " + fmt2(limit) + ", Full " + fmt4(f.mean_planning_seconds) + " s/week); ";
  }
  report("ordinal_sets_1_2", ord_ok, ord_detail);
  report("timing_ratio", time_ok, time_detail);
}

void set3_stability() {
  CompareOptions opt;
  opt.scenario_set = 3;
  opt.agents = {AgentKind::Random, AgentKind::Heuristic, AgentKind::Expert, AgentKind::Learner};
  opt.seeds = kSeeds;
  const auto r = compare(opt, ExperimentConfig{});
  bool ok = of(r, AgentKind::Expert).total_stockouts == 0 && of(r, AgentKind::Learner).total_stockouts == 0;
  std::string detail;
  for (const auto& m : r.runs) {
    if (m.agent != AgentKind::Expert && m.agent != AgentKind::Learner) continue;
    const std::size_t n = m.focus_sizes.size();
    const std::size_t q = n / 4;
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      first += static_cast<double>(m.focus_sizes[i]);
      last += static_cast<double>(m.focus_sizes[n - q + i]);
    }
    first /= static_cast<double>(q);
    last /= static_cast<double>(q);
    ok = ok && m.max_focus_size <= kMaxFocusSet3 && last <= first + kFocusTrendSlack;
    detail += std::string(to_string(m.agent)) + "/s" + std::to_string(m.seed) + " max=" +
              std::to_string(m.max_focus_size) + " q1=" + fmt2(first) + " q4=" + fmt2(last) + "; ";
  }
  const int baseline_stockouts =
      of(r, AgentKind::Heuristic).total_stockouts + of(r, AgentKind::Random).total_stockouts;
  ok = ok && baseline_stockouts >= 1;
  detail += "stockouts Expert=" + std::to_string(of(r, AgentKind::Expert).total_stockouts) +
            " Learner=" + std::to_string(of(r, AgentKind::Learner).total_stockouts) +
            " Heuristic=" + std::to_string(of(r, AgentKind::Heuristic).total_stockouts) +
            " Random=" + std::to_string(of(r, AgentKind::Random).total_stockouts);
  report("set3_stability", ok, detail);
}

void tau_ablation() {
  AblationOptions opt;
  opt.taus = {0.55, 0.65, 0.75};
  opt.scenario_set = 3;
  opt.seeds = kSeeds;
  const auto rows = ablate_tau(opt, ExperimentConfig{});
  auto spread = [&](const std::function<double(const AblationRow&)>& get) {
    double lo = get(rows[0]), hi = lo, sum = 0.0;
    for (const auto& row : rows) {
      lo = std::min(lo, get(row));
      hi = std::max(hi, get(row));
      sum += get(row);
    }
    return std::make_pair(hi - lo, sum / static_cast<double>(rows.size()));
  };
  const auto [e_spread, e_mean] = spread([](const AblationRow& r) { return r.expert_reward; });
  const auto [l_spread, l_mean] = spread([](const AblationRow& r) { return r.learner_reward; });
  const double ef_spread = spread([](const AblationRow& r) { return r.expert_avg_focus; }).first;
  const double lf_spread = spread([](const AblationRow& r) { return r.learner_avg_focus; }).first;
  const double f_spread = std::max(ef_spread, lf_spread);
  const double e_rel = e_spread / std::abs(e_mean);
  const double l_rel = l_spread / std::abs(l_mean);
  const bool ok = e_rel <= kTauRewardSpread && l_rel <= kTauRewardSpread && f_spread <= kTauFocusSpread;
  std::string detail;
  for (const auto& r : rows) {
    detail += "tau=" + fmt2(r.tau) + " E=" + fmt2(r.expert_reward) + " L=" + fmt2(r.learner_reward) +
              " focus=" + fmt2(r.avg_focus_size) + "; ";
  }
  detail += "reward spread E=" + fmt4(e_rel) + " L=" + fmt4(l_rel) + " focus spread=" + fmt2(f_spread);
  report("tau_ablation", ok, detail);
}

void gradient_check() {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> u01(0.0, 1.0), beta(0.0, 2.0), temp(0.5, 2.0);
  std::uniform_int_distribution<int> n_drugs(2, 10);
  double worst = 0.0;
  for (int inst = 0; inst < kGradInstances; ++inst) {
    const auto n = static_cast<std::size_t>(n_drugs(rng));
    std::vector<oracle::Row> x(n);
    std::vector<FeatureVector> act(n);
    std::vector<double> base(n), z(n);
    oracle::Row b{};
    for (auto& v : b) v = beta(rng);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < 4; ++f) act[i][f] = x[i][f] = u01(rng);
      base[i] = u01(rng);
      z[i] = base[i];
      for (std::size_t f = 0; f < 4; ++f) z[i] += b[f] * x[i][f];
    }
    std::vector<std::size_t> focus;
    for (std::size_t i = 0; i < n; ++i) {
      if (u01(rng) < 0.4) focus.push_back(i);
    }
    if (focus.empty()) focus.push_back(0);
    const double t = temp(rng);
    const auto g = softmax_focus_grad(act, z, focus, t);
    const auto fd = oracle::finite_difference_grad(x, base, b, focus, t);
    for (std::size_t f = 0; f < 4; ++f) worst = std::max(worst, std::abs(g[f] - fd[f]) / std::abs(fd[f]));
  }
  report("gradient_check", worst <= kGradRelTol,
         std::to_string(kGradInstances) + " instances, worst relative error " + fmt4(worst));
}

void belief_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> mean(-50.0, 400.0), sd(0.5, 40.0), shift(-60.0, 60.0);
  double worst = 0.0;
  for (int i = 0; i < kBeliefInstances; ++i) {
    const double m0 = mean(rng), s0 = sd(rng), so = sd(rng);
    const double y = m0 + shift(rng);
    const Gaussian post = conjugate_update({m0, s0}, y, so);
    const auto ref = oracle::grid_posterior(m0, s0, y, so);
    worst = std::max(worst, std::abs(post.mean - ref.mean) / std::max(1.0, std::abs(ref.mean)));
    worst = std::max(worst, std::abs(post.std - ref.std) / ref.std);
  }
  report("belief_oracle", worst <= kBeliefRelTol,
         std::to_string(kBeliefInstances) + " instances, worst relative error " + fmt4(worst));
}

void planner_oracle() {
  SimConfig sim;
  sim.demand_variation = 0.0;
  sim.lma_compliance_std = 0.0;
  PlannerConfig p;
  p.horizon = 2;
  p.rollouts = 3;
  p.rollout_policy = RolloutPolicy::Myopic;
  p.candidates = {ActionKind::Monitor, ActionKind::GrayMarketBuy};

  oracle::TinyModel m;
  for (const auto& b : sim.reward_buckets) m.buckets.emplace_back(b.lower_bound, b.score);
  m.stockout_penalty = sim.stockout_penalty;
  m.topup_weeks = sim.gray_market_weeks;
  m.topup_cost = sim.action_cost(ActionKind::GrayMarketBuy);
  m.discount = p.discount;

  SupplyBelief supply;
  supply.active = {"P", 1.0, false, 0.5, 2, {}};
  supply.other = {"A", 1.0, false, 0.5, 2, {}};
  supply.primary = "P";
  supply.alternate = "A";

  const double utz_grid[] = {1.0, 3.0, 7.0, 12.5, 20.0, 27.0, 33.3, 40.0};
  const double weeks_grid[] = {0.0, 0.5, 0.9, 1.0, 1.5, 2.5, 4.0, 7.0};
  int agree = 0, total = 0, gmb = 0;
  for (double u : utz_grid) {
    for (double w : weeks_grid) {
      DrugBelief b;
      b.id = "D";
      b.qoh_mean = u * w;
      b.qoh_std = 0.0;
      b.utz_mean = u;
      b.utz_std = 0.0;
      const auto r = plan_drug(b, supply, 0, sim, p, 5);
      const auto ref = m.first_action_values(b.qoh_mean, u, p.horizon);
      const ActionKind expected = ref[1] > ref[0] ? ActionKind::GrayMarketBuy : ActionKind::Monitor;
      const bool values_ok = std::abs(r.values[0].value - ref[0]) <= kPlannerValueTol &&
                             std::abs(r.values[1].value - ref[1]) <= kPlannerValueTol;
      agree += (values_ok && r.action == expected) ? 1 : 0;
      gmb += expected == ActionKind::GrayMarketBuy ? 1 : 0;
      ++total;
    }
  }
  report("planner_oracle", agree == total,
         std::to_string(agree) + "/" + std::to_string(total) + " instances match expectimax (" +
             std::to_string(gmb) + " with a top-up optimum)");
}

void determinism() {
  std::vector<GridCell> cells;
  for (std::uint64_t seed : {1u, 2u}) {
    const auto spec = generate_scenario(2, seed);
    for (AgentKind a : kAllAgents) cells.push_back({spec, a, seed, ExperimentConfig{}});
  }
  const auto a = run_grid(cells, 1, scratch("det_serial"));
  const auto b = run_grid(cells, 1, scratch("det_repeat"));
  const auto c = run_grid(cells, 3, scratch("det_parallel"));
  int identical = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string wa = slurp(*a[i].weekly_trace_path), aa = slurp(*a[i].attention_trace_path);
    const bool same = wa == slurp(*b[i].weekly_trace_path) && wa == slurp(*c[i].weekly_trace_path) &&
                      aa == slurp(*b[i].attention_trace_path) && aa == slurp(*c[i].attention_trace_path) &&
                      !wa.empty();
    identical += same ? 1 : 0;
  }
  report("determinism", identical == static_cast<int>(cells.size()),
         std::to_string(identical) + "/" + std::to_string(cells.size()) +
             " runs byte-identical across repeat and 3 workers");
}

void frozen_learner() {
  ExperimentConfig cfg;
  cfg.learner.alpha = 0.0;
  int same = 0, total = 0;
  for (int set : {1, 2, 3}) {
    const auto spec = generate_scenario(set, 1);
    const auto e = run(spec, AgentKind::Expert, 1, cfg, scratch("frozen_expert"));
    const auto l = run(spec, AgentKind::Learner, 1, cfg, scratch("frozen_learner"));
    const bool ok = e.total_reward == l.total_reward && e.focus_sizes == l.focus_sizes &&
                    slurp(*e.weekly_trace_path) == slurp(*l.weekly_trace_path);
    same += ok ? 1 : 0;
    ++total;
  }
  report("frozen_learner_equivalence", same == total,
         std::to_string(same) + "/" + std::to_string(total) + " scenarios bit-identical to Expert");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::pair<const char*, std::function<void()>>> checks = {
      {"ordinal_and_timing", ordinal_and_timing}, {"set3_stability", set3_stability},
      {"tau_ablation", tau_ablation},             {"gradient_check", gradient_check},
      {"belief_oracle", belief_oracle},           {"planner_oracle", planner_oracle},
      {"determinism", determinism},               {"frozen_learner", frozen_learner},
  };
  for (const auto& [name, check] : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      report(name, false, std::string("threw: ") + e.what());
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d failure(s), %.1f s\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
