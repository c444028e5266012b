#include "shortsim/config.hpp"

#include <fstream>
#include <set>

namespace shortsim {

namespace {

using nlohmann::json;

// Reads optional keys of one object into existing fields and rejects keys it never asked about.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_, "expected an object");
  }

  void number(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) throw ValidationError(field(key), "expected a number");
      out = v->get<double>();
    }
  }

  void integer(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) throw ValidationError(field(key), "expected an integer");
      out = v->get<int>();
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) throw ValidationError(field(key), "expected a boolean");
      out = v->get<bool>();
    }
  }

  const json* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const { return path_ + "." + key; }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ValidationError(field(it.key()), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_beta(const json& j, const std::string& path, FeatureVector& beta) {
  Section s(j, path);
  for (Feature f : kAllFeatures) s.number(std::string(to_string(f)).c_str(), beta[static_cast<std::size_t>(f)]);
  s.reject_unknown();
}

json beta_to_json(const FeatureVector& beta) {
  json j;
  for (Feature f : kAllFeatures) j[std::string(to_string(f))] = beta[static_cast<std::size_t>(f)];
  return j;
}

void read_sim(const json& j, SimConfig& c) {
  Section s(j, "sim");
  s.number("runway_cap", c.runway_cap);
  if (const json* v = s.find("reward_buckets")) {
    if (!v->is_array()) throw ValidationError("sim.reward_buckets", "expected an array");
    c.reward_buckets.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      Section b((*v)[i], "sim.reward_buckets[" + std::to_string(i) + "]");
      RewardBucket rb;
      b.number("lower_bound", rb.lower_bound);
      b.number("score", rb.score);
      b.reject_unknown();
      c.reward_buckets.push_back(rb);
    }
  }
  s.number("stockout_penalty", c.stockout_penalty);
  if (const json* v = s.find("action_costs")) {
    Section a(*v, "sim.action_costs");
    for (ActionKind k : kAllActions) a.number(std::string(to_string(k)).c_str(), c.action_costs[index_of(k)]);
    a.reject_unknown();
  }
  s.number("soft_lma_weekly_cost", c.soft_lma_weekly_cost);
  s.number("hard_lma_weekly_cost", c.hard_lma_weekly_cost);
  s.number("soft_lma_effect", c.soft_lma_effect);
  s.number("hard_lma_effect", c.hard_lma_effect);
  s.number("lma_compliance_std", c.lma_compliance_std);
  s.integer("switch_delay_weeks", c.switch_delay_weeks);
  s.number("expedite_success_prob", c.expedite_success_prob);
  s.integer("requeue_min_weeks", c.requeue_min_weeks);
  s.integer("requeue_max_weeks", c.requeue_max_weeks);
  s.number("emergency_buy_weeks", c.emergency_buy_weeks);
  s.number("gray_market_weeks", c.gray_market_weeks);
  s.integer("emergency_latency_weeks", c.emergency_latency_weeks);
  s.number("reputation_decay", c.reputation_decay);
  s.number("demand_variation", c.demand_variation);
  s.number("audit_qoh_std", c.audit_qoh_std);
  s.number("passive_qoh_std_frac", c.passive_qoh_std_frac);
  s.number("passive_qoh_std_floor", c.passive_qoh_std_floor);
  s.number("utz_obs_std_frac", c.utz_obs_std_frac);
  s.number("utz_obs_std_floor", c.utz_obs_std_floor);
  s.number("erd_obs_std", c.erd_obs_std);
  s.number("erd_obs_std_contact", c.erd_obs_std_contact);
  s.number("erd_obs_std_query", c.erd_obs_std_query);
  s.number("qoh_diffusion", c.qoh_diffusion);
  s.number("utz_diffusion", c.utz_diffusion);
  s.number("erd_diffusion", c.erd_diffusion);
  s.number("qoh_std_cap", c.qoh_std_cap);
  s.number("utz_std_cap", c.utz_std_cap);
  s.number("erd_std_cap", c.erd_std_cap);
  s.number("reliability_smoothing", c.reliability_smoothing);
  s.reject_unknown();
}

json sim_to_json(const SimConfig& c) {
  json j;
  j["runway_cap"] = c.runway_cap;
  json buckets = json::array();
  for (const auto& b : c.reward_buckets) buckets.push_back({{"lower_bound", b.lower_bound}, {"score", b.score}});
  j["reward_buckets"] = buckets;
  j["stockout_penalty"] = c.stockout_penalty;
  json costs;
  for (ActionKind k : kAllActions) costs[std::string(to_string(k))] = c.action_cost(k);
  j["action_costs"] = costs;
  j["soft_lma_weekly_cost"] = c.soft_lma_weekly_cost;
  j["hard_lma_weekly_cost"] = c.hard_lma_weekly_cost;
  j["soft_lma_effect"] = c.soft_lma_effect;
  j["hard_lma_effect"] = c.hard_lma_effect;
  j["lma_compliance_std"] = c.lma_compliance_std;
  j["switch_delay_weeks"] = c.switch_delay_weeks;
  j["expedite_success_prob"] = c.expedite_success_prob;
  j["requeue_min_weeks"] = c.requeue_min_weeks;
  j["requeue_max_weeks"] = c.requeue_max_weeks;
  j["emergency_buy_weeks"] = c.emergency_buy_weeks;
  j["gray_market_weeks"] = c.gray_market_weeks;
  j["emergency_latency_weeks"] = c.emergency_latency_weeks;
  j["reputation_decay"] = c.reputation_decay;
  j["demand_variation"] = c.demand_variation;
  j["audit_qoh_std"] = c.audit_qoh_std;
  j["passive_qoh_std_frac"] = c.passive_qoh_std_frac;
  j["passive_qoh_std_floor"] = c.passive_qoh_std_floor;
  j["utz_obs_std_frac"] = c.utz_obs_std_frac;
  j["utz_obs_std_floor"] = c.utz_obs_std_floor;
  j["erd_obs_std"] = c.erd_obs_std;
  j["erd_obs_std_contact"] = c.erd_obs_std_contact;
  j["erd_obs_std_query"] = c.erd_obs_std_query;
  j["qoh_diffusion"] = c.qoh_diffusion;
  j["utz_diffusion"] = c.utz_diffusion;
  j["erd_diffusion"] = c.erd_diffusion;
  j["qoh_std_cap"] = c.qoh_std_cap;
  j["utz_std_cap"] = c.utz_std_cap;
  j["erd_std_cap"] = c.erd_std_cap;
  j["reliability_smoothing"] = c.reliability_smoothing;
  return j;
}

void read_planner(const json& j, PlannerConfig& c) {
  Section s(j, "planner");
  s.integer("horizon", c.horizon);
  s.integer("rollouts", c.rollouts);
  s.number("discount", c.discount);
  if (const json* v = s.find("rollout_policy")) {
    if (!v->is_string()) throw ValidationError("planner.rollout_policy", "expected a string");
    c.rollout_policy = rollout_policy_from_string(v->get<std::string>());
  }
  s.number("audit_std_threshold", c.audit_std_threshold);
  s.number("assumed_recovery_hazard", c.assumed_recovery_hazard);
  s.boolean("enabled", c.enabled);
  if (const json* v = s.find("candidates")) {
    if (!v->is_array()) throw ValidationError("planner.candidates", "expected an array");
    c.candidates.clear();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string path = "planner.candidates[" + std::to_string(i) + "]";
      if (!(*v)[i].is_string()) throw ValidationError(path, "expected an action name");
      try {
        c.candidates.push_back(action_from_string((*v)[i].get<std::string>()));
      } catch (const ContractError& e) {
        throw ValidationError(path, e.what());
      }
    }
  }
  s.reject_unknown();
}

void read_attention(const json& j, AttentionWeights& w, AttentionParams& p) {
  Section s(j, "attention");
  if (const json* v = s.find("beta")) read_beta(*v, "attention.beta", w.beta);
  s.number("tau", w.tau);
  if (const json* v = s.find("k")) {
    if (!v->is_number_unsigned()) throw ValidationError("attention.k", "expected a positive integer");
    w.k = v->get<std::size_t>();
  }
  if (const json* v = s.find("cap")) {
    if (v->is_null()) {
      w.cap.reset();
    } else if (v->is_number_unsigned()) {
      w.cap = v->get<std::size_t>();
    } else {
      throw ValidationError("attention.cap", "expected a positive integer or null");
    }
  }
  s.number("beta_max", w.beta_max);
  s.number("runway_horizon", p.runway_horizon);
  s.number("runway_std_scale", p.runway_std_scale);
  s.reject_unknown();
}

void read_learner(const json& j, LearnerParams& p, std::optional<AttentionWeights>& initial,
                  const AttentionWeights& expert) {
  Section s(j, "learner");
  s.number("alpha", p.alpha);
  s.number("eta", p.eta);
  s.number("temperature", p.temperature);
  s.number("beta_max", p.beta_max);
  if (const json* v = s.find("initial_beta")) {
    AttentionWeights w = expert;
    read_beta(*v, "learner.initial_beta", w.beta);
    initial = w;
  }
  s.reject_unknown();
}

void read_scenario_gen(const json& j, ScenarioGenConfig& g) {
  Section s(j, "scenario_gen");
  s.integer("drug_count", g.drug_count);
  s.number("qoh_min", g.qoh_min);
  s.number("qoh_max", g.qoh_max);
  s.number("utz_min", g.utz_min);
  s.number("utz_max", g.utz_max);
  s.number("healthy_runway_min", g.healthy_runway_min);
  s.number("healthy_runway_max", g.healthy_runway_max);
  s.number("stressed_runway_min", g.stressed_runway_min);
  s.number("stressed_runway_max", g.stressed_runway_max);
  auto read_list = [&](const char* key, std::vector<double>& out) {
    if (const json* v = s.find(key)) {
      if (!v->is_array()) throw ValidationError(s.field(key), "expected an array");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) throw ValidationError(s.field(key), "expected numbers");
        out.push_back(x.get<double>());
      }
    }
  };
  read_list("clinical_levels", g.clinical_levels);
  read_list("clinical_weights", g.clinical_weights);
  s.reject_unknown();
}

}  // namespace

void ExperimentConfig::validate() const {
  sim.validate();
  planner.validate();
  attention.validate();
  learner.validate();
  if (learner_initial) learner_initial->validate();
  if (!(attention_params.runway_horizon > 0.0)) throw ValidationError("attention.runway_horizon", "must be > 0");
  if (!(attention_params.runway_std_scale > 0.0)) {
    throw ValidationError("attention.runway_std_scale", "must be > 0");
  }
  if (scenario_gen.drug_count < 1) throw ValidationError("scenario_gen.drug_count", "must be >= 1");
  if (scenario_gen.clinical_levels.empty() ||
      scenario_gen.clinical_levels.size() != scenario_gen.clinical_weights.size()) {
    throw ValidationError("scenario_gen.clinical_weights", "must have one weight per clinical level");
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  Section root(j, "<config>");
  if (const json* v = root.find("sim")) read_sim(*v, c.sim);
  if (const json* v = root.find("planner")) read_planner(*v, c.planner);
  if (const json* v = root.find("attention")) read_attention(*v, c.attention, c.attention_params);
  if (const json* v = root.find("learner")) read_learner(*v, c.learner, c.learner_initial, c.attention);
  if (const json* v = root.find("scenario_gen")) read_scenario_gen(*v, c.scenario_gen);
  root.reject_unknown();
  c.validate();
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  json j;
  j["sim"] = sim_to_json(c.sim);

  json planner;
  planner["horizon"] = c.planner.horizon;
  planner["rollouts"] = c.planner.rollouts;
  planner["discount"] = c.planner.discount;
  planner["rollout_policy"] = std::string(to_string(c.planner.rollout_policy));
  planner["audit_std_threshold"] = c.planner.audit_std_threshold;
  planner["assumed_recovery_hazard"] = c.planner.assumed_recovery_hazard;
  planner["enabled"] = c.planner.enabled;
  json candidates = json::array();
  for (ActionKind a : c.planner.candidates) candidates.push_back(std::string(to_string(a)));
  planner["candidates"] = candidates;
  j["planner"] = planner;

  json attention;
  attention["beta"] = beta_to_json(c.attention.beta);
  attention["tau"] = c.attention.tau;
  attention["k"] = c.attention.k;
  attention["cap"] = c.attention.cap ? json(*c.attention.cap) : json(nullptr);
  attention["beta_max"] = c.attention.beta_max;
  attention["runway_horizon"] = c.attention_params.runway_horizon;
  attention["runway_std_scale"] = c.attention_params.runway_std_scale;
  j["attention"] = attention;

  json learner;
  learner["alpha"] = c.learner.alpha;
  learner["eta"] = c.learner.eta;
  learner["temperature"] = c.learner.temperature;
  learner["beta_max"] = c.learner.beta_max;
  if (c.learner_initial) learner["initial_beta"] = beta_to_json(c.learner_initial->beta);
  j["learner"] = learner;

  json gen;
  const auto& g = c.scenario_gen;
  gen["drug_count"] = g.drug_count;
  gen["qoh_min"] = g.qoh_min;
  gen["qoh_max"] = g.qoh_max;
  gen["utz_min"] = g.utz_min;
  gen["utz_max"] = g.utz_max;
  gen["healthy_runway_min"] = g.healthy_runway_min;
  gen["healthy_runway_max"] = g.healthy_runway_max;
  gen["stressed_runway_min"] = g.stressed_runway_min;
  gen["stressed_runway_max"] = g.stressed_runway_max;
  gen["clinical_levels"] = g.clinical_levels;
  gen["clinical_weights"] = g.clinical_weights;
  j["scenario_gen"] = gen;
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("<config>", "cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("<config>", std::string("malformed JSON: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace shortsim
