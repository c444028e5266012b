#include "shortsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "shortsim/rng.hpp"

namespace shortsim {

namespace {

void require_prob(double p, const std::string& field) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(field, "must be in [0, 1]");
}

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

void ScenarioSpec::validate() const {
  if (schema_version != kScenarioSchemaVersion) {
    throw ValidationError("schema_version", "unsupported version " + std::to_string(schema_version));
  }
  if (name.empty()) throw ValidationError("name", "must be nonempty");
  if (horizon_weeks <= 0) throw ValidationError("horizon_weeks", "must be > 0");
  if (!(demand_variation >= 0.0)) throw ValidationError("demand_variation", "must be >= 0");
  if (drugs.empty()) throw ValidationError("drugs", "must be nonempty");
  if (suppliers.empty()) throw ValidationError("suppliers", "must be nonempty");

  std::set<SupplierId> supplier_ids;
  for (std::size_t i = 0; i < suppliers.size(); ++i) {
    const auto& s = suppliers[i];
    const std::string p = "suppliers[" + std::to_string(i) + "]";
    if (s.id.empty()) throw ValidationError(p + ".id", "must be nonempty");
    if (!supplier_ids.insert(s.id).second) throw ValidationError(p + ".id", "duplicate supplier id " + s.id);
    require_prob(s.reliability, p + ".reliability");
    require_prob(s.recovery_hazard, p + ".recovery_hazard");
    if (s.lead_time_weeks < 1) throw ValidationError(p + ".lead_time_weeks", "must be >= 1");
    for (std::size_t w = 0; w < s.disruptions.size(); ++w) {
      const auto& win = s.disruptions[w];
      const std::string wp = p + ".disruptions[" + std::to_string(w) + "]";
      if (win.start_week < 0) throw ValidationError(wp + ".start_week", "must be >= 0");
      if (win.duration_weeks < 1) throw ValidationError(wp + ".duration_weeks", "must be >= 1");
      require_prob(win.recovery_hazard, wp + ".recovery_hazard");
    }
  }

  std::set<DrugId> drug_ids;
  for (std::size_t i = 0; i < drugs.size(); ++i) {
    const auto& d = drugs[i];
    const std::string p = "drugs[" + std::to_string(i) + "]";
    if (d.id.empty()) throw ValidationError(p + ".id", "must be nonempty");
    if (!drug_ids.insert(d.id).second) throw ValidationError(p + ".id", "duplicate drug id " + d.id);
    if (!(d.qoh >= 0.0)) throw ValidationError(p + ".qoh", "must be >= 0");
    if (!(d.base_utz >= 0.0)) throw ValidationError(p + ".base_utz", "must be >= 0");
    require_prob(d.clinical_impact, p + ".clinical_impact");
    require_prob(d.reputation, p + ".reputation");
    if (!supplier_ids.contains(d.primary_supplier)) {
      throw ValidationError(p + ".primary_supplier", "unknown supplier '" + d.primary_supplier + "'");
    }
    if (!supplier_ids.contains(d.alternate_supplier)) {
      throw ValidationError(p + ".alternate_supplier", "unknown supplier '" + d.alternate_supplier + "'");
    }
    if (d.alternate_supplier == d.primary_supplier) {
      throw ValidationError(p + ".alternate_supplier", "must differ from primary_supplier");
    }
    if (!(d.routine_order_qty >= 0.0)) throw ValidationError(p + ".routine_order_qty", "must be >= 0");
    if (!(d.utz_drift > -1.0)) throw ValidationError(p + ".utz_drift", "must be > -1");
    for (std::size_t o = 0; o < d.pending_orders.size(); ++o) {
      const auto& ord = d.pending_orders[o];
      const std::string op = p + ".pending_orders[" + std::to_string(o) + "]";
      if (!(ord.quantity > 0.0)) throw ValidationError(op + ".quantity", "must be > 0");
      if (ord.erd_week < ord.placed_week) throw ValidationError(op + ".erd_week", "must be >= placed_week");
    }
  }

  auto positive = [](const std::optional<double>& v, const char* field) {
    if (v && !(*v > 0.0)) throw ValidationError(field, "must be > 0");
  };
  auto nonneg = [](const std::optional<double>& v, const char* field) {
    if (v && !(*v >= 0.0)) throw ValidationError(field, "must be >= 0");
  };
  positive(noise.audit_qoh_std, "noise.audit_qoh_std");
  nonneg(noise.passive_qoh_std_frac, "noise.passive_qoh_std_frac");
  positive(noise.passive_qoh_std_floor, "noise.passive_qoh_std_floor");
  nonneg(noise.utz_obs_std_frac, "noise.utz_obs_std_frac");
  positive(noise.utz_obs_std_floor, "noise.utz_obs_std_floor");
  positive(noise.erd_obs_std, "noise.erd_obs_std");
}

ScenarioSpec generate_scenario(int set, std::uint64_t seed, const ScenarioGenConfig& gen) {
  if (set < 1 || set > 3) throw ContractError("generate_scenario: unknown scenario set " + std::to_string(set));
  if (gen.clinical_levels.empty() || gen.clinical_levels.size() != gen.clinical_weights.size()) {
    throw ValidationError("scenario_gen.clinical_weights", "must match clinical_levels");
  }
  Rng rng(derive_seed(seed, static_cast<std::uint64_t>(set)));
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * sample_uniform(rng); };

  ScenarioSpec spec;
  spec.seed = seed;
  spec.name = "set" + std::to_string(set) + "_seed" + std::to_string(seed);

  int stressed = 0;
  // Standing orders of stressed drugs cover this share of base demand.
  double stressed_cover_lo = 0.6;
  double stressed_cover_hi = 0.9;
  double reliability_lo = 0.95;
  double reliability_hi = 0.99;
  double drift_lo = 0.0;
  double drift_hi = 0.0;
  switch (set) {
    case 1:
      spec.horizon_weeks = 3;
      spec.demand_variation = 0.05;
      stressed = sample_int(rng, 2, 4);
      stressed_cover_lo = 0.4;  // acute snapshot: no recovery inside 3 weeks
      stressed_cover_hi = 0.7;
      spec.noise.passive_qoh_std_frac = 0.08;
      break;
    case 2:
      spec.horizon_weeks = 10;
      spec.demand_variation = 0.10;
      stressed = sample_int(rng, 2, 4);
      reliability_lo = 0.88;
      reliability_hi = 0.95;
      break;
    default:
      spec.horizon_weeks = 52;
      spec.demand_variation = 0.12;
      stressed = sample_int(rng, 3, 5);
      reliability_lo = 0.85;
      reliability_hi = 0.95;
      drift_lo = -0.004;
      drift_hi = 0.006;
      break;
  }

  const std::vector<SupplierId> primaries = {"P1", "P2", "P3", "P4"};
  const std::vector<SupplierId> alternates = {"A1", "A2"};
  for (const auto& id : primaries) {
    SupplierSpec s;
    s.id = id;
    s.reliability = round_to(uniform(reliability_lo, reliability_hi), 0.001);
    s.lead_time_weeks = 2;
    s.recovery_hazard = 0.5;
    spec.suppliers.push_back(s);
  }
  for (const auto& id : alternates) {
    SupplierSpec s;
    s.id = id;
    s.reliability = round_to(uniform(0.85, 0.92), 0.001);
    s.lead_time_weeks = 2;
    s.recovery_hazard = 0.5;
    spec.suppliers.push_back(s);
  }

  // Scheduled disruptions on primary suppliers.
  auto add_window = [&](Week start, int duration, double hazard) {
    auto& s = spec.suppliers[static_cast<std::size_t>(sample_int(rng, 0, static_cast<int>(primaries.size()) - 1))];
    s.disruptions.push_back({start, duration, hazard});
  };
  if (set == 2) {
    add_window(sample_int(rng, 1, 3), sample_int(rng, 2, 4), 0.5);
    add_window(sample_int(rng, 4, 6), sample_int(rng, 2, 3), 0.5);
  } else if (set == 3) {
    for (Week start = 4; start < spec.horizon_weeks - 2; start += 8) {
      add_window(start + sample_int(rng, 0, 3), sample_int(rng, 2, 5), 0.5);
    }
  }
  for (auto& s : spec.suppliers) {
    std::sort(s.disruptions.begin(), s.disruptions.end(),
              [](const WindowSpec& a, const WindowSpec& b) { return a.start_week < b.start_week; });
  }

  // Pick which drugs start in shortage.
  std::vector<int> order(static_cast<std::size_t>(gen.drug_count));
  for (int i = 0; i < gen.drug_count; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> is_stressed(order.size(), false);
  for (int i = 0; i < std::min(stressed, gen.drug_count); ++i) is_stressed[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;

  // Balanced primaries, so one disruption reaches at most ceil(n/4) drugs.
  std::vector<std::size_t> primary_of(order.size());
  for (std::size_t i = 0; i < primary_of.size(); ++i) primary_of[i] = i % primaries.size();
  std::shuffle(primary_of.begin(), primary_of.end(), rng);

  std::discrete_distribution<std::size_t> clinical(gen.clinical_weights.begin(), gen.clinical_weights.end());
  for (int i = 0; i < gen.drug_count; ++i) {
    DrugSpec d;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "D%02d", i + 1);
    d.id = buf;
    d.base_utz = round_to(uniform(gen.utz_min, gen.utz_max), 0.1);
    d.clinical_impact = gen.clinical_levels[clinical(rng)];
    d.primary_supplier = primaries[primary_of[static_cast<std::size_t>(i)]];
    d.alternate_supplier = alternates[static_cast<std::size_t>(i) % alternates.size()];
    d.utz_drift = round_to(uniform(drift_lo, drift_hi), 0.0001);
    if (is_stressed[static_cast<std::size_t>(i)]) {
      const double runway = uniform(gen.stressed_runway_min, gen.stressed_runway_max);
      d.qoh = round_to(std::max(1.0, runway * d.base_utz), 0.1);
      d.routine_order_qty = round_to(d.base_utz * uniform(stressed_cover_lo, stressed_cover_hi), 0.1);
      d.reputation = round_to(uniform(0.3, 0.6), 0.01);
    } else {
      const double runway = uniform(gen.healthy_runway_min, gen.healthy_runway_max);
      d.qoh = round_to(std::clamp(runway * d.base_utz, gen.qoh_min, gen.qoh_max), 0.1);
      d.routine_order_qty = d.base_utz;
      d.reputation = 0.0;
    }
    const auto& primary = *std::find_if(spec.suppliers.begin(), spec.suppliers.end(),
                                        [&](const SupplierSpec& s) { return s.id == d.primary_supplier; });
    for (Week w = 0; w < primary.lead_time_weeks; ++w) {
      if (d.routine_order_qty > 0.0) d.pending_orders.push_back({d.routine_order_qty, w, 0});
    }
    spec.drugs.push_back(std::move(d));
  }
  return spec;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  template <typename T>
  T get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw ValidationError(field(key), "missing required field");
    return convert<T>(*it, key);
  }

  template <typename T>
  std::optional<T> get_optional(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return std::nullopt;
    return convert<T>(*it, key);
  }

  const json& child(const std::string& key, json::value_t type) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw ValidationError(field(key), "missing required field");
    if (it->type() != type) throw ValidationError(field(key), "wrong type");
    return *it;
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void reject_unknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ValidationError(field(it.key()), "unknown field");
    }
  }

 private:
  template <typename T>
  T convert(const json& v, const std::string& key) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ValidationError(field(key), "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ValidationError(field(key), "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ValidationError(field(key), "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ValidationError(field(key), "expected a string");
    }
    return v.get<T>();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json noise_to_json(const NoiseSpec& n) {
  json j = json::object();
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = *v;
  };
  put("audit_qoh_std", n.audit_qoh_std);
  put("passive_qoh_std_frac", n.passive_qoh_std_frac);
  put("passive_qoh_std_floor", n.passive_qoh_std_floor);
  put("utz_obs_std_frac", n.utz_obs_std_frac);
  put("utz_obs_std_floor", n.utz_obs_std_floor);
  put("erd_obs_std", n.erd_obs_std);
  return j;
}

}  // namespace

nlohmann::json scenario_to_json(const ScenarioSpec& spec) {
  json j;
  j["schema_version"] = spec.schema_version;
  j["name"] = spec.name;
  j["horizon_weeks"] = spec.horizon_weeks;
  j["seed"] = spec.seed;
  j["demand_variation"] = spec.demand_variation;
  j["noise"] = noise_to_json(spec.noise);
  json drugs = json::array();
  for (const auto& d : spec.drugs) {
    json o;
    o["id"] = d.id;
    o["qoh"] = d.qoh;
    o["base_utz"] = d.base_utz;
    o["clinical_impact"] = d.clinical_impact;
    o["reputation"] = d.reputation;
    o["primary_supplier"] = d.primary_supplier;
    o["alternate_supplier"] = d.alternate_supplier;
    o["routine_order_qty"] = d.routine_order_qty;
    o["utz_drift"] = d.utz_drift;
    o["lma"] = std::string(to_string(d.lma));
    json orders = json::array();
    for (const auto& p : d.pending_orders) {
      orders.push_back({{"quantity", p.quantity}, {"erd_week", p.erd_week}, {"placed_week", p.placed_week}});
    }
    o["pending_orders"] = orders;
    drugs.push_back(o);
  }
  j["drugs"] = drugs;
  json suppliers = json::array();
  for (const auto& s : spec.suppliers) {
    json o;
    o["id"] = s.id;
    o["reliability"] = s.reliability;
    o["lead_time_weeks"] = s.lead_time_weeks;
    o["disrupted"] = s.disrupted;
    o["recovery_hazard"] = s.recovery_hazard;
    json windows = json::array();
    for (const auto& w : s.disruptions) {
      windows.push_back(
          {{"start_week", w.start_week}, {"duration_weeks", w.duration_weeks}, {"recovery_hazard", w.recovery_hazard}});
    }
    o["disruptions"] = windows;
    suppliers.push_back(o);
  }
  j["suppliers"] = suppliers;
  return j;
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  Reader r(j, "");
  ScenarioSpec spec;
  spec.schema_version = r.get<int>("schema_version");
  spec.name = r.get<std::string>("name");
  spec.horizon_weeks = r.get<int>("horizon_weeks");
  spec.seed = r.get<std::uint64_t>("seed");
  spec.demand_variation = r.get<double>("demand_variation");

  {
    Reader n(r.child("noise", json::value_t::object), "noise");
    spec.noise.audit_qoh_std = n.get_optional<double>("audit_qoh_std");
    spec.noise.passive_qoh_std_frac = n.get_optional<double>("passive_qoh_std_frac");
    spec.noise.passive_qoh_std_floor = n.get_optional<double>("passive_qoh_std_floor");
    spec.noise.utz_obs_std_frac = n.get_optional<double>("utz_obs_std_frac");
    spec.noise.utz_obs_std_floor = n.get_optional<double>("utz_obs_std_floor");
    spec.noise.erd_obs_std = n.get_optional<double>("erd_obs_std");
    n.reject_unknown();
  }

  const json& drugs = r.child("drugs", json::value_t::array);
  for (std::size_t i = 0; i < drugs.size(); ++i) {
    Reader d(drugs[i], "drugs[" + std::to_string(i) + "]");
    DrugSpec ds;
    ds.id = d.get<std::string>("id");
    ds.qoh = d.get<double>("qoh");
    ds.base_utz = d.get<double>("base_utz");
    ds.clinical_impact = d.get<double>("clinical_impact");
    ds.reputation = d.get<double>("reputation");
    ds.primary_supplier = d.get<std::string>("primary_supplier");
    ds.alternate_supplier = d.get<std::string>("alternate_supplier");
    ds.routine_order_qty = d.get<double>("routine_order_qty");
    ds.utz_drift = d.get<double>("utz_drift");
    try {
      ds.lma = lma_from_string(d.get<std::string>("lma"));
    } catch (const ContractError& e) {
      throw ValidationError(d.field("lma"), e.what());
    }
    const json& orders = d.child("pending_orders", json::value_t::array);
    for (std::size_t o = 0; o < orders.size(); ++o) {
      Reader ord(orders[o], d.field("pending_orders[" + std::to_string(o) + "]"));
      OrderSpec os;
      os.quantity = ord.get<double>("quantity");
      os.erd_week = ord.get<int>("erd_week");
      os.placed_week = ord.get<int>("placed_week");
      ord.reject_unknown();
      ds.pending_orders.push_back(os);
    }
    d.reject_unknown();
    spec.drugs.push_back(std::move(ds));
  }

  const json& suppliers = r.child("suppliers", json::value_t::array);
  for (std::size_t i = 0; i < suppliers.size(); ++i) {
    Reader s(suppliers[i], "suppliers[" + std::to_string(i) + "]");
    SupplierSpec ss;
    ss.id = s.get<std::string>("id");
    ss.reliability = s.get<double>("reliability");
    ss.lead_time_weeks = s.get<int>("lead_time_weeks");
    ss.disrupted = s.get<bool>("disrupted");
    ss.recovery_hazard = s.get<double>("recovery_hazard");
    const json& windows = s.child("disruptions", json::value_t::array);
    for (std::size_t w = 0; w < windows.size(); ++w) {
      Reader win(windows[w], s.field("disruptions[" + std::to_string(w) + "]"));
      WindowSpec ws;
      ws.start_week = win.get<int>("start_week");
      ws.duration_weeks = win.get<int>("duration_weeks");
      ws.recovery_hazard = win.get<double>("recovery_hazard");
      win.reject_unknown();
      ss.disruptions.push_back(ws);
    }
    s.reject_unknown();
    spec.suppliers.push_back(std::move(ss));
  }
  r.reject_unknown();
  spec.validate();
  return spec;
}

void save_spec(const ScenarioSpec& spec, const std::filesystem::path& path) {
  spec.validate();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file " + path.string());
  out << scenario_to_json(spec).dump(2) << '\n';
}

ScenarioSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("<file>", "cannot open scenario file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("<file>", std::string("malformed JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

World make_world(const ScenarioSpec& spec, const SimConfig& config) {
  spec.validate();
  World w;
  w.week = 0;
  for (const auto& s : spec.suppliers) {
    SupplierState st;
    st.id = s.id;
    st.reliability = s.reliability;
    st.disrupted = s.disrupted;
    st.recovery_hazard = s.recovery_hazard;
    st.lead_time_weeks = s.lead_time_weeks;
    w.suppliers.push_back(st);
    for (const auto& win : s.disruptions) {
      w.disruptions.push_back({s.id, win.start_week, win.duration_weeks, win.recovery_hazard});
    }
  }
  for (const auto& d : spec.drugs) {
    DrugTrueState st;
    st.id = d.id;
    st.qoh = d.qoh;
    st.base_utz = d.base_utz;
    st.lma = d.lma;
    const double keep = 1.0 - lma_effect_fraction(d.lma, config);
    st.utz = d.base_utz * keep;
    st.primary_supplier = d.primary_supplier;
    st.alternate_supplier = d.alternate_supplier;
    st.active_supplier = d.primary_supplier;
    st.reputation = d.reputation;
    st.clinical_impact = d.clinical_impact;
    st.routine_order_qty = d.routine_order_qty;
    st.utz_drift = d.utz_drift;
    st.stocked_out = d.qoh == 0.0;
    SupplierState& primary = w.supplier(d.primary_supplier);
    for (const auto& o : d.pending_orders) {
      primary.pending_orders.push_back({d.id, o.quantity, o.erd_week, o.placed_week, o.erd_week, false, false});
    }
    w.drugs.push_back(std::move(st));
  }
  for (auto& s : w.suppliers) {
    std::stable_sort(s.pending_orders.begin(), s.pending_orders.end(),
                     [](const PendingOrder& a, const PendingOrder& b) { return a.erd_week < b.erd_week; });
  }
  return w;
}

SimConfig effective_config(const SimConfig& base, const ScenarioSpec& spec) {
  SimConfig c = base;
  c.demand_variation = spec.demand_variation;
  if (spec.noise.audit_qoh_std) c.audit_qoh_std = *spec.noise.audit_qoh_std;
  if (spec.noise.passive_qoh_std_frac) c.passive_qoh_std_frac = *spec.noise.passive_qoh_std_frac;
  if (spec.noise.passive_qoh_std_floor) c.passive_qoh_std_floor = *spec.noise.passive_qoh_std_floor;
  if (spec.noise.utz_obs_std_frac) c.utz_obs_std_frac = *spec.noise.utz_obs_std_frac;
  if (spec.noise.utz_obs_std_floor) c.utz_obs_std_floor = *spec.noise.utz_obs_std_floor;
  if (spec.noise.erd_obs_std) c.erd_obs_std = *spec.noise.erd_obs_std;
  return c;
}

}  // namespace shortsim
