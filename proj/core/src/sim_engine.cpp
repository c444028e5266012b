#include "shortsim/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

namespace shortsim {

SupplierState& World::supplier(const SupplierId& id) {
  for (auto& s : suppliers) {
    if (s.id == id) return s;
  }
  throw ContractError("unknown supplier: " + id);
}

const SupplierState& World::supplier(const SupplierId& id) const {
  for (const auto& s : suppliers) {
    if (s.id == id) return s;
  }
  throw ContractError("unknown supplier: " + id);
}

std::size_t World::drug_index(const DrugId& id) const {
  for (std::size_t i = 0; i < drugs.size(); ++i) {
    if (drugs[i].id == id) return i;
  }
  throw ContractError("unknown drug: " + id);
}

const PendingOrder* World::earliest_order(const DrugTrueState& drug) const {
  const PendingOrder* best = nullptr;
  for (const auto& s : suppliers) {
    if (s.id != drug.primary_supplier && s.id != drug.alternate_supplier) continue;
    for (const auto& o : s.pending_orders) {
      if (o.drug != drug.id || o.emergency) continue;
      if (best == nullptr || o.erd_week < best->erd_week) best = &o;
      break;  // lists are sorted by erd_week
    }
  }
  return best;
}

std::vector<PendingOrder> World::orders_for(const DrugTrueState& drug) const {
  std::vector<PendingOrder> out;
  for (const auto& s : suppliers) {
    if (s.id != drug.primary_supplier && s.id != drug.alternate_supplier) continue;
    for (const auto& o : s.pending_orders) {
      if (o.drug == drug.id) out.push_back(o);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PendingOrder& a, const PendingOrder& b) { return a.erd_week < b.erd_week; });
  return out;
}

double lma_effect_fraction(LmaStatus lma, const SimConfig& config) noexcept {
  switch (lma) {
    case LmaStatus::None: return 0.0;
    case LmaStatus::Soft: return config.soft_lma_effect;
    case LmaStatus::Hard: return config.hard_lma_effect;
  }
  return 0.0;
}

double passive_qoh_std(double qoh, const SimConfig& config) noexcept {
  return config.passive_qoh_std_frac * std::max(qoh, 0.0) + config.passive_qoh_std_floor;
}

double bucket_score(double runway, const SimConfig& config) noexcept {
  for (const auto& b : config.reward_buckets) {
    if (runway >= b.lower_bound) return b.score;
  }
  return config.reward_buckets.back().score;
}

double score_drug(const DrugTrueState& drug, const SimConfig& config) {
  const double runway = compute_runway(drug.qoh, drug.utz, config.runway_cap);
  double score = bucket_score(runway, config);
  if (drug.stocked_out || (runway < 1.0 && drug.qoh == 0.0)) score += config.stockout_penalty;
  if (drug.lma == LmaStatus::Soft) score += config.soft_lma_weekly_cost;
  if (drug.lma == LmaStatus::Hard) score += config.hard_lma_weekly_cost;
  return score;
}

std::pair<double, std::map<DrugId, double>> score_week(const std::vector<DrugTrueState>& drugs,
                                                       const JointAction& joint_action,
                                                       const SimConfig& config) {
  std::map<DrugId, double> per_drug;
  double reward = 0.0;
  for (const auto& d : drugs) {
    const double s = score_drug(d, config);
    per_drug[d.id] = s;
    reward += s;
  }
  for (const auto& d : drugs) {
    auto it = joint_action.find(d.id);
    if (it == joint_action.end()) throw ContractError("score_week: missing action for drug " + d.id);
    reward += config.action_cost(it->second);
  }
  return {reward, std::move(per_drug)};
}

namespace {

// Child stream seeded on first use; mt19937_64 seeding is not free and most
// drug-weeks never touch most streams.
class KeyedStream {
 public:
  explicit KeyedStream(std::uint64_t seed) : seed_(seed) {}
  Rng& get() {
    if (!rng_) rng_.emplace(seed_);
    return *rng_;
  }

 private:
  std::uint64_t seed_;
  std::optional<Rng> rng_;
};

void sort_orders(SupplierState& s) {
  std::stable_sort(s.pending_orders.begin(), s.pending_orders.end(),
                   [](const PendingOrder& a, const PendingOrder& b) { return a.erd_week < b.erd_week; });
}

void set_lma(DrugTrueState& d, LmaStatus target, const SimConfig& config, KeyedStream& rng) {
  if (d.lma == target) return;
  d.lma = target;
  if (target == LmaStatus::None) {
    d.utz = d.base_utz;
    return;
  }
  const double compliance = std::max(0.0, sample_normal(rng.get(), 1.0, config.lma_compliance_std));
  d.utz = std::min(d.base_utz, d.base_utz * (1.0 - lma_effect_fraction(target, config)) * compliance);
}

void request_switch(DrugTrueState& d, const SupplierId& target, Week now, const SimConfig& config) {
  if (d.active_supplier == target && !d.switch_target) return;
  if (d.switch_target && *d.switch_target == target) return;
  if (d.active_supplier == target) {
    d.switch_target.reset();  // cancels a pending switch away
    return;
  }
  d.switch_target = target;
  d.switch_effective_week = now + config.switch_delay_weeks;
}

void expedite(World& world, DrugTrueState& d, Week now, const SimConfig& config, KeyedStream& rng) {
  SupplierState* owner = nullptr;
  PendingOrder* target = nullptr;
  for (auto& s : world.suppliers) {
    if (s.id != d.primary_supplier && s.id != d.alternate_supplier) continue;
    for (auto& o : s.pending_orders) {
      if (o.drug != d.id || o.emergency || o.erd_week <= now) continue;
      if (target == nullptr || o.erd_week < target->erd_week) {
        target = &o;
        owner = &s;
      }
      break;
    }
  }
  if (target == nullptr) return;
  if (happens(rng.get(), config.expedite_success_prob)) {
    target->erd_week -= 1;
    target->expedited = true;
    sort_orders(*owner);
  }
}

void apply_action(World& world, DrugTrueState& d, ActionKind action, const SimConfig& config, KeyedStream& rng,
                  WeeklyOutcome& out) {
  const Week now = world.week;
  switch (action) {
    case ActionKind::Monitor:
    case ActionKind::AuditInventory:
    case ActionKind::ContactManufacturer:
    case ActionKind::QuerySupplierERD:
      break;
    case ActionKind::ApplySoftLMA:
      set_lma(d, LmaStatus::Soft, config, rng);
      break;
    case ActionKind::ApplyHardLMA:
      set_lma(d, LmaStatus::Hard, config, rng);
      break;
    case ActionKind::LiftLMA:
      set_lma(d, LmaStatus::None, config, rng);
      break;
    case ActionKind::SwitchToAlternate:
      request_switch(d, d.alternate_supplier, now, config);
      break;
    case ActionKind::SwitchToPrimary:
      request_switch(d, d.primary_supplier, now, config);
      break;
    case ActionKind::ExpediteOrder:
      expedite(world, d, now, config, rng);
      break;
    case ActionKind::EmergencyBuy: {
      const double qty = config.emergency_buy_weeks * d.utz;
      if (qty > 0.0) {
        SupplierState& s = world.supplier(d.active_supplier);
        const Week erd = now + config.emergency_latency_weeks;
        s.pending_orders.push_back({d.id, qty, erd, now, erd, false, true});
        sort_orders(s);
      }
      break;
    }
    case ActionKind::GrayMarketBuy: {
      const double qty = config.gray_market_weeks * d.utz;
      if (qty > 0.0) {
        d.qoh += qty;
        out.deliveries.push_back({d.id, qty, true});
      }
      break;
    }
  }
}

// Delivers or requeues every order of `d` that is due this week.
double receive_orders(World& world, DrugTrueState& d, const SimConfig& config, KeyedStream& rng,
                      WeeklyOutcome& out) {
  const Week now = world.week;
  double received = 0.0;
  for (auto& s : world.suppliers) {
    if (s.id != d.primary_supplier && s.id != d.alternate_supplier) continue;
    bool requeued = false;
    for (auto it = s.pending_orders.begin(); it != s.pending_orders.end();) {
      if (it->erd_week > now) break;
      if (it->drug != d.id) {
        ++it;
        continue;
      }
      const bool arrives = it->emergency || (!s.disrupted && happens(rng.get(), s.reliability));
      if (arrives) {
        received += it->quantity;
        out.deliveries.push_back({d.id, it->quantity, it->emergency});
        it = s.pending_orders.erase(it);
      } else {
        it->erd_week = now + sample_int(rng.get(), config.requeue_min_weeks, config.requeue_max_weeks);
        out.delivery_failures.push_back(d.id);
        requeued = true;
        ++it;
      }
    }
    if (requeued) sort_orders(s);
  }
  return received;
}

}  // namespace

WeeklyOutcome transition(World& world, std::span<const ActionKind> actions, const SimConfig& config,
                         Rng& env_rng) {
  if (actions.size() != world.drugs.size()) {
    throw ContractError("transition: expected one action per drug");
  }
  const Week now = world.week;
  WeeklyOutcome out;
  out.week = now;
  out.realized_consumption.assign(world.drugs.size(), 0.0);

  // One draw per week; every random effect gets its own keyed child stream, so
  // exogenous events do not shift when a different action consumes randomness.
  const std::uint64_t week_key = env_rng();

  for (const auto& w : world.disruptions) {
    if (w.start_week != now) continue;
    SupplierState& s = world.supplier(w.supplier);
    s.disrupted = true;
    s.recovery_hazard = w.recovery_hazard;
    world.disruption_min_end[w.supplier] = now + w.duration_weeks;
  }

  for (std::size_t i = 0; i < world.drugs.size(); ++i) {
    DrugTrueState& d = world.drugs[i];
    if (d.switch_target && now >= d.switch_effective_week) {
      d.active_supplier = *d.switch_target;
      d.switch_target.reset();
    }

    const std::uint64_t drug_key = derive_seed(week_key, hash_label(d.id));
    KeyedStream action_rng(derive_seed(drug_key, "action"));
    KeyedStream delivery_rng(derive_seed(drug_key, "delivery"));

    apply_action(world, d, actions[i], config, action_rng, out);

    if (d.routine_order_qty > 0.0) {
      SupplierState& s = world.supplier(d.active_supplier);
      const Week erd = now + s.lead_time_weeks;
      s.pending_orders.push_back({d.id, d.routine_order_qty, erd, now, erd, false, false});
      sort_orders(s);
    }

    d.qoh += receive_orders(world, d, config, delivery_rng, out);

    double multiplier = 1.0;
    if (config.demand_variation > 0.0) {
      Rng demand_rng(derive_seed(drug_key, "demand"));
      multiplier = std::max(0.0, sample_normal(demand_rng, 1.0, config.demand_variation));
    }
    const double realized = d.utz * multiplier;
    out.realized_consumption[i] = std::min(realized, d.qoh);
    d.qoh = std::max(0.0, d.qoh - realized);

    d.stocked_out = (d.qoh == 0.0);
    if (d.stocked_out) out.stockout_events.push_back(d.id);

    const bool disrupted = world.supplier(d.active_supplier).disrupted;
    if (disrupted) out.disruption_events.push_back(d.id);
    const double event = (d.stocked_out || disrupted) ? 1.0 : 0.0;
    d.reputation = config.reputation_decay * d.reputation + (1.0 - config.reputation_decay) * event;

    if (d.utz_drift != 0.0) {
      d.base_utz = std::max(0.0, d.base_utz * (1.0 + d.utz_drift));
      d.utz = std::max(0.0, d.utz * (1.0 + d.utz_drift));
    }
  }

  for (auto& s : world.suppliers) {
    if (!s.disrupted) continue;
    auto it = world.disruption_min_end.find(s.id);
    const Week min_end = it == world.disruption_min_end.end() ? 0 : it->second;
    Rng recovery_rng(derive_seed(week_key, hash_label("recovery"), hash_label(s.id)));
    if (now + 1 >= min_end && happens(recovery_rng, s.recovery_hazard)) s.disrupted = false;
  }

  double reward = 0.0;
  for (std::size_t i = 0; i < world.drugs.size(); ++i) {
    const double s = score_drug(world.drugs[i], config);
    out.per_drug_scores[world.drugs[i].id] = s;
    reward += s + config.action_cost(actions[i]);
  }
  out.reward = reward;
  world.week = now + 1;
  return out;
}

Observation emit_observation(const DrugTrueState& drug, std::optional<Week> earliest_erd,
                             ActionKind action, const SimConfig& config, Rng& obs_rng) {
  Observation o;
  o.drug = drug.id;
  o.source = action;
  o.obs_std_qoh = action == ActionKind::AuditInventory ? config.audit_qoh_std
                                                       : passive_qoh_std(drug.qoh, config);
  o.obs_std_utz = config.utz_obs_std_frac * drug.utz + config.utz_obs_std_floor;
  o.qoh_obs = std::max(0.0, sample_normal(obs_rng, drug.qoh, o.obs_std_qoh));
  o.utz_obs = std::max(0.0, sample_normal(obs_rng, drug.utz, o.obs_std_utz));
  if (earliest_erd) {
    switch (action) {
      case ActionKind::ContactManufacturer: o.obs_std_erd = config.erd_obs_std_contact; break;
      case ActionKind::QuerySupplierERD: o.obs_std_erd = config.erd_obs_std_query; break;
      default: o.obs_std_erd = config.erd_obs_std; break;
    }
    o.erd_obs = std::max(0.0, sample_normal(obs_rng, static_cast<double>(*earliest_erd), o.obs_std_erd));
  }
  return o;
}

WeeklyOutcome advance_week(World& world, const JointAction& joint_action, const SimConfig& config,
                           Rng& env_rng, Rng& obs_rng) {
  std::vector<ActionKind> actions(world.drugs.size(), ActionKind::Monitor);
  std::set<DrugId> known;
  for (std::size_t i = 0; i < world.drugs.size(); ++i) {
    known.insert(world.drugs[i].id);
    auto it = joint_action.find(world.drugs[i].id);
    if (it == joint_action.end()) {
      throw ContractError("advance_week: missing action for drug " + world.drugs[i].id);
    }
    actions[i] = it->second;
  }
  for (const auto& [id, _] : joint_action) {
    if (!known.contains(id)) throw ContractError("advance_week: unknown drug " + id);
  }

  WeeklyOutcome out = transition(world, actions, config, env_rng);
  const std::uint64_t obs_key = obs_rng();
  out.observations.reserve(world.drugs.size());
  for (std::size_t i = 0; i < world.drugs.size(); ++i) {
    const DrugTrueState& d = world.drugs[i];
    const PendingOrder* next = world.earliest_order(d);
    std::optional<Week> erd;
    if (next != nullptr) erd = next->erd_week;
    Rng drug_obs_rng(derive_seed(obs_key, hash_label(d.id)));
    out.observations.push_back(emit_observation(d, erd, actions[i], config, drug_obs_rng));
  }
  return out;
}

}  // namespace shortsim
