#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "shortsim/scenario.hpp"
#include "shortsim/sim_engine.hpp"
#include "unit/fixtures.hpp"

using namespace shortsim;
using shortsim::testing::exact_config;
using shortsim::testing::single_drug_world;

namespace {

WeeklyOutcome step_one(World& w, ActionKind a, const SimConfig& c, std::uint64_t seed = 1) {
  Rng env(seed), obs(seed + 1);
  return advance_week(w, {{w.drugs.front().id, a}}, c, env, obs);
}

}  // namespace

TEST(Transition, MonitorConsumesOneWeek) {
  World w = single_drug_world(10.0, 4.0);
  const auto out = step_one(w, ActionKind::Monitor, exact_config());
  EXPECT_DOUBLE_EQ(w.drugs[0].qoh, 6.0);
  EXPECT_FALSE(w.drugs[0].stocked_out);
  EXPECT_TRUE(out.stockout_events.empty());
  EXPECT_EQ(w.week, 1);
}

TEST(Transition, ShortfallIsAStockout) {
  World w = single_drug_world(3.0, 4.0);
  const auto out = step_one(w, ActionKind::Monitor, exact_config());
  EXPECT_DOUBLE_EQ(w.drugs[0].qoh, 0.0);
  EXPECT_TRUE(w.drugs[0].stocked_out);
  ASSERT_EQ(out.stockout_events.size(), 1u);
  EXPECT_GT(w.drugs[0].reputation, 0.0);
  EXPECT_DOUBLE_EQ(w.drugs[0].reputation, 1.0 - exact_config().reputation_decay);
}

TEST(Transition, DeliveryLandsBeforeConsumption) {
  World w = single_drug_world(0.0, 4.0);
  w.suppliers[0].pending_orders.push_back({"D1", 40.0, 0, 0, 0, false, false});
  step_one(w, ActionKind::Monitor, exact_config());
  EXPECT_DOUBLE_EQ(w.drugs[0].qoh, 36.0);
}

TEST(Transition, GrayMarketIsImmediateEmergencyBuyLags) {
  const SimConfig c = exact_config();
  World g = single_drug_world(2.0, 4.0);
  step_one(g, ActionKind::GrayMarketBuy, c);
  EXPECT_DOUBLE_EQ(g.drugs[0].qoh, 2.0 + c.gray_market_weeks * 4.0 - 4.0);

  World e = single_drug_world(2.0, 4.0);
  step_one(e, ActionKind::EmergencyBuy, c);
  EXPECT_DOUBLE_EQ(e.drugs[0].qoh, 0.0);
  step_one(e, ActionKind::Monitor, c, 5);
  EXPECT_DOUBLE_EQ(e.drugs[0].qoh, c.emergency_buy_weeks * 4.0 - 4.0);
}

TEST(Transition, HardLmaScalesUse) {
  const SimConfig c = exact_config();
  World w = single_drug_world(100.0, 10.0);
  step_one(w, ActionKind::ApplyHardLMA, c);
  EXPECT_DOUBLE_EQ(w.drugs[0].utz, 10.0 * (1.0 - c.hard_lma_effect));
  EXPECT_DOUBLE_EQ(w.drugs[0].qoh, 100.0 - 6.0);
  step_one(w, ActionKind::LiftLMA, c, 3);
  EXPECT_DOUBLE_EQ(w.drugs[0].utz, 10.0);
}

TEST(Transition, SwitchTakesEffectAfterDelay) {
  SimConfig c = exact_config();
  c.switch_delay_weeks = 2;
  World w = single_drug_world(100.0, 1.0);
  step_one(w, ActionKind::SwitchToAlternate, c);
  EXPECT_EQ(w.drugs[0].active_supplier, "P");
  step_one(w, ActionKind::Monitor, c, 2);
  EXPECT_EQ(w.drugs[0].active_supplier, "P");
  step_one(w, ActionKind::Monitor, c, 3);
  EXPECT_EQ(w.drugs[0].active_supplier, "A");
}

TEST(Transition, RejectsBadJointActions) {
  World w = single_drug_world(10.0, 1.0);
  Rng env(1), obs(2);
  EXPECT_THROW(advance_week(w, {}, exact_config(), env, obs), ContractError);
  EXPECT_THROW(advance_week(w, {{"D1", ActionKind::Monitor}, {"ghost", ActionKind::Monitor}}, exact_config(), env,
                            obs),
               ContractError);
}

TEST(Observation, AuditUsesTheAuditFloor) {
  const SimConfig c;
  DrugTrueState d;
  d.id = "D";
  d.qoh = 100.0;
  d.utz = 10.0;
  Rng rng(3);
  const auto o = emit_observation(d, std::nullopt, ActionKind::AuditInventory, c, rng);
  EXPECT_DOUBLE_EQ(o.obs_std_qoh, 1.0);
  EXPECT_FALSE(o.erd_obs.has_value());
}

TEST(Observation, PassiveStdIsTenPercentPlusTwo) {
  const SimConfig c;
  DrugTrueState d;
  d.id = "D";
  d.qoh = 100.0;
  d.utz = 10.0;
  Rng rng(3);
  const auto o = emit_observation(d, 4, ActionKind::Monitor, c, rng);
  EXPECT_DOUBLE_EQ(o.obs_std_qoh, 12.0);
  EXPECT_DOUBLE_EQ(o.obs_std_utz, 0.15 * 10.0 + 0.5);
  ASSERT_TRUE(o.erd_obs.has_value());
}

TEST(Observation, AuditSampleStdMatchesConfiguredSigma) {
  const SimConfig c;
  DrugTrueState d;
  d.id = "D";
  d.qoh = 100.0;
  d.utz = 10.0;
  Rng rng(11);
  const int n = 10000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = emit_observation(d, std::nullopt, ActionKind::AuditInventory, c, rng).qoh_obs;
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double sd = std::sqrt((s2 / n - mean * mean) * n / (n - 1));
  EXPECT_NEAR(sd, 1.0, 0.05);
}

TEST(Observation, ContactSharpensErd) {
  const SimConfig c;
  DrugTrueState d;
  d.id = "D";
  d.qoh = 10.0;
  d.utz = 1.0;
  Rng rng(1);
  const auto contact = emit_observation(d, 5, ActionKind::ContactManufacturer, c, rng);
  const auto query = emit_observation(d, 5, ActionKind::QuerySupplierERD, c, rng);
  const auto passive = emit_observation(d, 5, ActionKind::Monitor, c, rng);
  EXPECT_LT(contact.obs_std_erd, query.obs_std_erd);
  EXPECT_LT(query.obs_std_erd, passive.obs_std_erd);
}

TEST(Observation, PassiveNoisierThanAudit) {
  const SimConfig c;
  for (double q = 0.5; q < 1000.0; q *= 1.7) EXPECT_GT(passive_qoh_std(q, c), c.audit_qoh_std);
}

TEST(Scoring, BucketExamples) {
  const SimConfig c;
  DrugTrueState d;
  d.qoh = 90.0;
  d.utz = 10.0;
  EXPECT_DOUBLE_EQ(score_drug(d, c), 10.0);
  d.qoh = 40.0;
  EXPECT_DOUBLE_EQ(score_drug(d, c), 6.0);  // runway exactly 4 belongs to [4, 8)
  d.qoh = 0.0;
  d.stocked_out = true;
  EXPECT_DOUBLE_EQ(score_drug(d, c), -20.0 - 10000.0);
}

TEST(Scoring, WeekAddsActionCosts) {
  const SimConfig c;
  DrugTrueState a, b;
  a.id = "A";
  a.qoh = 90.0;
  a.utz = 10.0;
  b.id = "B";
  b.qoh = 15.0;
  b.utz = 10.0;
  const auto [reward, per] = score_week({a, b}, {{"A", ActionKind::Monitor}, {"B", ActionKind::GrayMarketBuy}}, c);
  EXPECT_DOUBLE_EQ(per.at("A"), 10.0);
  EXPECT_DOUBLE_EQ(per.at("B"), -5.0);
  EXPECT_DOUBLE_EQ(reward, 10.0 - 5.0 + c.action_cost(ActionKind::GrayMarketBuy));
}

TEST(EngineProperties, InventoryNeverNegative) {
  const ScenarioSpec spec = generate_scenario(3, 5);
  SimConfig c = effective_config(SimConfig{}, spec);
  Rng pick(99);
  for (int trial = 0; trial < 1000; ++trial) {
    World w = make_world(spec, c);
    Rng env(static_cast<std::uint64_t>(trial)), obs(static_cast<std::uint64_t>(trial) + 7);
    const int weeks = 1 + trial % 4;
    for (int t = 0; t < weeks; ++t) {
      JointAction a;
      for (const auto& d : w.drugs) a[d.id] = kAllActions[static_cast<std::size_t>(sample_int(pick, 0, 11))];
      advance_week(w, a, c, env, obs);
      for (const auto& d : w.drugs) ASSERT_GE(d.qoh, 0.0);
    }
  }
}

TEST(EngineProperties, InventoryIsConserved) {
  ScenarioSpec spec = generate_scenario(2, 3);
  spec.demand_variation = 0.0;
  for (auto& d : spec.drugs) d.qoh += 500.0;  // no stockouts
  const SimConfig c = effective_config(SimConfig{}, spec);
  World w = make_world(spec, c);
  std::vector<double> start;
  for (const auto& d : w.drugs) start.push_back(d.qoh);
  std::vector<double> delivered(w.drugs.size(), 0.0), consumed(w.drugs.size(), 0.0);
  Rng env(4), obs(5);
  for (int t = 0; t < spec.horizon_weeks; ++t) {
    JointAction a;
    for (const auto& d : w.drugs) a[d.id] = t == 1 ? ActionKind::GrayMarketBuy : ActionKind::Monitor;
    const auto out = advance_week(w, a, c, env, obs);
    EXPECT_TRUE(out.stockout_events.empty());
    for (const auto& del : out.deliveries) delivered[w.drug_index(del.drug)] += del.quantity;
    for (std::size_t i = 0; i < w.drugs.size(); ++i) consumed[i] += out.realized_consumption[i];
  }
  for (std::size_t i = 0; i < w.drugs.size(); ++i) {
    EXPECT_NEAR(start[i] + delivered[i] - consumed[i], w.drugs[i].qoh, 1e-9 * (1.0 + start[i])) << w.drugs[i].id;
  }
}

TEST(EngineProperties, SameSeedSameOutcomes) {
  const ScenarioSpec spec = generate_scenario(3, 2);
  const SimConfig c = effective_config(SimConfig{}, spec);
  auto play = [&] {
    World w = make_world(spec, c);
    Rng env(21), obs(22), pick(23);
    std::vector<double> trace;
    for (int t = 0; t < 20; ++t) {
      JointAction a;
      for (const auto& d : w.drugs) a[d.id] = kAllActions[static_cast<std::size_t>(sample_int(pick, 0, 11))];
      const auto out = advance_week(w, a, c, env, obs);
      trace.push_back(out.reward);
      for (const auto& o : out.observations) trace.push_back(o.qoh_obs);
      for (const auto& d : w.drugs) trace.push_back(d.qoh);
    }
    return trace;
  };
  EXPECT_EQ(play(), play());
}

TEST(EngineProperties, RewardEqualsScoresPlusCosts) {
  const ScenarioSpec spec = generate_scenario(2, 9);
  const SimConfig c = effective_config(SimConfig{}, spec);
  World w = make_world(spec, c);
  Rng env(1), obs(2), pick(3);
  for (int t = 0; t < spec.horizon_weeks; ++t) {
    JointAction a;
    for (const auto& d : w.drugs) a[d.id] = kAllActions[static_cast<std::size_t>(sample_int(pick, 0, 11))];
    const auto out = advance_week(w, a, c, env, obs);
    double expected = 0.0;
    for (const auto& [id, s] : out.per_drug_scores) expected += s + c.action_cost(a.at(id));
    EXPECT_DOUBLE_EQ(out.reward, expected);
    const auto [recomputed, per] = score_week(w.drugs, a, c);
    EXPECT_DOUBLE_EQ(recomputed, out.reward);
  }
}

TEST(EngineProperties, ActionChoiceDoesNotMoveOtherDrugsNoise) {
  // Per-drug keyed streams: drug B's week is identical whatever A does.
  const ScenarioSpec spec = generate_scenario(2, 4);
  const SimConfig c = effective_config(SimConfig{}, spec);
  auto b_qoh = [&](ActionKind a_action) {
    World w = make_world(spec, c);
    Rng env(8), obs(9);
    JointAction a;
    for (const auto& d : w.drugs) a[d.id] = ActionKind::Monitor;
    a[w.drugs[0].id] = a_action;
    advance_week(w, a, c, env, obs);
    return w.drugs[1].qoh;
  };
  EXPECT_EQ(b_qoh(ActionKind::Monitor), b_qoh(ActionKind::ApplyHardLMA));
  EXPECT_EQ(b_qoh(ActionKind::Monitor), b_qoh(ActionKind::ExpediteOrder));
}
