#include "shortsim/attention.hpp"

#include <algorithm>
#include <cmath>

namespace shortsim {

std::string_view to_string(Feature f) noexcept {
  switch (f) {
    case Feature::Uncertainty: return "uncertainty";
    case Feature::Utilization: return "utilization";
    case Feature::Clinical: return "clinical";
    case Feature::Reputation: return "reputation";
  }
  return "?";
}

void AttentionWeights::validate() const {
  for (Feature f : kAllFeatures) {
    const double b = weight(f);
    if (!(b >= 0.0 && b <= beta_max)) {
      throw ValidationError("attention.beta." + std::string(to_string(f)), "must be in [0, beta_max]");
    }
  }
  if (!(tau > 0.0 && tau <= 1.5)) throw ValidationError("attention.tau", "must be in (0, 1.5]");
  if (k < 1) throw ValidationError("attention.k", "must be >= 1");
  if (cap && *cap < 1) throw ValidationError("attention.cap", "must be >= 1 when set");
  if (!(beta_max > 0.0)) throw ValidationError("attention.beta_max", "must be > 0");
}

ScenarioStats scenario_stats(std::span<const DrugBelief> beliefs) {
  ScenarioStats s;
  if (beliefs.empty()) return s;
  double sum = 0.0;
  for (const auto& b : beliefs) sum += b.utz_mean;
  s.mean_utz = sum / static_cast<double>(beliefs.size());
  for (const auto& b : beliefs) {
    s.max_utz_deviation = std::max(s.max_utz_deviation, std::abs(b.utz_mean - s.mean_utz));
    s.max_utz_std = std::max(s.max_utz_std, b.utz_std);
  }
  return s;
}

UrgencyComponents component_vector(const DrugBelief& belief, const ScenarioStats& stats,
                                   const SimConfig& sim, const AttentionParams& params) {
  const RunwayBelief runway = belief_runway(belief, sim);
  UrgencyComponents c;
  c.u_runway = std::clamp(1.0 - runway.mean / params.runway_horizon, 0.0, 1.0);
  c.u_uncertainty = std::clamp(
      0.5 * runway.std / params.runway_std_scale + 0.5 * belief.qoh_std / sim.qoh_std_cap, 0.0, 1.0);
  const double deviation =
      stats.max_utz_deviation > 0.0 ? std::abs(belief.utz_mean - stats.mean_utz) / stats.max_utz_deviation : 0.0;
  const double spread = stats.max_utz_std > 0.0 ? belief.utz_std / stats.max_utz_std : 0.0;
  c.u_utilization = std::clamp(0.5 * deviation + 0.5 * spread, 0.0, 1.0);
  c.u_clinical = std::clamp(belief.clinical_impact, 0.0, 1.0);
  c.u_reputation = std::clamp(belief.reputation, 0.0, 1.0);
  return c;
}

double urgency_score(const UrgencyComponents& c, const AttentionWeights& w) {
  const FeatureVector x = c.weighted_features();
  double u = c.u_runway;
  for (std::size_t f = 0; f < kFeatureCount; ++f) u += w.beta[f] * x[f];
  return u;
}

std::vector<DrugId> select_focus(std::span<const UrgencyEntry> urgencies, const AttentionWeights& w) {
  std::vector<const UrgencyEntry*> order;
  order.reserve(urgencies.size());
  for (const auto& e : urgencies) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const UrgencyEntry* a, const UrgencyEntry* b) {
    if (a->urgency != b->urgency) return a->urgency > b->urgency;
    if (a->runway_mean != b->runway_mean) return a->runway_mean < b->runway_mean;
    return a->drug < b->drug;
  });

  // Sorted by urgency, so both the threshold set and the top-k set are prefixes.
  std::size_t above = 0;
  while (above < order.size() && order[above]->urgency >= w.tau) ++above;
  std::size_t size = std::max(above, std::min(w.k, order.size()));
  if (w.cap) size = std::min(size, *w.cap);

  std::vector<DrugId> focus;
  focus.reserve(size);
  for (std::size_t i = 0; i < size; ++i) focus.push_back(order[i]->drug);
  return focus;
}

std::vector<UrgencyEntry> UrgencyTable::entries(std::span<const DrugBelief> beliefs) const {
  std::vector<UrgencyEntry> out;
  out.reserve(beliefs.size());
  for (std::size_t i = 0; i < beliefs.size(); ++i) out.push_back({beliefs[i].id, scores[i], runway_means[i]});
  return out;
}

std::vector<FeatureVector> UrgencyTable::activations() const {
  std::vector<FeatureVector> rows;
  rows.reserve(components.size());
  for (const auto& c : components) rows.push_back(c.weighted_features());
  return rows;
}

UrgencyTable evaluate_urgency(std::span<const DrugBelief> beliefs, const AttentionWeights& w,
                              const SimConfig& sim, const AttentionParams& params) {
  const ScenarioStats stats = scenario_stats(beliefs);
  UrgencyTable t;
  t.components.reserve(beliefs.size());
  for (const auto& b : beliefs) {
    t.components.push_back(component_vector(b, stats, sim, params));
    t.scores.push_back(urgency_score(t.components.back(), w));
    t.runway_means.push_back(belief_runway(b, sim).mean);
  }
  return t;
}

}  // namespace shortsim
