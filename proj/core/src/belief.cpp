#include "shortsim/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shortsim {

Gaussian conjugate_update(Gaussian prior, double obs, double obs_std) {
  if (!(obs_std > 0.0)) throw ContractError("conjugate_update: observation std must be > 0");
  if (prior.std <= 0.0 || std::isinf(obs_std)) return prior;
  const double prior_prec = 1.0 / (prior.std * prior.std);
  const double obs_prec = 1.0 / (obs_std * obs_std);
  const double post_prec = prior_prec + obs_prec;
  Gaussian post;
  post.mean = (prior_prec * prior.mean + obs_prec * obs) / post_prec;
  post.std = std::min(prior.std, 1.0 / std::sqrt(post_prec));
  return post;
}

DrugBelief predict(const DrugBelief& belief, const SimConfig& config, double inflow) {
  DrugBelief next = belief;
  next.qoh_std = std::min(config.qoh_std_cap, belief.qoh_std + config.qoh_diffusion);
  next.utz_std = std::min(config.utz_std_cap, belief.utz_std + config.utz_diffusion);
  // Caps never shrink a std that was already above them.
  next.qoh_std = std::max(next.qoh_std, belief.qoh_std);
  next.utz_std = std::max(next.utz_std, belief.utz_std);
  if (next.erd_mean) {
    next.erd_std = std::max(belief.erd_std, std::min(config.erd_std_cap, belief.erd_std + config.erd_diffusion));
  }
  next.qoh_mean = std::max(0.0, belief.qoh_mean + inflow - belief.utz_mean);
  return next;
}

DrugBelief update(const DrugBelief& belief, const Observation& obs, Week week) {
  if (obs.drug != belief.id) throw ContractError("update: observation is for drug " + obs.drug);
  if (!(obs.obs_std_qoh > 0.0) || !(obs.obs_std_utz > 0.0)) {
    throw ContractError("update: observation stds must be > 0");
  }
  DrugBelief next = belief;
  const Gaussian q = conjugate_update({belief.qoh_mean, belief.qoh_std}, obs.qoh_obs, obs.obs_std_qoh);
  const Gaussian u = conjugate_update({belief.utz_mean, belief.utz_std}, obs.utz_obs, obs.obs_std_utz);
  next.qoh_mean = q.mean;
  next.qoh_std = q.std;
  next.utz_mean = u.mean;
  next.utz_std = u.std;
  if (obs.erd_obs) {
    if (!(obs.obs_std_erd > 0.0)) throw ContractError("update: erd observation std must be > 0");
    if (belief.erd_mean) {
      const Gaussian e = conjugate_update({*belief.erd_mean, belief.erd_std}, *obs.erd_obs, obs.obs_std_erd);
      next.erd_mean = e.mean;
      next.erd_std = e.std;
    } else {
      next.erd_mean = *obs.erd_obs;
      next.erd_std = obs.obs_std_erd;
    }
  } else {
    next.erd_mean.reset();
  }
  if (obs.source == ActionKind::AuditInventory) next.last_audit_week = week;
  return next;
}

DrugBelief apply_action_effect(const DrugBelief& belief, ActionKind action, const SimConfig& config) {
  LmaStatus target = belief.lma_known;
  if (action == ActionKind::ApplySoftLMA) target = LmaStatus::Soft;
  if (action == ActionKind::ApplyHardLMA) target = LmaStatus::Hard;
  if (action == ActionKind::LiftLMA) target = LmaStatus::None;
  if (target == belief.lma_known) return belief;

  DrugBelief next = belief;
  const double keep_old = 1.0 - lma_effect_fraction(belief.lma_known, config);
  const double keep_new = 1.0 - lma_effect_fraction(target, config);
  const double scale = keep_old > 0.0 ? keep_new / keep_old : 1.0;
  next.utz_mean = belief.utz_mean * scale;
  const double compliance = target == LmaStatus::None ? 0.0 : config.lma_compliance_std * next.utz_mean;
  next.utz_std = std::min(config.utz_std_cap, std::hypot(belief.utz_std * scale, compliance));
  next.utz_std = std::max(next.utz_std, std::numeric_limits<double>::min());
  next.lma_known = target;
  return next;
}

RunwayBelief belief_runway(const DrugBelief& belief, const SimConfig& config) {
  RunwayBelief r;
  const double qoh = std::max(belief.qoh_mean, 0.0);
  const double utz = std::max(belief.utz_mean, 0.0);
  r.mean = compute_runway(qoh, utz, config.runway_cap);
  const double q = std::max(qoh, kRunwayEpsilon);
  const double u = std::max(utz, kRunwayEpsilon);
  const double ratio = q / u;
  const double cv_q = belief.qoh_std / q;
  const double cv_u = belief.utz_std / u;
  r.std = std::min(config.runway_cap, ratio * std::sqrt(cv_q * cv_q + cv_u * cv_u));
  return r;
}

DrugBelief record_events(const DrugBelief& belief, const DrugEvents& events, const SimConfig& config) {
  DrugBelief next = belief;
  const int due = events.deliveries_on_time + events.delivery_failures;
  if (due > 0) {
    const double rate = static_cast<double>(events.deliveries_on_time) / due;
    next.reliability_est =
        (1.0 - config.reliability_smoothing) * belief.reliability_est + config.reliability_smoothing * rate;
  }
  const double event = (events.stockout || events.supplier_disrupted) ? 1.0 : 0.0;
  next.reputation = config.reputation_decay * belief.reputation + (1.0 - config.reputation_decay) * event;
  next.lma_known = events.lma;
  next.supplier_disrupted = events.supplier_disrupted;
  return next;
}

DrugBelief initial_belief(const DrugTrueState& drug, const Observation& obs, double reliability_prior,
                          const SimConfig& config) {
  DrugBelief b;
  b.id = drug.id;
  b.qoh_mean = obs.qoh_obs;
  b.qoh_std = std::min(obs.obs_std_qoh, config.qoh_std_cap);
  b.utz_mean = obs.utz_obs;
  b.utz_std = std::min(obs.obs_std_utz, config.utz_std_cap);
  if (obs.erd_obs) {
    b.erd_mean = *obs.erd_obs;
    b.erd_std = std::min(obs.obs_std_erd, config.erd_std_cap);
  }
  b.last_audit_week = 0;
  b.reliability_est = reliability_prior;
  b.lma_known = drug.lma;
  b.reputation = drug.reputation;
  b.clinical_impact = drug.clinical_impact;
  return b;
}

}  // namespace shortsim
