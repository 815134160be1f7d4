#include "sattrack/mcsm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sattrack/errors.hpp"

namespace sattrack {

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::Uninitialized: return "uninit";
    case Phase::Initialized: return "init";
    case Phase::Stabilizing: return "stabilizing";
    case Phase::Stable: return "stable";
    case Phase::ResetStable: return "reset_stable";
  }
  return "uninit";
}

Phase parse_phase(std::string_view name) {
  if (name == "uninit") return Phase::Uninitialized;
  if (name == "init") return Phase::Initialized;
  if (name == "stabilizing") return Phase::Stabilizing;
  if (name == "stable") return Phase::Stable;
  if (name == "reset_stable") return Phase::ResetStable;
  throw ConfigError("unknown phase name '" + std::string(name) + "'");
}

void McsmConfig::validate() const {
  if (!std::isfinite(tau_h) || !std::isfinite(tau_m) || !std::isfinite(tau_kf)) {
    throw ConfigError("state machine thresholds must be finite");
  }
  if (tau_m > tau_h) throw ConfigError("tau_m must not exceed tau_h");
  if (T_f < 1) throw ConfigError("T_f must be at least 1");
  if (T_m < 1) throw ConfigError("T_m must be at least 1");
}

StableBranch stable_decision(double s_sam, double s_kf, const McsmConfig& cfg, bool motion_enabled) {
  if (s_sam > cfg.tau_h) return StableBranch::HighConfidence;
  if (s_sam > cfg.tau_m) return StableBranch::MidConfidence;
  if (motion_enabled && s_kf > cfg.tau_kf) return StableBranch::MotionRescue;
  return StableBranch::Fail;
}

std::size_t argmax_affinity(std::span<const CandidateMask> candidates) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < candidates.size(); ++j) {
    if (candidates[j].s_sam > candidates[best].s_sam) best = j;
  }
  return best;
}

namespace {

std::vector<ScoredCandidate> to_scored(std::span<const CandidateMask> candidates) {
  std::vector<ScoredCandidate> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(c.scored());
  return out;
}

double candidate_motion(const CandidateMask& c, const StepContext& ctx) {
  return ctx.motion_enabled ? motion_score(ctx.predicted, ctx.s_ref, c.stats, ctx.motion) : 0.0;
}

StepOutcome select(const CandidateMask& c, std::size_t index, double s_kf, FilterAction action,
                   const TrackerPhase& next) {
  StepOutcome out;
  out.output_box = c.stats.tight_box;
  out.next = next;
  out.action = action;
  out.selected = index;
  out.s_sam = c.s_sam;
  out.s_kf = s_kf;
  return out;
}

StepOutcome hold(const BoundingBox& box, const TrackerPhase& next, double s_sam, double s_kf) {
  StepOutcome out;
  out.output_box = box;
  out.next = next;
  out.action = FilterAction::PredictOnly;
  out.s_sam = s_sam;
  out.s_kf = s_kf;
  return out;
}

}  // namespace

StepOutcome init_step(std::span<const CandidateMask> candidates) {
  if (candidates.empty()) throw NoCandidates("first frame produced no candidate masks");
  const std::size_t j = argmax_affinity(candidates);
  // Initialized is transient: the frame ends in Stabilizing with no credit.
  return select(candidates[j], j, 0.0, FilterAction::UpdateWith, {Phase::Stabilizing, 0, 0});
}

StepOutcome stabilizing_step(const TrackerPhase& phase, std::span<const CandidateMask> candidates,
                             const StepContext& ctx) {
  const McsmConfig& cfg = ctx.mcsm;
  TrackerPhase reset{Phase::Stabilizing, 0, 0};
  if (candidates.empty()) return hold(ctx.predicted, reset, 0.0, 0.0);

  std::size_t winner = 0;
  double s_kf = 0.0;
  if (ctx.motion_enabled) {
    const auto scored = to_scored(candidates);
    const auto sel = fused_select(scored, ctx.predicted, ctx.s_ref, ctx.motion);
    if (!sel) return hold(ctx.predicted, reset, 0.0, 0.0);
    winner = sel->index;
    s_kf = sel->s_kf;
  } else {
    winner = argmax_affinity(candidates);
  }

  const CandidateMask& c = candidates[winner];
  if (c.s_sam > cfg.tau_h) {
    TrackerPhase next{Phase::Stabilizing, std::min(phase.stability + 1, cfg.T_f), 0};
    if (next.stability >= cfg.T_f) next.phase = Phase::Stable;
    return select(c, winner, s_kf, FilterAction::UpdateWith, next);
  }
  return select(c, winner, s_kf, FilterAction::PredictOnly, reset);
}

StepOutcome stable_step(const TrackerPhase& phase, std::span<const CandidateMask> candidates,
                        const StepContext& ctx) {
  const McsmConfig& cfg = ctx.mcsm;

  auto fail = [&](double s_sam, double s_kf) {
    TrackerPhase next = phase;
    next.fail_count = std::min(phase.fail_count + 1, cfg.T_m);
    if (next.fail_count >= cfg.T_m && ctx.reset_stable_enabled) next = {Phase::ResetStable, 0, 0};
    return hold(ctx.predicted, next, s_sam, s_kf);
  };

  if (candidates.empty()) return fail(0.0, 0.0);

  const std::size_t j_sam = argmax_affinity(candidates);
  const double s_sam = candidates[j_sam].s_sam;
  std::vector<double> s_kf_all(candidates.size(), 0.0);
  double s_kf = 0.0;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    s_kf_all[j] = candidate_motion(candidates[j], ctx);
    s_kf = std::max(s_kf, s_kf_all[j]);
  }

  TrackerPhase ok = phase;
  ok.fail_count = 0;
  switch (stable_decision(s_sam, s_kf, cfg, ctx.motion_enabled)) {
    case StableBranch::HighConfidence:
      return select(candidates[j_sam], j_sam, s_kf_all[j_sam], FilterAction::UpdateWith, ok);
    case StableBranch::MidConfidence:
      return select(candidates[j_sam], j_sam, s_kf_all[j_sam], FilterAction::PredictOnly, ok);
    case StableBranch::MotionRescue: {
      std::size_t best = 0;
      double best_iou = -1.0;
      for (std::size_t j = 0; j < candidates.size(); ++j) {
        const double v = iou(candidates[j].stats.tight_box, ctx.predicted);
        if (v > best_iou) {
          best_iou = v;
          best = j;
        }
      }
      return select(candidates[best], best, s_kf_all[best], FilterAction::UpdateWith, ok);
    }
    case StableBranch::Fail:
      break;
  }
  return fail(s_sam, s_kf);
}

StepOutcome reset_stable_step(const TrackerPhase& phase, std::span<const CandidateMask> candidates,
                              const StepContext& ctx) {
  const McsmConfig& cfg = ctx.mcsm;
  if (candidates.empty()) return hold(ctx.predicted, phase, 0.0, 0.0);

  const std::size_t j = argmax_affinity(candidates);
  const CandidateMask& c = candidates[j];
  const double s_kf = candidate_motion(c, ctx);
  bool recovered = c.s_sam > cfg.tau_h;
  if (recovered && cfg.recovery_gate && ctx.motion_enabled) {
    recovered = distance_gate(ctx.predicted, c.stats, ctx.motion) == 1;
  }
  if (!recovered) return hold(ctx.predicted, phase, c.s_sam, s_kf);

  TrackerPhase next{Phase::Stabilizing, std::min(1, cfg.T_f), 0};
  return select(c, j, s_kf, FilterAction::UpdateWith, next);
}

StepOutcome fused_only_step(const TrackerPhase& phase, std::span<const CandidateMask> candidates,
                            const StepContext& ctx) {
  if (candidates.empty()) return hold(ctx.predicted, phase, 0.0, 0.0);
  const auto scored = to_scored(candidates);
  const auto sel = fused_select(scored, ctx.predicted, ctx.s_ref, ctx.motion);
  if (!sel) return hold(ctx.predicted, phase, 0.0, 0.0);
  return select(candidates[sel->index], sel->index, sel->s_kf, FilterAction::UpdateWith, phase);
}

}  // namespace sattrack
