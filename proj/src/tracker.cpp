#include "sattrack/tracker.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sattrack/errors.hpp"

namespace sattrack {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::NoKfcmm: return "no_kfcmm";
    case Variant::NoMcsm: return "no_mcsm";
    case Variant::NoRs: return "no_rs";
  }
  return "full";
}

Variant parse_variant(std::string_view name) {
  if (name == "full") return Variant::Full;
  if (name == "no_kfcmm") return Variant::NoKfcmm;
  if (name == "no_mcsm") return Variant::NoMcsm;
  if (name == "no_rs") return Variant::NoRs;
  throw UnknownVariant("'" + std::string(name) + "' (expected full, no_kfcmm, no_mcsm or no_rs)");
}

void TrackerConfig::validate() const {
  mcsm.validate();
  MotionConfig m = motion;
  m.d_max = d_max.value_or(1.0);
  m.validate();
  if (memory_capacity == 0) throw ConfigError("memory capacity must be at least 1");
  if (!std::isfinite(gate.tau_mask) || !std::isfinite(gate.tau_obj) || !std::isfinite(gate.tau_kf)) {
    throw ConfigError("memory thresholds must be finite");
  }
  KalmanModel::make(dt, noise);
}

Tracker::Tracker(TrackerConfig config, const BoundingBox& prompt)
    : config_(std::move(config)),
      prompt_(prompt),
      model_(KalmanModel::make(config_.dt, config_.noise)),
      motion_(config_.motion),
      memory_(config_.memory_capacity) {
  config_.validate();
  if (!prompt_.valid()) throw InvalidPrompt("prompt box must have positive width and height");
}

bool Tracker::gate_frame(std::int64_t frame, const CandidateMask& c, double s_kf) {
  GateThresholds th = config_.gate;
  // Without a motion model there is no motion score to gate on.
  if (config_.variant == Variant::NoKfcmm) th.tau_kf = -std::numeric_limits<double>::infinity();
  const FrameScores scores{c.s_sam, c.s_obj, s_kf};
  if (!admit(scores, th)) return false;
  memory_ = memory_.push(frame, scores);
  return true;
}

FrameResult Tracker::initialize(const ObserverFrame& frame) {
  const StepOutcome out = init_step(frame.candidates);
  const CandidateMask& chosen = frame.candidates[*out.selected];

  filter_ = init_filter(prompt_, chosen.stats.area, model_);
  filter_ = update(*filter_, out.output_box, model_);
  ++updates_;
  motion_.d_max = config_.d_max.value_or(std::sqrt(filter_->s_ref));
  motion_.tau_kf = config_.mcsm.tau_kf;
  motion_.validate();

  // The prompt frame always enters memory.
  memory_ = memory_.push(0, {chosen.s_sam, chosen.s_obj, 0.0});
  last_admit_ = true;
  last_observed_ = out.output_box;
  phase_ = config_.variant == Variant::NoMcsm ? TrackerPhase{Phase::Initialized, 0, 0} : out.next;
  next_frame_ = 1;
  return {0, out.output_box, phase_.phase, out.s_sam, out.s_kf, true, static_cast<int>(*out.selected)};
}

FrameResult Tracker::process(const ObserverFrame& frame) {
  if (frame.frame_index != next_frame_) {
    throw OutOfOrderFrame("expected frame " + std::to_string(next_frame_) + ", got " +
                          std::to_string(frame.frame_index));
  }
  if (next_frame_ == 0) return initialize(frame);

  const Prediction prior = predict(*filter_, model_);
  filter_ = prior.state;
  ++predicts_;

  StepContext ctx;
  ctx.s_ref = filter_->s_ref;
  ctx.mcsm = config_.mcsm;
  ctx.motion = motion_;
  ctx.motion_enabled = config_.variant != Variant::NoKfcmm;
  ctx.reset_stable_enabled = config_.variant != Variant::NoRs;
  ctx.predicted = ctx.motion_enabled ? prior.box : last_observed_;

  StepOutcome out;
  if (config_.variant == Variant::NoMcsm) {
    out = fused_only_step(phase_, frame.candidates, ctx);
  } else {
    switch (phase_.phase) {
      case Phase::Stabilizing: out = stabilizing_step(phase_, frame.candidates, ctx); break;
      case Phase::Stable: out = stable_step(phase_, frame.candidates, ctx); break;
      case Phase::ResetStable: out = reset_stable_step(phase_, frame.candidates, ctx); break;
      case Phase::Uninitialized:
      case Phase::Initialized:
        throw Error("tracker phase " + std::string(phase_name(phase_.phase)) + " cannot process frame " +
                    std::to_string(frame.frame_index));
    }
  }

  if (out.action == FilterAction::UpdateWith) {
    filter_ = update(*filter_, out.output_box, model_);
    ++updates_;
  }
  if (out.selected) last_observed_ = out.output_box;

  bool admitted = false;
  if (out.selected) admitted = gate_frame(frame.frame_index, frame.candidates[*out.selected], out.s_kf);
  last_admit_ = admitted;
  phase_ = out.next;
  ++next_frame_;

  return {frame.frame_index, out.output_box,    phase_.phase, out.s_sam,
          out.s_kf,          admitted,          out.selected ? static_cast<int>(*out.selected) : -1};
}

}  // namespace sattrack
