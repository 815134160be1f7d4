///////////////////////////////////////////////////////////////////////////////
// mcsm.hpp: the five-phase motion-constrained state machine.
//
// Each per-phase step is a pure function of the current phase, the frame's
// candidates and the filter prior; the Tracker (tracker.hpp) applies the
// resulting filter action and memory bookkeeping.
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "sattrack/candidate.hpp"
#include "sattrack/geometry.hpp"
#include "sattrack/motion.hpp"

namespace sattrack {

enum class Phase { Uninitialized, Initialized, Stabilizing, Stable, ResetStable };

// Serialized forms: uninit, init, stabilizing, stable, reset_stable.
std::string_view phase_name(Phase phase);
Phase parse_phase(std::string_view name);

struct McsmConfig {
  double tau_h = 0.3;   // high-confidence affinity
  double tau_m = 0.0;   // propagation threshold
  double tau_kf = 0.0;  // motion consistency threshold
  int T_f = 12;         // consecutive high-confidence frames to become Stable
  int T_m = 5;          // consecutive failed Stable frames before ResetStable
  // Also require the distance gate against the prior when leaving ResetStable.
  bool recovery_gate = false;

  void validate() const;
};

struct TrackerPhase {
  Phase phase = Phase::Uninitialized;
  int stability = 0;   // s_f
  int fail_count = 0;
  friend bool operator==(const TrackerPhase&, const TrackerPhase&) = default;
};

enum class FilterAction { PredictOnly, UpdateWith };

struct StepOutcome {
  BoundingBox output_box;
  TrackerPhase next;
  FilterAction action = FilterAction::PredictOnly;
  // With UpdateWith, the filter is corrected with output_box.
  std::optional<std::size_t> selected;
  // Scores of the selected candidate, or the frame maxima when none is selected.
  double s_sam = 0.0;
  double s_kf = 0.0;
};

// Algorithm branches taken in the Stable phase.
enum class StableBranch { HighConfidence, MidConfidence, MotionRescue, Fail };

StableBranch stable_decision(double s_sam, double s_kf, const McsmConfig& cfg, bool motion_enabled = true);

struct StepContext {
  // Filter prior for this frame; without the motion model, the last observed box.
  BoundingBox predicted;
  double s_ref = 0.0;
  McsmConfig mcsm;
  MotionConfig motion;
  bool motion_enabled = true;
  bool reset_stable_enabled = true;
};

// Frame 0: take the highest-affinity candidate. Throws NoCandidates.
StepOutcome init_step(std::span<const CandidateMask> candidates);

StepOutcome stabilizing_step(const TrackerPhase& phase, std::span<const CandidateMask> candidates,
                             const StepContext& ctx);

StepOutcome stable_step(const TrackerPhase& phase, std::span<const CandidateMask> candidates,
                        const StepContext& ctx);

StepOutcome reset_stable_step(const TrackerPhase& phase, std::span<const CandidateMask> candidates,
                              const StepContext& ctx);

// Fixed fused selection with no phases: every viable winner updates the filter.
StepOutcome fused_only_step(const TrackerPhase& phase, std::span<const CandidateMask> candidates,
                            const StepContext& ctx);

// Index of the highest affinity, lowest index on ties. Requires a non-empty span.
std::size_t argmax_affinity(std::span<const CandidateMask> candidates);

}  // namespace sattrack
