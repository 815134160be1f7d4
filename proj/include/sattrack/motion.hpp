///////////////////////////////////////////////////////////////////////////////
// motion.hpp: motion-consistency scoring of candidate masks against the
// filter's predicted box, the center-distance gate, and fused selection.
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sattrack/geometry.hpp"

namespace sattrack {

struct MotionConfig {
  double alpha_kf = 0.2;
  // Admissible range of S_ref / candidate area (inclusive).
  double deform_lo = 0.5;
  double deform_hi = 2.0;
  // Distance gate radius in pixels; the tracker derives sqrt(S_ref) by default.
  double d_max = 1.0;
  double tau_kf = 0.0;

  // Throws ConfigError when a field is out of range.
  void validate() const;
};

// IoU between the predicted box and the candidate's tight box, or 0 when the
// area ratio S_ref / candidate.area falls outside [deform_lo, deform_hi].
double motion_score(const BoundingBox& predicted, double s_ref, const MaskStats& candidate,
                    const MotionConfig& cfg);

// 1 iff the candidate centroid lies strictly within d_max of the predicted center.
int distance_gate(const BoundingBox& predicted, const MaskStats& candidate, const MotionConfig& cfg);

struct ScoredCandidate {
  MaskStats stats;
  double s_sam = 0.0;
};

struct CandidateScore {
  double s_kf = 0.0;
  int gate = 0;
  double fused = 0.0;
};

std::vector<CandidateScore> score_candidates(std::span<const ScoredCandidate> candidates,
                                             const BoundingBox& predicted, double s_ref,
                                             const MotionConfig& cfg);

struct Selection {
  std::size_t index = 0;
  double fused = 0.0;
  double s_kf = 0.0;
};

// Maximizes (alpha * s_kf + (1 - alpha) * s_sam) * gate, lowest index on ties.
// Returns nullopt (no viable candidate) when no fused score is positive.
// Throws EmptyCandidates for an empty list.
std::optional<Selection> fused_select(std::span<const ScoredCandidate> candidates,
                                      const BoundingBox& predicted, double s_ref,
                                      const MotionConfig& cfg);

}  // namespace sattrack
