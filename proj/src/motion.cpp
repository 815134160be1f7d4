#include "sattrack/motion.hpp"

#include <cmath>

#include "sattrack/errors.hpp"

namespace sattrack {

void MotionConfig::validate() const {
  if (!(alpha_kf >= 0.0 && alpha_kf <= 1.0)) throw ConfigError("alpha_kf must lie in [0, 1]");
  if (!(deform_lo > 0.0 && deform_lo <= 1.0 && deform_hi >= 1.0) || !std::isfinite(deform_hi)) {
    throw ConfigError("deformation range must satisfy 0 < lo <= 1 <= hi");
  }
  if (!(d_max > 0.0)) throw ConfigError("d_max must be positive");
  if (!std::isfinite(tau_kf)) throw ConfigError("tau_kf must be finite");
}

double motion_score(const BoundingBox& predicted, double s_ref, const MaskStats& candidate,
                    const MotionConfig& cfg) {
  const double ratio = s_ref / candidate.area;
  if (!(ratio >= cfg.deform_lo && ratio <= cfg.deform_hi)) return 0.0;
  return iou(predicted, candidate.tight_box);
}

int distance_gate(const BoundingBox& predicted, const MaskStats& candidate, const MotionConfig& cfg) {
  const double d = std::hypot(predicted.cx - candidate.centroid.x, predicted.cy - candidate.centroid.y);
  return d < cfg.d_max ? 1 : 0;
}

std::vector<CandidateScore> score_candidates(std::span<const ScoredCandidate> candidates,
                                             const BoundingBox& predicted, double s_ref,
                                             const MotionConfig& cfg) {
  std::vector<CandidateScore> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    CandidateScore s;
    s.s_kf = motion_score(predicted, s_ref, c.stats, cfg);
    s.gate = distance_gate(predicted, c.stats, cfg);
    s.fused = (cfg.alpha_kf * s.s_kf + (1.0 - cfg.alpha_kf) * c.s_sam) * s.gate;
    out.push_back(s);
  }
  return out;
}

std::optional<Selection> fused_select(std::span<const ScoredCandidate> candidates,
                                      const BoundingBox& predicted, double s_ref,
                                      const MotionConfig& cfg) {
  if (candidates.empty()) throw EmptyCandidates("no candidate masks in this frame");
  const auto scores = score_candidates(candidates, predicted, s_ref, cfg);
  std::optional<Selection> best;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (!(scores[j].fused > 0.0)) continue;
    if (!best || scores[j].fused > best->fused) best = Selection{j, scores[j].fused, scores[j].s_kf};
  }
  return best;
}

}  // namespace sattrack
