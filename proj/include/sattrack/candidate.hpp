#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sattrack/geometry.hpp"
#include "sattrack/motion.hpp"

namespace sattrack {

inline constexpr std::size_t kMaxCandidates = 3;

// One observer proposal. The mask grid is optional; stats are always set.
struct CandidateMask {
  std::optional<MaskGrid> mask;
  MaskStats stats;
  double s_sam = 0.0;
  double s_obj = 0.0;

  ScoredCandidate scored() const { return {stats, s_sam}; }
  friend bool operator==(const CandidateMask&, const CandidateMask&) = default;
};

struct ObserverFrame {
  std::int64_t frame_index = 0;
  std::vector<CandidateMask> candidates;
  friend bool operator==(const ObserverFrame&, const ObserverFrame&) = default;
};

// Throws ProtocolError when a frame carries more than three candidates or a
// candidate's stats are inconsistent (non-positive area or size, centroid
// outside the tight box, mask disagreeing with the stats).
void validate_frame(const ObserverFrame& frame);

}  // namespace sattrack
