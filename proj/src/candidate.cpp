#include "sattrack/candidate.hpp"

#include <cmath>
#include <string>

#include "sattrack/errors.hpp"

namespace sattrack {

namespace {

bool near(double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); }

}  // namespace

void validate_frame(const ObserverFrame& frame) {
  const auto where = [&](std::size_t j) {
    return "frame " + std::to_string(frame.frame_index) + " candidate " + std::to_string(j);
  };
  if (frame.candidates.size() > kMaxCandidates) {
    throw ProtocolError("frame " + std::to_string(frame.frame_index) + " has " +
                        std::to_string(frame.candidates.size()) + " candidates, at most 3 allowed");
  }
  for (std::size_t j = 0; j < frame.candidates.size(); ++j) {
    const CandidateMask& c = frame.candidates[j];
    const MaskStats& s = c.stats;
    if (!std::isfinite(c.s_sam) || !std::isfinite(c.s_obj)) throw ProtocolError(where(j) + ": non-finite score");
    if (!s.tight_box.valid()) throw ProtocolError(where(j) + ": bbox must have positive size");
    if (!(s.area > 0.0) || !std::isfinite(s.area)) throw ProtocolError(where(j) + ": area must be positive");
    const auto& b = s.tight_box;
    if (!(s.centroid.x >= b.left() - 1e-9 && s.centroid.x <= b.right() + 1e-9 &&
          s.centroid.y >= b.top() - 1e-9 && s.centroid.y <= b.bottom() + 1e-9)) {
      throw ProtocolError(where(j) + ": centroid lies outside bbox");
    }
    if (s.area > b.area() * (1.0 + 1e-9)) throw ProtocolError(where(j) + ": area exceeds bbox area");
    if (c.mask) {
      MaskStats from_mask;
      try {
        from_mask = mask_stats(*c.mask);
      } catch (const EmptyMask&) {
        throw ProtocolError(where(j) + ": mask is empty");
      }
      if (!near(from_mask.area, s.area) || !near(from_mask.centroid.x, s.centroid.x) ||
          !near(from_mask.centroid.y, s.centroid.y) || !near(from_mask.tight_box.cx, b.cx) ||
          !near(from_mask.tight_box.cy, b.cy) || !near(from_mask.tight_box.w, b.w) ||
          !near(from_mask.tight_box.h, b.h)) {
        throw ProtocolError(where(j) + ": stats disagree with mask");
      }
    }
  }
}

}  // namespace sattrack
