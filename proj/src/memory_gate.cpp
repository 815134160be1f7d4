#include "sattrack/memory_gate.hpp"

#include <string>

#include "sattrack/errors.hpp"

namespace sattrack {

bool admit(const FrameScores& scores, const GateThresholds& th) {
  return scores.s_mask > th.tau_mask && scores.s_obj > th.tau_obj && scores.s_kf > th.tau_kf;
}

MemoryBank::MemoryBank(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("memory bank capacity must be at least 1");
}

MemoryBank MemoryBank::push(std::int64_t frame, const FrameScores& scores) const {
  if (!entries_.empty() && frame <= entries_.front().frame) {
    throw OutOfOrderFrame("frame " + std::to_string(frame) + " is not after newest stored frame " +
                          std::to_string(entries_.front().frame));
  }
  MemoryBank next(capacity_);
  next.entries_.reserve(capacity_);
  next.entries_.push_back({frame, scores});
  for (const auto& e : entries_) {
    if (next.entries_.size() == capacity_) break;
    next.entries_.push_back(e);
  }
  return next;
}

}  // namespace sattrack
