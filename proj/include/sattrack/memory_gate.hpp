#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sattrack {

struct GateThresholds {
  double tau_mask = 0.5;
  double tau_obj = 0.0;
  double tau_kf = 0.0;
};

struct FrameScores {
  double s_mask = 0.0;
  double s_obj = 0.0;
  double s_kf = 0.0;
};

// All three comparisons are strict.
bool admit(const FrameScores& scores, const GateThresholds& th);

struct MemoryEntry {
  std::int64_t frame = 0;
  FrameScores scores;
  friend bool operator==(const MemoryEntry& a, const MemoryEntry& b) {
    return a.frame == b.frame && a.scores.s_mask == b.scores.s_mask && a.scores.s_obj == b.scores.s_obj &&
           a.scores.s_kf == b.scores.s_kf;
  }
};

/// Capped set of admitted frames, newest first. The bank only does the
/// bookkeeping; the observer owns the actual memory features.
class MemoryBank {
 public:
  explicit MemoryBank(std::size_t capacity = 16);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<MemoryEntry>& entries() const { return entries_; }

  // Prepends the frame, evicting the oldest entry past capacity. Throws
  // OutOfOrderFrame unless frame exceeds every stored frame.
  MemoryBank push(std::int64_t frame, const FrameScores& scores) const;

 private:
  std::size_t capacity_;
  std::vector<MemoryEntry> entries_;
};

}  // namespace sattrack
