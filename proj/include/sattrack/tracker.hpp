///////////////////////////////////////////////////////////////////////////////
// tracker.hpp: per-sequence tracker tying the filter, the state machine and
// the memory gate together. One predict per frame after the first, at most
// one update, and a FrameResult for every processed frame.
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "sattrack/candidate.hpp"
#include "sattrack/kalman.hpp"
#include "sattrack/mcsm.hpp"
#include "sattrack/memory_gate.hpp"
#include "sattrack/motion.hpp"

namespace sattrack {

// Ablation identities: full pipeline, without the motion module, without the
// state machine, and without the ResetStable phase.
enum class Variant { Full, NoKfcmm, NoMcsm, NoRs };

std::string_view variant_name(Variant v);
// Throws UnknownVariant.
Variant parse_variant(std::string_view name);

struct TrackerConfig {
  McsmConfig mcsm;
  MotionConfig motion;
  // Distance gate radius; nullopt means sqrt of the first-frame mask area.
  std::optional<double> d_max;
  GateThresholds gate;
  std::size_t memory_capacity = 16;
  double dt = 1.0;
  KalmanNoise noise;
  Variant variant = Variant::Full;

  // Throws ConfigError when any sub-config is out of range.
  void validate() const;
};

struct FrameResult {
  std::int64_t frame = 0;
  BoundingBox out_box;
  Phase phase = Phase::Uninitialized;
  double s_sam = 0.0;
  double s_kf = 0.0;
  bool mem_admit = false;
  int selected = -1;

  friend bool operator==(const FrameResult&, const FrameResult&) = default;
};

class Tracker {
 public:
  // The prompt box seeds the filter on frame 0.
  Tracker(TrackerConfig config, const BoundingBox& prompt);

  // Frames must arrive with contiguous indices starting at 0. Frame 0
  // initializes the filter from the best candidate and throws NoCandidates
  // when it has none.
  FrameResult process(const ObserverFrame& frame);

  const TrackerConfig& config() const { return config_; }
  const TrackerPhase& phase() const { return phase_; }
  const std::optional<FilterState>& filter() const { return filter_; }
  const MemoryBank& memory() const { return memory_; }
  const KalmanModel& model() const { return model_; }
  // Resolved motion config (d_max filled in) once initialized.
  const MotionConfig& motion() const { return motion_; }
  bool last_admitted() const { return last_admit_; }

  std::int64_t predict_count() const { return predicts_; }
  std::int64_t update_count() const { return updates_; }

 private:
  FrameResult initialize(const ObserverFrame& frame);
  bool gate_frame(std::int64_t frame, const CandidateMask& c, double s_kf);

  TrackerConfig config_;
  BoundingBox prompt_;
  KalmanModel model_;
  MotionConfig motion_;
  TrackerPhase phase_;
  std::optional<FilterState> filter_;
  MemoryBank memory_;
  BoundingBox last_observed_;
  std::int64_t next_frame_ = 0;
  std::int64_t predicts_ = 0;
  std::int64_t updates_ = 0;
  bool last_admit_ = false;
};

}  // namespace sattrack
