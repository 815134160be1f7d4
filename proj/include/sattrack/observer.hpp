///////////////////////////////////////////////////////////////////////////////
// observer.hpp: per-frame candidate producers. The synthetic observer turns a
// simulated scenario into noisy candidates; the replay observer plays back a
// transcript; the bridge observer talks to an external segmentation backend
// over newline-delimited JSON on its standard input and output.
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sattrack/candidate.hpp"
#include "sattrack/simulator.hpp"

namespace sattrack {

struct NoiseProfile {
  std::string name = "custom";
  double box_jitter_sigma = 0.3;        // pixels, applied to the center; half of it to the size
  double affinity_mean_visible = 0.85;
  double affinity_mean_occluded = 0.0;   // spurious candidates while the target is hidden
  double affinity_mean_distractor = 0.3;
  double affinity_sigma = 0.08;
  int distractor_count = 2;              // max distractor candidates per frame
  double drop_prob_visible = 0.0;        // target candidate missing although visible
  double spurious_prob = 0.3;            // chance of a spurious candidate per hidden frame
  double min_visible = 0.3;              // below this (full occluders only) the target is not segmented
  double distractor_radius = 4.0;        // in target diagonals
  double obj_offset = 0.1;               // s_obj = max(0, s_sam - obj_offset)

  // Throws ConfigError.
  void validate() const;

  // day, dusk, night and zero (noiseless). Throws ConfigError otherwise.
  static NoiseProfile preset(const std::string& name);
};

// Pure function of its arguments. Candidate 0, when present, is the target.
// With masks set, candidates carry rasterized grids over the arena and their
// stats come from those grids. Throws FrameOutOfRange.
ObserverFrame observe_synthetic(const Scenario& scenario, std::int64_t frame_index, const NoiseProfile& profile,
                                std::uint64_t rng_seed, bool masks = false);

// Pixels whose centers fall inside the box, clipped to the grid.
MaskGrid rasterize(const BoundingBox& box, int width, int height);

class Observer {
 public:
  virtual ~Observer() = default;
  virtual ObserverFrame observe(std::int64_t frame_index, bool memory_admit_prev) = 0;
  virtual void close() {}
};

class SyntheticObserver : public Observer {
 public:
  SyntheticObserver(Scenario scenario, NoiseProfile profile, std::uint64_t seed);
  ObserverFrame observe(std::int64_t frame_index, bool memory_admit_prev) override;

 private:
  Scenario scenario_;
  NoiseProfile profile_;
  std::uint64_t seed_;
};

// Wire-schema conversion for a single candidate. Parsing validates shapes and
// types and throws ProtocolError; rle, when present, becomes the mask.
nlohmann::json candidate_to_json(const CandidateMask& c);
CandidateMask candidate_from_json(const nlohmann::json& j);

struct TranscriptHeader {
  int width = 256;
  int height = 256;
  BoundingBox prompt_box;
  std::string sequence;
};

struct Transcript {
  TranscriptHeader header;
  std::vector<ObserverFrame> frames;
};

nlohmann::json transcript_to_json(const Transcript& t);
// Throws ProtocolError for malformed documents, non-contiguous indices or
// frames that fail validate_frame.
Transcript transcript_from_json(const nlohmann::json& j);

class ReplayObserver : public Observer {
 public:
  explicit ReplayObserver(Transcript transcript);
  ObserverFrame observe(std::int64_t frame_index, bool memory_admit_prev) override;

 private:
  Transcript transcript_;
};

struct BridgeOptions {
  std::string command;  // run through /bin/sh -c
  int timeout_ms = 10000;
};

// Owns the backend process. Requests must have strictly increasing indices
// starting at 0. Throws ProtocolError, BridgeClosed or BridgeTimeout.
class BridgeObserver : public Observer {
 public:
  BridgeObserver(BridgeOptions options, const TranscriptHeader& header);
  ~BridgeObserver() override;
  BridgeObserver(const BridgeObserver&) = delete;
  BridgeObserver& operator=(const BridgeObserver&) = delete;

  ObserverFrame observe(std::int64_t frame_index, bool memory_admit_prev) override;
  // Sends close and waits for done. Idempotent.
  void close() override;

 private:
  void send(const nlohmann::json& message);
  nlohmann::json receive();
  std::string read_line();
  void shutdown_child();

  BridgeOptions options_;
  int fd_ = -1;
  int pid_ = -1;
  std::int64_t next_index_ = 0;
  std::string buffer_;
  bool closed_ = false;
};

}  // namespace sattrack
