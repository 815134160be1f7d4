///////////////////////////////////////////////////////////////////////////////
// simulator.hpp: deterministic ground-truth scenarios. Rigid targets follow
// piecewise-constant velocities; occluders are fixed rectangles; distractors
// are target-like tracks. All randomness lives in the observer.
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sattrack/geometry.hpp"

namespace sattrack {

struct VelocitySegment {
  std::int64_t start_frame = 0;
  double vx = 0.0;
  double vy = 0.0;
};

struct TrackSpec {
  BoundingBox initial;
  // Sorted by strictly increasing start_frame; velocity is zero before the first.
  std::vector<VelocitySegment> segments;
};

enum class OccluderKind { Full, Partial };

struct Occluder {
  BoundingBox box;
  OccluderKind kind = OccluderKind::Full;
};

struct ScenarioSpec {
  std::string name = "scenario";
  std::int64_t frames = 100;
  int arena_width = 256;
  int arena_height = 256;
  TrackSpec target;
  std::vector<Occluder> occluders;
  std::vector<TrackSpec> distractors;
  std::uint64_t seed = 0;

  // Throws SpecError.
  void validate() const;
};

struct Scenario {
  ScenarioSpec spec;
  std::vector<BoundingBox> target;                    // per frame
  std::vector<std::vector<BoundingBox>> distractors;  // [distractor][frame]
  std::vector<double> visibility;                     // against all occluders

  std::int64_t frames() const { return static_cast<std::int64_t>(target.size()); }
};

// Integrates the velocity segments and computes per-frame visibility.
Scenario generate(const ScenarioSpec& spec);

// Positions of a track at frames [0, frames).
std::vector<BoundingBox> integrate_track(const TrackSpec& track, std::int64_t frames);

// Exact area of the target covered by the union of the rectangles.
double covered_area(const BoundingBox& target, const std::vector<BoundingBox>& occluders);

double visibility(const BoundingBox& target, const std::vector<BoundingBox>& occluders);

struct SuiteEntry {
  std::string name;
  ScenarioSpec spec;
  std::string profile;  // observer noise preset: day, dusk or night
};

struct Suite {
  std::string name;
  std::vector<SuiteEntry> entries;
};

// linear_clear, occlusion_bridge, distractor_cross, turn_under_occlusion;
// each holds ten sequences per illumination preset.
std::vector<Suite> builtin_suites();
std::vector<std::string> builtin_suite_names();
// Throws SpecError for unknown names. "all" concatenates every suite.
Suite builtin_suite(const std::string& name);

// JSON carrier for ScenarioSpec. Boxes are [cx, cy, w, h]; segments are
// [start_frame, vx, vy].
nlohmann::json spec_to_json(const ScenarioSpec& spec);
ScenarioSpec spec_from_json(const nlohmann::json& j);

// One "left,top,w,h" line per frame.
void write_otb(std::ostream& os, const std::vector<BoundingBox>& boxes);
std::vector<BoundingBox> read_otb(std::istream& is);

}  // namespace sattrack
