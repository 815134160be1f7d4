#include <gtest/gtest.h>

#include "sattrack/errors.hpp"
#include "sattrack/observer.hpp"

using namespace sattrack;

namespace {

Scenario scenario(const std::string& suite, std::size_t i = 0) {
  return generate(builtin_suite(suite).entries.at(i).spec);
}

}  // namespace

TEST(NoiseProfile, Presets) {
  EXPECT_EQ(NoiseProfile::preset("day").affinity_mean_visible, 0.85);
  EXPECT_EQ(NoiseProfile::preset("dusk").affinity_mean_visible, 0.65);
  EXPECT_EQ(NoiseProfile::preset("night").affinity_mean_visible, 0.45);
  EXPECT_LT(NoiseProfile::preset("day").box_jitter_sigma, NoiseProfile::preset("dusk").box_jitter_sigma);
  EXPECT_LT(NoiseProfile::preset("dusk").box_jitter_sigma, NoiseProfile::preset("night").box_jitter_sigma);
  EXPECT_THROW(NoiseProfile::preset("noon"), ConfigError);
  NoiseProfile p;
  p.drop_prob_visible = 1.5;
  EXPECT_THROW(p.validate(), ConfigError);
  p = {};
  p.affinity_sigma = -1;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(SyntheticObserver, NoiselessVisibleFrameIsGroundTruth) {
  const auto sc = scenario("linear_clear");
  const auto zero = NoiseProfile::preset("zero");
  for (std::int64_t f = 0; f < sc.frames(); ++f) {
    const auto frame = observe_synthetic(sc, f, zero, 99);
    ASSERT_EQ(frame.candidates.size(), 1u);
    EXPECT_EQ(frame.candidates[0].stats.tight_box, sc.target[static_cast<std::size_t>(f)]);
    EXPECT_EQ(frame.candidates[0].s_sam, zero.affinity_mean_visible);
    EXPECT_EQ(frame.frame_index, f);
  }
}

TEST(SyntheticObserver, FullyOccludedTargetIsAbsent) {
  const auto sc = scenario("occlusion_bridge");
  for (const char* name : {"zero", "day", "night"}) {
    const auto p = NoiseProfile::preset(name);
    for (std::int64_t f = 0; f < sc.frames(); ++f) {
      if (sc.visibility[static_cast<std::size_t>(f)] > 0.0) continue;
      const auto frame = observe_synthetic(sc, f, p, 5);
      for (const auto& c : frame.candidates) {
        EXPECT_LT(iou(c.stats.tight_box, sc.target[static_cast<std::size_t>(f)]), 0.1) << name << " " << f;
      }
      if (std::string(name) == "zero") EXPECT_TRUE(frame.candidates.empty());
    }
  }
}

TEST(SyntheticObserver, PureFunctionOfInputs) {
  const auto sc = scenario("distractor_cross", 11);
  const auto p = NoiseProfile::preset("night");
  std::vector<ObserverFrame> forward, backward(100);
  for (std::int64_t f = 0; f < 100; ++f) forward.push_back(observe_synthetic(sc, f, p, 1234));
  for (std::int64_t f = 99; f >= 0; --f) backward[static_cast<std::size_t>(f)] = observe_synthetic(sc, f, p, 1234);
  EXPECT_EQ(forward, backward);
  EXPECT_EQ(transcript_to_json({{}, forward}).dump(), transcript_to_json({{}, backward}).dump());
  bool differs = false;
  for (std::int64_t f = 0; f < 100; ++f) differs |= !(observe_synthetic(sc, f, p, 1235) == forward[static_cast<std::size_t>(f)]);
  EXPECT_TRUE(differs);
}

TEST(SyntheticObserver, FramesAreValidAndBounded) {
  for (const auto& e : builtin_suite("all").entries) {
    const auto sc = generate(e.spec);
    const auto p = NoiseProfile::preset(e.profile);
    for (std::int64_t f = 0; f < sc.frames(); f += 7) {
      const auto frame = observe_synthetic(sc, f, p, 3);
      ASSERT_NO_THROW(validate_frame(frame)) << e.name << " " << f;
      for (const auto& c : frame.candidates) {
        EXPECT_GE(c.s_sam, 0.0);
        EXPECT_LE(c.s_sam, 1.0);
        EXPECT_EQ(c.s_obj, std::max(0.0, c.s_sam - p.obj_offset));
      }
    }
  }
}

TEST(SyntheticObserver, PromptedFrameAlwaysHasCandidates) {
  for (const auto& e : builtin_suite("all").entries) {
    const auto sc = generate(e.spec);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      EXPECT_FALSE(observe_synthetic(sc, 0, NoiseProfile::preset("night"), seed).candidates.empty()) << e.name;
    }
  }
}

TEST(SyntheticObserver, MasksAgreeWithStats) {
  const auto sc = scenario("distractor_cross", 1);
  const auto p = NoiseProfile::preset("day");
  for (std::int64_t f = 0; f < sc.frames(); f += 9) {
    const auto frame = observe_synthetic(sc, f, p, 8, true);
    for (const auto& c : frame.candidates) {
      ASSERT_TRUE(c.mask);
      EXPECT_EQ(mask_stats(*c.mask), c.stats);
    }
    validate_frame(frame);
  }
}

TEST(SyntheticObserver, OutOfRangeFrame) {
  const auto sc = scenario("linear_clear");
  EXPECT_THROW(observe_synthetic(sc, 100, {}, 0), FrameOutOfRange);
  EXPECT_THROW(observe_synthetic(sc, -1, {}, 0), FrameOutOfRange);
}

TEST(Rasterize, PixelCentersInsideBox) {
  const auto s = mask_stats(rasterize({2, 2, 3, 3}, 6, 5));
  EXPECT_EQ(s.area, 9);
  EXPECT_EQ(s.tight_box, (BoundingBox{2, 2, 3, 3}));
  // Clipped at the grid edge.
  EXPECT_EQ(mask_stats(rasterize({0, 0, 3, 3}, 6, 5)).area, 4);
}

TEST(CandidateJson, RoundTripAndErrors) {
  CandidateMask c;
  c.stats = box_stats({10, 12, 4, 6});
  c.s_sam = 0.625;
  c.s_obj = 0.5;
  const auto j = candidate_to_json(c);
  EXPECT_EQ(candidate_from_json(j), c);
  EXPECT_EQ(j.at("bbox"), nlohmann::json::parse("[10.0,12.0,4.0,6.0]"));

  auto bad = j;
  bad["bbox"] = {1, 2, 3};
  EXPECT_THROW(candidate_from_json(bad), ProtocolError);
  bad = j;
  bad["s_sam"] = "high";
  EXPECT_THROW(candidate_from_json(bad), ProtocolError);
  bad = j;
  bad["rle"] = "4 4 x";
  EXPECT_THROW(candidate_from_json(bad), ProtocolError);
  auto extra = j;
  extra["note"] = "ignored";
  EXPECT_EQ(candidate_from_json(extra), c);
}

TEST(ValidateFrame, RejectsInconsistentCandidates) {
  CandidateMask c;
  c.stats = box_stats({10, 12, 4, 6});
  c.s_sam = 0.5;
  ObserverFrame f{0, {c, c, c, c}};
  EXPECT_THROW(validate_frame(f), ProtocolError);
  f.candidates = {c};
  f.candidates[0].stats.centroid = {30, 30};
  EXPECT_THROW(validate_frame(f), ProtocolError);
  f.candidates = {c};
  f.candidates[0].stats.area = 100;
  EXPECT_THROW(validate_frame(f), ProtocolError);
  f.candidates = {c};
  f.candidates[0].mask = rasterize({30, 30, 4, 6}, 64, 64);
  EXPECT_THROW(validate_frame(f), ProtocolError);
}

TEST(Transcript, RoundTripAndReplay) {
  const auto sc = scenario("occlusion_bridge", 4);
  Transcript t;
  t.header = {256, 256, sc.target.front(), "seq"};
  for (std::int64_t f = 0; f < 30; ++f) t.frames.push_back(observe_synthetic(sc, f, NoiseProfile::preset("dusk"), 2));
  const auto back = transcript_from_json(nlohmann::json::parse(transcript_to_json(t).dump()));
  EXPECT_EQ(back.frames, t.frames);
  EXPECT_EQ(back.header.prompt_box, t.header.prompt_box);
  ReplayObserver r(back);
  EXPECT_EQ(r.observe(7, true), t.frames[7]);
  EXPECT_THROW(r.observe(30, true), FrameOutOfRange);

  auto j = transcript_to_json(t);
  j["frames"][3]["index"] = 4;
  EXPECT_THROW(transcript_from_json(j), ProtocolError);
}
