#include <gtest/gtest.h>

#include <sstream>

#include "gen.hpp"
#include "oracles.hpp"
#include "sattrack/errors.hpp"
#include "sattrack/simulator.hpp"

using namespace sattrack;
using sattrack::testing::Gen;

TEST(Generate, LinearIntegration) {
  ScenarioSpec s;
  s.frames = 10;
  s.target.initial = {10, 50, 4, 4};
  s.target.segments = {{0, 2, 0}};
  const auto sc = generate(s);
  for (int f = 0; f < 10; ++f) EXPECT_EQ(sc.target[static_cast<std::size_t>(f)].cx, 10 + 2 * f);
  for (double v : sc.visibility) EXPECT_EQ(v, 1.0);
}

TEST(Generate, SegmentsChangeVelocity) {
  TrackSpec t{{20, 20, 4, 4}, {{0, 1, 0}, {3, 0, 2}}};
  const auto b = integrate_track(t, 6);
  EXPECT_EQ(b[3], (BoundingBox{23, 20, 4, 4}));
  EXPECT_EQ(b[5], (BoundingBox{23, 24, 4, 4}));
}

TEST(Generate, OccluderCoveringFramesFortyToFiftyNine) {
  ScenarioSpec s;
  s.target.initial = {10, 100, 6, 6};
  s.target.segments = {{0, 2, 0}};
  // Frame 40 is at cx = 90, frame 59 at cx = 128.
  s.occluders = {{BoundingBox::from_corners(87, 90, 44, 20), OccluderKind::Full}};
  const auto sc = generate(s);
  for (std::size_t f = 0; f < 100; ++f) {
    const bool hidden = f >= 40 && f <= 59;
    if (hidden) {
      EXPECT_EQ(sc.visibility[f], 0.0) << f;
    } else {
      EXPECT_GT(sc.visibility[f], 0.0) << f;
    }
  }
}

TEST(Generate, RejectsBadSpecs) {
  ScenarioSpec s;
  s.target.initial = {10, 10, 4, 4};
  s.frames = 0;
  EXPECT_THROW(generate(s), SpecError);
  s.frames = 5;
  s.target.initial = {-10, 10, 4, 4};
  EXPECT_THROW(generate(s), SpecError);
  s.target.initial = {10, 10, 4, 4};
  s.target.segments = {{2, 1, 0}, {2, 0, 1}};
  EXPECT_THROW(generate(s), SpecError);
}

TEST(Visibility, MatchesInclusionExclusionOracle) {
  Gen g(51);
  for (int i = 0; i < 3000; ++i) {
    const BoundingBox t = g.box(0, 50, 1, 20);
    std::vector<BoundingBox> occ;
    const int n = g.integer(0, 3);
    for (int k = 0; k < n; ++k) occ.push_back(g.near(t, 15));
    const double v = visibility(t, occ);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(covered_area(t, occ), oracle::covered_by_union(t, occ), 1e-9);
    EXPECT_NEAR(v, 1.0 - oracle::covered_by_union(t, occ) / t.area(), 1e-9);
  }
}

TEST(BuiltinSuites, NamesAndSizes) {
  const auto names = builtin_suite_names();
  EXPECT_EQ(names, (std::vector<std::string>{"linear_clear", "occlusion_bridge", "distractor_cross",
                                             "turn_under_occlusion"}));
  std::size_t total = 0;
  for (const auto& s : builtin_suites()) {
    EXPECT_EQ(s.entries.size(), 30u) << s.name;
    int day = 0, dusk = 0, night = 0;
    for (const auto& e : s.entries) {
      day += e.profile == "day";
      dusk += e.profile == "dusk";
      night += e.profile == "night";
      EXPECT_EQ(e.spec.frames, 100);
    }
    EXPECT_EQ(day, 10);
    EXPECT_EQ(dusk, 10);
    EXPECT_EQ(night, 10);
    total += s.entries.size();
  }
  EXPECT_EQ(builtin_suite("all").entries.size(), total);
  EXPECT_THROW(builtin_suite("nope"), SpecError);
}

TEST(BuiltinSuites, TargetsAreRigid) {
  for (const auto& e : builtin_suite("all").entries) {
    const auto sc = generate(e.spec);
    for (const auto& b : sc.target) {
      ASSERT_EQ(b.w, sc.target.front().w) << e.name;
      ASSERT_EQ(b.h, sc.target.front().h) << e.name;
    }
  }
}

TEST(BuiltinSuites, LinearClearIsAlwaysVisible) {
  for (const auto& e : builtin_suite("linear_clear").entries) {
    for (double v : generate(e.spec).visibility) ASSERT_EQ(v, 1.0) << e.name;
  }
}

TEST(BuiltinSuites, OcclusionBridgeHasOneTwentyFrameGap) {
  for (const auto& e : builtin_suite("occlusion_bridge").entries) {
    const auto sc = generate(e.spec);
    int runs = 0, longest = 0, cur = 0;
    for (double v : sc.visibility) {
      if (v == 0.0) {
        if (cur == 0) ++runs;
        longest = std::max(longest, ++cur);
      } else {
        cur = 0;
      }
    }
    EXPECT_EQ(runs, 1) << e.name;
    EXPECT_EQ(longest, 20) << e.name;
    // Motion is linear: a single velocity segment.
    EXPECT_EQ(e.spec.target.segments.size(), 1u);
  }
}

TEST(BuiltinSuites, DistractorCrossOverlapsTarget) {
  for (const auto& e : builtin_suite("distractor_cross").entries) {
    const auto sc = generate(e.spec);
    double best = 0;
    for (const auto& d : sc.distractors) {
      for (std::size_t f = 0; f < sc.target.size(); ++f) best = std::max(best, oracle::box_iou(d[f], sc.target[f]));
    }
    EXPECT_GT(best, 0.3) << e.name;
  }
}

TEST(BuiltinSuites, GenerationIsStable) {
  for (const auto& e : builtin_suite("turn_under_occlusion").entries) {
    const auto a = generate(e.spec), b = generate(e.spec);
    EXPECT_EQ(a.target, b.target);
    EXPECT_EQ(a.visibility, b.visibility);
  }
  EXPECT_EQ(spec_to_json(builtin_suite("all").entries[17].spec), spec_to_json(builtin_suite("all").entries[17].spec));
}

TEST(SpecJson, RoundTrip) {
  for (const auto& e : builtin_suite("all").entries) {
    const auto j = spec_to_json(e.spec);
    const auto back = spec_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(spec_to_json(back), j);
    EXPECT_EQ(generate(back).target, generate(e.spec).target);
  }
  EXPECT_THROW(spec_from_json(nlohmann::json::parse(R"({"frames": 10})")), SpecError);
}

TEST(Otb, RoundTripAndCornerConvention) {
  const std::vector<BoundingBox> boxes{{12, 23, 4, 6}, {0.5, 0.25, 1, 0.5}};
  std::ostringstream os;
  write_otb(os, boxes);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "10,20,4,6");
  std::istringstream is(os.str());
  EXPECT_EQ(read_otb(is), boxes);
  std::istringstream tabs("10\t20\t4\t6\n");
  EXPECT_EQ(read_otb(tabs).front(), boxes.front());
  std::istringstream bad("1,2,3\n");
  EXPECT_THROW(read_otb(bad), SpecError);
}
