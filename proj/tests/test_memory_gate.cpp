#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "gen.hpp"
#include "oracles.hpp"
#include "sattrack/errors.hpp"
#include "sattrack/memory_gate.hpp"

using namespace sattrack;
using sattrack::testing::Gen;

namespace {

std::vector<oracle::StreamItem> random_stream(Gen& g, int n) {
  // Boundary values show up often so strictness matters.
  auto pick = [&g](double boundary) {
    if (g.chance(0.15)) return boundary;
    return g.uniform(boundary - 0.5, boundary + 0.5);
  };
  std::vector<oracle::StreamItem> s;
  std::int64_t frame = 0;
  for (int i = 0; i < n; ++i) {
    frame += g.integer(1, 3);
    s.push_back({frame, pick(0.5), pick(0.0), pick(0.0)});
  }
  return s;
}

}  // namespace

TEST(Admit, Examples) {
  const GateThresholds th;
  EXPECT_TRUE(admit({0.6, 0.1, 0.3}, th));
  EXPECT_FALSE(admit({0.5, 0.1, 0.3}, th));
  EXPECT_FALSE(admit({0.6, 0.0, 0.3}, th));
  EXPECT_FALSE(admit({0.6, 0.1, 0.0}, th));
  EXPECT_TRUE(admit({1, 1, 1}, {0, 0, 0}));
}

TEST(MemoryBank, PushIntoEmpty) {
  const MemoryBank bank;
  const auto b = bank.push(0, {0.9, 0.8, 0.5});
  EXPECT_EQ(b.size(), 1u);
  EXPECT_TRUE(bank.empty());
}

TEST(MemoryBank, CapacityEvictsOldest) {
  MemoryBank bank(16);
  for (std::int64_t f = 1; f <= 17; ++f) bank = bank.push(f, {});
  EXPECT_EQ(bank.size(), 16u);
  EXPECT_EQ(bank.entries().front().frame, 17);
  EXPECT_EQ(bank.entries().back().frame, 2);
}

TEST(MemoryBank, RejectsNonIncreasingFrames) {
  const auto bank = MemoryBank(4).push(5, {});
  EXPECT_THROW(bank.push(5, {}), OutOfOrderFrame);
  EXPECT_THROW(bank.push(3, {}), OutOfOrderFrame);
  EXPECT_THROW(MemoryBank(0), ConfigError);
}

TEST(MemoryBank, StreamsMatchFilterThenTruncate) {
  Gen g(41);
  const GateThresholds th;
  for (int trial = 0; trial < 500; ++trial) {
    const auto stream = random_stream(g, g.integer(0, 120));
    MemoryBank bank(16);
    std::vector<std::int64_t> rejected;
    for (const auto& s : stream) {
      if (admit({s.s_mask, s.s_obj, s.s_kf}, th)) {
        bank = bank.push(s.frame, {s.s_mask, s.s_obj, s.s_kf});
      } else {
        rejected.push_back(s.frame);
      }
      ASSERT_LE(bank.size(), 16u);
      for (std::size_t i = 1; i < bank.size(); ++i) ASSERT_GT(bank.entries()[i - 1].frame, bank.entries()[i].frame);
    }
    std::vector<std::int64_t> frames;
    for (const auto& e : bank.entries()) frames.push_back(e.frame);
    ASSERT_EQ(frames, oracle::memory_replay(stream, 0.5, 0.0, 0.0, 16));
    for (auto r : rejected) EXPECT_EQ(std::count(frames.begin(), frames.end(), r), 0);
  }
}

TEST(Admit, RaisingAThresholdOnlyShrinksTheAdmittedSet) {
  Gen g(42);
  const auto stream = random_stream(g, 2000);
  for (int i = 0; i < 50; ++i) {
    GateThresholds lo{g.uniform(0, 1), g.uniform(-0.5, 0.5), g.uniform(-0.5, 0.5)};
    GateThresholds hi = lo;
    hi.tau_mask += g.uniform(0, 0.3);
    hi.tau_obj += g.uniform(0, 0.3);
    hi.tau_kf += g.uniform(0, 0.3);
    for (const auto& s : stream) {
      if (admit({s.s_mask, s.s_obj, s.s_kf}, hi)) EXPECT_TRUE(admit({s.s_mask, s.s_obj, s.s_kf}, lo));
    }
  }
}
