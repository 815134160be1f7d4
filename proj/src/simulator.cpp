#include "sattrack/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "numfmt.hpp"
#include "sattrack/errors.hpp"

namespace sattrack {

void ScenarioSpec::validate() const {
  if (frames < 1) throw SpecError(name + ": frames must be at least 1");
  if (arena_width <= 0 || arena_height <= 0) throw SpecError(name + ": arena must be non-empty");
  const auto check_track = [&](const TrackSpec& t, const std::string& what) {
    if (!t.initial.valid()) throw SpecError(name + ": " + what + " box must have positive size");
    for (std::size_t i = 1; i < t.segments.size(); ++i) {
      if (t.segments[i].start_frame <= t.segments[i - 1].start_frame) {
        throw SpecError(name + ": " + what + " velocity segments must have increasing start frames");
      }
    }
    for (const auto& s : t.segments) {
      if (!std::isfinite(s.vx) || !std::isfinite(s.vy)) throw SpecError(name + ": non-finite velocity");
    }
  };
  check_track(target, "target");
  for (const auto& d : distractors) check_track(d, "distractor");
  const auto& b = target.initial;
  if (b.left() < 0.0 || b.top() < 0.0 || b.right() > arena_width || b.bottom() > arena_height) {
    throw SpecError(name + ": target must start inside the arena");
  }
  for (const auto& o : occluders) {
    if (!o.box.valid()) throw SpecError(name + ": occluder box must have positive size");
  }
}

std::vector<BoundingBox> integrate_track(const TrackSpec& track, std::int64_t frames) {
  std::vector<BoundingBox> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(frames, 0)));
  BoundingBox box = track.initial;
  std::size_t seg = 0;
  double vx = 0.0, vy = 0.0;
  for (std::int64_t t = 0; t < frames; ++t) {
    out.push_back(box);
    while (seg < track.segments.size() && track.segments[seg].start_frame <= t) {
      vx = track.segments[seg].vx;
      vy = track.segments[seg].vy;
      ++seg;
    }
    box.cx += vx;
    box.cy += vy;
  }
  return out;
}

double covered_area(const BoundingBox& target, const std::vector<BoundingBox>& occluders) {
  // Coordinate compression over the target's extent; every cell is either
  // fully inside or fully outside each clipped occluder.
  std::vector<double> xs{target.left(), target.right()};
  std::vector<double> ys{target.top(), target.bottom()};
  std::vector<BoundingBox> clipped;
  for (const auto& o : occluders) {
    const double l = std::max(o.left(), target.left());
    const double r = std::min(o.right(), target.right());
    const double t = std::max(o.top(), target.top());
    const double b = std::min(o.bottom(), target.bottom());
    if (l >= r || t >= b) continue;
    clipped.push_back(BoundingBox::from_corners(l, t, r - l, b - t));
    xs.push_back(l);
    xs.push_back(r);
    ys.push_back(t);
    ys.push_back(b);
  }
  if (clipped.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  double covered = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double mx = 0.5 * (xs[i] + xs[i + 1]);
    for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
      const double my = 0.5 * (ys[k] + ys[k + 1]);
      const bool inside = std::any_of(clipped.begin(), clipped.end(), [&](const BoundingBox& c) {
        return mx > c.left() && mx < c.right() && my > c.top() && my < c.bottom();
      });
      if (inside) covered += (xs[i + 1] - xs[i]) * (ys[k + 1] - ys[k]);
    }
  }
  return covered;
}

double visibility(const BoundingBox& target, const std::vector<BoundingBox>& occluders) {
  return std::clamp(1.0 - covered_area(target, occluders) / target.area(), 0.0, 1.0);
}

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  Scenario sc;
  sc.spec = spec;
  sc.target = integrate_track(spec.target, spec.frames);
  for (const auto& d : spec.distractors) sc.distractors.push_back(integrate_track(d, spec.frames));
  std::vector<BoundingBox> occ;
  for (const auto& o : spec.occluders) occ.push_back(o.box);
  sc.visibility.reserve(sc.target.size());
  for (const auto& b : sc.target) sc.visibility.push_back(visibility(b, occ));
  return sc;
}

// ---------------------------------------------------------------------------
// Builtin suites

namespace {

constexpr std::int64_t kSuiteFrames = 100;
constexpr int kArena = 256;
constexpr int kPerProfile = 10;
constexpr std::array<const char*, 3> kProfiles{"day", "dusk", "night"};

struct Size {
  double along;
  double across;
};
// Vehicle footprints in pixels, long side along the direction of travel.
constexpr std::array<Size, 4> kSizes{{{12, 6}, {14, 8}, {16, 8}, {10, 6}}};
// Multiples of 1/4 keep every trajectory exact in binary floating point.
constexpr std::array<double, 3> kSpeeds{1.0, 1.5, 2.0};
constexpr std::array<double, 3> kDrifts{-0.25, 0.0, 0.25};

class Picker {
 public:
  explicit Picker(std::uint64_t seed) : rng_(seed) {}
  std::uint64_t pick(std::uint64_t n) { return rng_() % n; }
  double sign() { return pick(2) == 0 ? 1.0 : -1.0; }

 private:
  std::mt19937_64 rng_;
};

struct Motion {
  bool horizontal = true;
  double sign = 1.0;
  double speed = 2.0;
  double drift = 0.0;
  Size size{12, 6};

  double vx() const { return horizontal ? sign * speed : drift; }
  double vy() const { return horizontal ? drift : sign * speed; }
  double box_w() const { return horizontal ? size.along : size.across; }
  double box_h() const { return horizontal ? size.across : size.along; }
};

Motion random_motion(Picker& p, bool allow_drift) {
  Motion m;
  m.horizontal = p.pick(2) == 0;
  m.sign = p.sign();
  m.speed = kSpeeds[p.pick(kSpeeds.size())];
  m.drift = allow_drift ? kDrifts[p.pick(kDrifts.size())] : 0.0;
  m.size = kSizes[p.pick(kSizes.size())];
  return m;
}

// Track with constant velocity whose center sits at (cx, cy) on frame t_ref.
TrackSpec track_through(const Motion& m, double cx, double cy, std::int64_t t_ref) {
  TrackSpec t;
  const double t0 = static_cast<double>(t_ref);
  t.initial = {cx - m.vx() * t0, cy - m.vy() * t0, m.box_w(), m.box_h()};
  t.segments.push_back({0, m.vx(), m.vy()});
  return t;
}

BoundingBox hull(const std::vector<BoundingBox>& boxes, std::int64_t first, std::int64_t last) {
  double l = boxes[first].left(), r = boxes[first].right(), t = boxes[first].top(), b = boxes[first].bottom();
  for (std::int64_t i = first; i <= last; ++i) {
    l = std::min(l, boxes[i].left());
    r = std::max(r, boxes[i].right());
    t = std::min(t, boxes[i].top());
    b = std::max(b, boxes[i].bottom());
  }
  return BoundingBox::from_corners(l, t, r - l, b - t);
}

double center_offset(Picker& p) { return static_cast<double>(p.pick(21)) - 10.0; }

ScenarioSpec base_spec(const std::string& name, std::uint64_t seed) {
  ScenarioSpec s;
  s.name = name;
  s.frames = kSuiteFrames;
  s.arena_width = kArena;
  s.arena_height = kArena;
  s.seed = seed;
  return s;
}

ScenarioSpec linear_clear(Picker& p, const std::string& name, std::uint64_t seed) {
  ScenarioSpec s = base_spec(name, seed);
  const Motion m = random_motion(p, true);
  s.target = track_through(m, kArena / 2.0 + center_offset(p), kArena / 2.0 + center_offset(p), 50);
  return s;
}

// Full-height (or full-width) band covering the target exactly on frames 40-59.
ScenarioSpec occlusion_bridge(Picker& p, const std::string& name, std::uint64_t seed) {
  ScenarioSpec s = base_spec(name, seed);
  const Motion m = random_motion(p, true);
  s.target = track_through(m, kArena / 2.0 + center_offset(p), kArena / 2.0 + center_offset(p), 50);
  const auto path = integrate_track(s.target, s.frames);
  const BoundingBox h = hull(path, 40, 59);
  const BoundingBox band = m.horizontal ? BoundingBox::from_corners(h.left(), 0.0, h.w, kArena)
                                        : BoundingBox::from_corners(0.0, h.top(), kArena, h.h);
  s.occluders.push_back({band, OccluderKind::Full});
  return s;
}

// The target turns by 90 degrees at frame 50, under a block that hides it on
// frames 40-59. It enters and leaves through different sides.
ScenarioSpec turn_under_occlusion(Picker& p, const std::string& name, std::uint64_t seed) {
  ScenarioSpec s = base_spec(name, seed);
  Motion first = random_motion(p, false);
  Motion second = first;
  second.horizontal = !first.horizontal;
  second.sign = p.sign();
  const double turn_x = kArena / 2.0 + center_offset(p);
  const double turn_y = kArena / 2.0 + center_offset(p);
  // Size stays fixed through the turn; the target is rigid.
  const double w = first.box_w();
  const double h = first.box_h();
  s.target.initial = {turn_x - first.vx() * 50.0, turn_y - first.vy() * 50.0, w, h};
  const double v2x = second.horizontal ? second.sign * first.speed : 0.0;
  const double v2y = second.horizontal ? 0.0 : second.sign * first.speed;
  s.target.segments = {{0, first.vx(), first.vy()}, {50, v2x, v2y}};

  const auto path = integrate_track(s.target, s.frames);
  const BoundingBox hl = hull(path, 40, 59);
  double l = hl.left(), r = hl.right(), t = hl.top(), b = hl.bottom();
  constexpr double kMargin = 2.0;
  // Pad the two sides the target neither enters nor leaves through.
  const bool enter_left = first.horizontal && first.sign > 0;
  const bool enter_right = first.horizontal && first.sign < 0;
  const bool enter_top = !first.horizontal && first.sign > 0;
  const bool enter_bottom = !first.horizontal && first.sign < 0;
  const bool exit_right = v2x > 0, exit_left = v2x < 0, exit_bottom = v2y > 0, exit_top = v2y < 0;
  if (!enter_left && !exit_left) l -= kMargin;
  if (!enter_right && !exit_right) r += kMargin;
  if (!enter_top && !exit_top) t -= kMargin;
  if (!enter_bottom && !exit_bottom) b += kMargin;
  s.occluders.push_back({BoundingBox::from_corners(l, t, r - l, b - t), OccluderKind::Full});
  return s;
}

// A crossing vehicle on the perpendicular road and an oncoming one in the
// adjacent lane.
ScenarioSpec distractor_cross(Picker& p, const std::string& name, std::uint64_t seed, bool early) {
  ScenarioSpec s = base_spec(name, seed);
  const Motion m = random_motion(p, false);
  s.target = track_through(m, kArena / 2.0 + center_offset(p), kArena / 2.0 + center_offset(p), 50);
  const auto path = integrate_track(s.target, s.frames);

  const std::int64_t t_cross = early ? 6 + static_cast<std::int64_t>(p.pick(5))
                                     : 35 + static_cast<std::int64_t>(p.pick(30));
  Motion cross = random_motion(p, false);
  cross.horizontal = !m.horizontal;
  cross.size = m.size;
  s.distractors.push_back(track_through(cross, path[t_cross].cx, path[t_cross].cy, t_cross));

  const std::int64_t t_pass = 20 + static_cast<std::int64_t>(p.pick(60));
  Motion oncoming = m;
  oncoming.sign = -m.sign;
  oncoming.speed = kSpeeds[p.pick(kSpeeds.size())];
  const double lane = 2.0 * m.size.across * p.sign();
  const double cx = path[t_pass].cx + (m.horizontal ? 0.0 : lane);
  const double cy = path[t_pass].cy + (m.horizontal ? lane : 0.0);
  s.distractors.push_back(track_through(oncoming, cx, cy, t_pass));
  return s;
}

}  // namespace

std::vector<std::string> builtin_suite_names() {
  return {"linear_clear", "occlusion_bridge", "distractor_cross", "turn_under_occlusion"};
}

std::vector<Suite> builtin_suites() {
  std::vector<Suite> suites;
  const auto names = builtin_suite_names();
  for (std::size_t si = 0; si < names.size(); ++si) {
    Suite suite;
    suite.name = names[si];
    Picker p(0x5eedULL + 7919ULL * si);
    std::vector<ScenarioSpec> bases;
    for (int i = 0; i < kPerProfile; ++i) {
      const std::string base = suite.name + "_" + std::to_string(i);
      const std::uint64_t seed = 1000ULL * (si + 1) + static_cast<std::uint64_t>(i);
      if (suite.name == "linear_clear") {
        bases.push_back(linear_clear(p, base, seed));
      } else if (suite.name == "occlusion_bridge") {
        bases.push_back(occlusion_bridge(p, base, seed));
      } else if (suite.name == "distractor_cross") {
        bases.push_back(distractor_cross(p, base, seed, i % 2 == 0));
      } else {
        bases.push_back(turn_under_occlusion(p, base, seed));
      }
    }
    for (std::size_t pi = 0; pi < kProfiles.size(); ++pi) {
      for (int i = 0; i < kPerProfile; ++i) {
        SuiteEntry e;
        e.profile = kProfiles[pi];
        e.spec = bases[static_cast<std::size_t>(i)];
        e.spec.name = suite.name + "_" + e.profile + "_" + (i < 10 ? "0" : "") + std::to_string(i);
        e.spec.seed = bases[static_cast<std::size_t>(i)].seed * 10ULL + pi;
        e.name = e.spec.name;
        e.spec.validate();
        suite.entries.push_back(std::move(e));
      }
    }
    suites.push_back(std::move(suite));
  }
  return suites;
}

Suite builtin_suite(const std::string& name) {
  auto suites = builtin_suites();
  if (name == "all") {
    Suite all;
    all.name = "all";
    for (auto& s : suites) {
      for (auto& e : s.entries) all.entries.push_back(std::move(e));
    }
    return all;
  }
  for (auto& s : suites) {
    if (s.name == name) return std::move(s);
  }
  throw SpecError("unknown suite '" + name + "'");
}

// ---------------------------------------------------------------------------
// JSON and OTB

namespace {

nlohmann::json box_json(const BoundingBox& b) { return {b.cx, b.cy, b.w, b.h}; }

BoundingBox box_from(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 4) throw SpecError(std::string(what) + " must be [cx, cy, w, h]");
  BoundingBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  if (!b.valid()) throw SpecError(std::string(what) + " must have positive size");
  return b;
}

nlohmann::json track_json(const TrackSpec& t) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : t.segments) segs.push_back({s.start_frame, s.vx, s.vy});
  return {{"box", box_json(t.initial)}, {"segments", segs}};
}

TrackSpec track_from(const nlohmann::json& j, const char* what) {
  TrackSpec t;
  t.initial = box_from(j.at("box"), what);
  if (j.contains("segments")) {
    for (const auto& s : j.at("segments")) {
      if (!s.is_array() || s.size() != 3) throw SpecError("segments must be [start_frame, vx, vy]");
      t.segments.push_back({s[0].get<std::int64_t>(), s[1].get<double>(), s[2].get<double>()});
    }
  }
  return t;
}

}  // namespace

nlohmann::json spec_to_json(const ScenarioSpec& spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["frames"] = spec.frames;
  j["arena"] = {spec.arena_width, spec.arena_height};
  j["seed"] = spec.seed;
  j["target"] = track_json(spec.target);
  j["occluders"] = nlohmann::json::array();
  for (const auto& o : spec.occluders) {
    j["occluders"].push_back({{"box", box_json(o.box)}, {"kind", o.kind == OccluderKind::Full ? "full" : "partial"}});
  }
  j["distractors"] = nlohmann::json::array();
  for (const auto& d : spec.distractors) j["distractors"].push_back(track_json(d));
  return j;
}

ScenarioSpec spec_from_json(const nlohmann::json& j) {
  try {
    ScenarioSpec s;
    s.name = j.value("name", std::string("scenario"));
    s.frames = j.at("frames").get<std::int64_t>();
    if (j.contains("arena")) {
      const auto& a = j.at("arena");
      if (!a.is_array() || a.size() != 2) throw SpecError("arena must be [width, height]");
      s.arena_width = a[0].get<int>();
      s.arena_height = a[1].get<int>();
    }
    s.seed = j.value("seed", std::uint64_t{0});
    s.target = track_from(j.at("target"), "target box");
    for (const auto& o : j.value("occluders", nlohmann::json::array())) {
      Occluder occ;
      occ.box = box_from(o.at("box"), "occluder box");
      const std::string kind = o.value("kind", std::string("full"));
      if (kind == "full") {
        occ.kind = OccluderKind::Full;
      } else if (kind == "partial") {
        occ.kind = OccluderKind::Partial;
      } else {
        throw SpecError("occluder kind must be full or partial");
      }
      s.occluders.push_back(occ);
    }
    for (const auto& d : j.value("distractors", nlohmann::json::array())) {
      s.distractors.push_back(track_from(d, "distractor box"));
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("malformed scenario spec: ") + e.what());
  }
}

void write_otb(std::ostream& os, const std::vector<BoundingBox>& boxes) {
  for (const auto& b : boxes) {
    os << detail::format_double(b.left()) << ',' << detail::format_double(b.top()) << ','
       << detail::format_double(b.w) << ',' << detail::format_double(b.h) << '\n';
  }
}

std::vector<BoundingBox> read_otb(std::istream& is) {
  std::vector<BoundingBox> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::replace(line.begin(), line.end(), '\t', ',');
    std::array<double, 4> v{};
    std::size_t field = 0;
    std::size_t start = 0;
    while (field < 4) {
      const std::size_t comma = line.find(',', start);
      const auto token = std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                           : comma - start);
      const auto parsed = detail::parse_double(token);
      if (!parsed) throw SpecError("ground truth line " + std::to_string(lineno) + " is malformed");
      v[field++] = *parsed;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (field != 4) throw SpecError("ground truth line " + std::to_string(lineno) + " needs 4 fields");
    out.push_back(BoundingBox::from_corners(v[0], v[1], v[2], v[3]));
  }
  return out;
}

}  // namespace sattrack
