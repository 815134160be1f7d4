#include "sattrack/observer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "sattrack/errors.hpp"

namespace sattrack {

void NoiseProfile::validate() const {
  const auto prob = [&](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1]");
  };
  const auto sigma = [&](double s, const char* what) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError(std::string(what) + " must be >= 0");
  };
  sigma(box_jitter_sigma, "box_jitter_sigma");
  sigma(affinity_sigma, "affinity_sigma");
  prob(drop_prob_visible, "drop_prob_visible");
  prob(spurious_prob, "spurious_prob");
  prob(min_visible, "min_visible");
  if (distractor_count < 0) throw ConfigError("distractor_count must be >= 0");
  if (!(distractor_radius >= 0.0)) throw ConfigError("distractor_radius must be >= 0");
  for (double m : {affinity_mean_visible, affinity_mean_occluded, affinity_mean_distractor, obj_offset}) {
    if (!std::isfinite(m)) throw ConfigError("affinity parameters must be finite");
  }
}

NoiseProfile NoiseProfile::preset(const std::string& name) {
  NoiseProfile p;
  p.name = name;
  if (name == "day") {
    p.box_jitter_sigma = 0.3;
    p.affinity_mean_visible = 0.85;
    p.affinity_mean_distractor = 0.30;
    p.affinity_sigma = 0.08;
    p.drop_prob_visible = 0.0;
  } else if (name == "dusk") {
    p.box_jitter_sigma = 0.5;
    p.affinity_mean_visible = 0.65;
    p.affinity_mean_distractor = 0.25;
    p.affinity_sigma = 0.10;
    p.drop_prob_visible = 0.02;
  } else if (name == "night") {
    p.box_jitter_sigma = 0.8;
    p.affinity_mean_visible = 0.45;
    p.affinity_mean_distractor = 0.18;
    p.affinity_sigma = 0.10;
    p.drop_prob_visible = 0.05;
  } else if (name == "zero") {
    p.box_jitter_sigma = 0.0;
    p.affinity_sigma = 0.0;
    p.drop_prob_visible = 0.0;
    p.spurious_prob = 0.0;
    p.distractor_count = 0;
  } else {
    throw ConfigError("unknown noise profile '" + name + "' (expected day, dusk, night or zero)");
  }
  return p;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hand-rolled distributions so the stream is identical across standard
// library implementations.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return p > 0.0 && uniform() < p; }
  double normal(double mean, double sigma) {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return sigma == 0.0 ? mean : mean + sigma * z;
  }

 private:
  std::mt19937_64 rng_;
};

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

BoundingBox jitter(const BoundingBox& b, double sigma, Stream& s) {
  BoundingBox out = b;
  out.cx = s.normal(b.cx, sigma);
  out.cy = s.normal(b.cy, sigma);
  out.w = std::max(1.0, s.normal(b.w, 0.5 * sigma));
  out.h = std::max(1.0, s.normal(b.h, 0.5 * sigma));
  return out;
}

struct OccluderSets {
  std::vector<BoundingBox> full;
  std::vector<BoundingBox> all;
};

OccluderSets split_occluders(const ScenarioSpec& spec) {
  OccluderSets s;
  for (const auto& o : spec.occluders) {
    if (o.kind == OccluderKind::Full) s.full.push_back(o.box);
    s.all.push_back(o.box);
  }
  return s;
}

// A rigid object is segmented whole as long as enough of it is exposed;
// partial cover only lowers the affinity.
std::optional<double> sight(const BoundingBox& gt, const OccluderSets& occ, double min_visible) {
  if (!(visibility(gt, occ.full) >= min_visible)) return std::nullopt;
  return visibility(gt, occ.all);
}

}  // namespace

MaskGrid rasterize(const BoundingBox& box, int width, int height) {
  const int x0 = std::max(0, static_cast<int>(std::ceil(box.left())));
  const int x1 = std::min(width - 1, static_cast<int>(std::ceil(box.right())) - 1);
  const int y0 = std::max(0, static_cast<int>(std::ceil(box.top())));
  const int y1 = std::min(height - 1, static_cast<int>(std::ceil(box.bottom())) - 1);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) px[static_cast<std::size_t>(y) * width + x] = 1;
  }
  return MaskGrid::from_pixels(width, height, px);
}

ObserverFrame observe_synthetic(const Scenario& scenario, std::int64_t frame_index, const NoiseProfile& profile,
                                std::uint64_t rng_seed, bool masks) {
  if (frame_index < 0 || frame_index >= scenario.frames()) {
    throw FrameOutOfRange("frame " + std::to_string(frame_index) + " outside [0, " +
                          std::to_string(scenario.frames()) + ")");
  }
  const auto f = static_cast<std::size_t>(frame_index);
  const std::uint64_t base =
      splitmix(splitmix(splitmix(rng_seed) ^ scenario.spec.seed) ^ static_cast<std::uint64_t>(frame_index));
  const auto stream = [&](std::uint64_t k) { return Stream(splitmix(base ^ splitmix(k + 1))); };

  const OccluderSets occ = split_occluders(scenario.spec);
  const BoundingBox& gt = scenario.target[f];

  std::vector<std::pair<BoundingBox, double>> raw;

  Stream ts = stream(0);
  const auto target = sight(gt, occ, profile.min_visible);
  // The prompted frame always yields the target.
  const bool dropped = ts.bernoulli(profile.drop_prob_visible) && frame_index != 0;
  if (target && !dropped) {
    const BoundingBox box = jitter(gt, profile.box_jitter_sigma, ts);
    const double s = clip01(ts.normal(profile.affinity_mean_visible, profile.affinity_sigma)) * *target;
    raw.emplace_back(box, s);
  }

  const double diag = std::hypot(gt.w, gt.h);
  int emitted = 0;
  for (std::size_t d = 0; d < scenario.distractors.size() && emitted < profile.distractor_count; ++d) {
    const BoundingBox& db = scenario.distractors[d][f];
    if (center_distance(db, gt) > profile.distractor_radius * diag) continue;
    const auto seen = sight(db, occ, profile.min_visible);
    if (!seen) continue;
    Stream ds = stream(1 + d);
    const BoundingBox box = jitter(db, profile.box_jitter_sigma, ds);
    const double s = clip01(ds.normal(profile.affinity_mean_distractor, profile.affinity_sigma)) * *seen;
    raw.emplace_back(box, s);
    ++emitted;
  }

  // With the target hidden the segmenter returns background somewhere else.
  if (!target) {
    Stream js = stream(0xfeed);
    if (js.bernoulli(profile.spurious_prob)) {
      const double r = js.uniform(1.5, 4.0) * diag;
      const double a = js.uniform(0.0, 2.0 * std::numbers::pi);
      const BoundingBox box{gt.cx + r * std::cos(a), gt.cy + r * std::sin(a), gt.w * js.uniform(0.6, 1.5),
                            gt.h * js.uniform(0.6, 1.5)};
      raw.emplace_back(box, clip01(js.normal(profile.affinity_mean_occluded, profile.affinity_sigma)));
    }
  }

  ObserverFrame out;
  out.frame_index = frame_index;
  for (const auto& [box, s] : raw) {
    if (out.candidates.size() == kMaxCandidates) break;
    CandidateMask c;
    if (masks) {
      MaskGrid grid = rasterize(box, scenario.spec.arena_width, scenario.spec.arena_height);
      try {
        c.stats = mask_stats(grid);
      } catch (const EmptyMask&) {
        continue;
      }
      c.mask = std::move(grid);
    } else {
      c.stats = box_stats(box);
    }
    c.s_sam = s;
    c.s_obj = std::max(0.0, s - profile.obj_offset);
    out.candidates.push_back(std::move(c));
  }
  return out;
}

SyntheticObserver::SyntheticObserver(Scenario scenario, NoiseProfile profile, std::uint64_t seed)
    : scenario_(std::move(scenario)), profile_(std::move(profile)), seed_(seed) {
  profile_.validate();
}

ObserverFrame SyntheticObserver::observe(std::int64_t frame_index, bool) {
  return observe_synthetic(scenario_, frame_index, profile_, seed_);
}

// ---------------------------------------------------------------------------
// Wire schema

namespace {

double number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) throw ProtocolError(std::string("'") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::vector<double> numbers(const nlohmann::json& j, const char* key, std::size_t n) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != n) {
    throw ProtocolError(std::string("'") + key + "' must be an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ProtocolError(std::string("'") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

nlohmann::json candidate_to_json(const CandidateMask& c) {
  const auto& b = c.stats.tight_box;
  nlohmann::json j = {{"bbox", {b.cx, b.cy, b.w, b.h}},
                      {"area", c.stats.area},
                      {"centroid", {c.stats.centroid.x, c.stats.centroid.y}},
                      {"s_sam", c.s_sam},
                      {"s_obj", c.s_obj}};
  if (c.mask) j["rle"] = c.mask->to_rle_string();
  return j;
}

CandidateMask candidate_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ProtocolError("candidate must be an object");
  CandidateMask c;
  const auto bbox = numbers(j, "bbox", 4);
  const auto centroid = numbers(j, "centroid", 2);
  c.stats.tight_box = {bbox[0], bbox[1], bbox[2], bbox[3]};
  c.stats.area = number(j, "area");
  c.stats.centroid = {centroid[0], centroid[1]};
  c.s_sam = number(j, "s_sam");
  c.s_obj = number(j, "s_obj");
  if (j.contains("rle") && !j.at("rle").is_null()) {
    if (!j.at("rle").is_string()) throw ProtocolError("'rle' must be a string");
    try {
      c.mask = MaskGrid::parse_rle(j.at("rle").get<std::string>());
    } catch (const InvalidMask& e) {
      throw ProtocolError(std::string("bad rle: ") + e.what());
    }
  }
  return c;
}

nlohmann::json transcript_to_json(const Transcript& t) {
  const auto& h = t.header;
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : t.frames) {
    nlohmann::json cands = nlohmann::json::array();
    for (const auto& c : f.candidates) cands.push_back(candidate_to_json(c));
    frames.push_back({{"index", f.frame_index}, {"candidates", cands}});
  }
  return {{"header",
           {{"width", h.width},
            {"height", h.height},
            {"prompt_box", {h.prompt_box.cx, h.prompt_box.cy, h.prompt_box.w, h.prompt_box.h}},
            {"sequence", h.sequence}}},
          {"frames", frames}};
}

Transcript transcript_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("header") || !j.contains("frames") || !j.at("frames").is_array()) {
    throw ProtocolError("transcript needs a header object and a frames array");
  }
  Transcript t;
  const auto& h = j.at("header");
  if (!h.is_object()) throw ProtocolError("transcript header must be an object");
  const auto width = number(h, "width");
  const auto height = number(h, "height");
  if (width < 1 || height < 1) throw ProtocolError("transcript dimensions must be positive");
  t.header.width = static_cast<int>(width);
  t.header.height = static_cast<int>(height);
  const auto pb = numbers(h, "prompt_box", 4);
  t.header.prompt_box = {pb[0], pb[1], pb[2], pb[3]};
  if (!t.header.prompt_box.valid()) throw ProtocolError("prompt_box must have positive size");
  if (h.contains("sequence") && h.at("sequence").is_string()) t.header.sequence = h.at("sequence").get<std::string>();

  for (const auto& fj : j.at("frames")) {
    if (!fj.is_object() || !fj.contains("index") || !fj.at("index").is_number_integer()) {
      throw ProtocolError("transcript frame needs an integer index");
    }
    ObserverFrame f;
    f.frame_index = fj.at("index").get<std::int64_t>();
    if (f.frame_index != static_cast<std::int64_t>(t.frames.size())) {
      throw ProtocolError("transcript frame indices must be contiguous from 0");
    }
    if (!fj.contains("candidates") || !fj.at("candidates").is_array()) {
      throw ProtocolError("transcript frame needs a candidates array");
    }
    for (const auto& cj : fj.at("candidates")) f.candidates.push_back(candidate_from_json(cj));
    validate_frame(f);
    t.frames.push_back(std::move(f));
  }
  return t;
}

ReplayObserver::ReplayObserver(Transcript transcript) : transcript_(std::move(transcript)) {}

ObserverFrame ReplayObserver::observe(std::int64_t frame_index, bool) {
  if (frame_index < 0 || frame_index >= static_cast<std::int64_t>(transcript_.frames.size())) {
    throw FrameOutOfRange("frame " + std::to_string(frame_index) + " not in transcript");
  }
  return transcript_.frames[static_cast<std::size_t>(frame_index)];
}

}  // namespace sattrack
