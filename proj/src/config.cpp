#include "sattrack/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "sattrack/errors.hpp"

namespace sattrack {

namespace {

constexpr std::string_view kBridgePrefix = "bridge:";

void only_keys(const nlohmann::json& j, const std::string& section, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError("[" + section + "] must be a table");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in [" + section + "]");
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!j.at(key).is_number()) throw ConfigError("");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!j.at(key).is_boolean()) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!j.at(key).is_number_integer()) throw ConfigError("");
    } else {
      if (!j.at(key).is_string()) throw ConfigError("");
    }
    out = j.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError("key '" + std::string(key) + "' in [" + section + "] has the wrong type");
  }
}

template <std::size_t N>
void read_array(const nlohmann::json& j, const char* key, std::array<double, N>& out, const std::string& section) {
  if (!j.contains(key)) return;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != N) {
    throw ConfigError("key '" + std::string(key) + "' in [" + section + "] must hold " + std::to_string(N) +
                      " numbers");
  }
  for (std::size_t i = 0; i < N; ++i) {
    if (!a[i].is_number()) throw ConfigError("key '" + std::string(key) + "' must hold numbers");
    out[i] = a[i].get<double>();
  }
}

void apply_noise(NoiseProfile& p, const nlohmann::json& j) {
  only_keys(j, "observer.noise",
            {"box_jitter_sigma", "affinity_mean_visible", "affinity_mean_occluded", "affinity_mean_distractor",
             "affinity_sigma", "distractor_count", "drop_prob_visible", "spurious_prob", "min_visible",
             "distractor_radius", "obj_offset"});
  const std::string s = "observer.noise";
  read(j, "box_jitter_sigma", p.box_jitter_sigma, s);
  read(j, "affinity_mean_visible", p.affinity_mean_visible, s);
  read(j, "affinity_mean_occluded", p.affinity_mean_occluded, s);
  read(j, "affinity_mean_distractor", p.affinity_mean_distractor, s);
  read(j, "affinity_sigma", p.affinity_sigma, s);
  read(j, "distractor_count", p.distractor_count, s);
  read(j, "drop_prob_visible", p.drop_prob_visible, s);
  read(j, "spurious_prob", p.spurious_prob, s);
  read(j, "min_visible", p.min_visible, s);
  read(j, "distractor_radius", p.distractor_radius, s);
  read(j, "obj_offset", p.obj_offset, s);
}

nlohmann::json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
    return out;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& v : *a) out.push_back(toml_to_json(v));
    return out;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  throw ConfigError("dates and times are not valid configuration values");
}

}  // namespace

bool ObserverSource::is_bridge() const { return spec.rfind(kBridgePrefix, 0) == 0; }

std::string ObserverSource::bridge_command() const {
  return is_bridge() ? spec.substr(kBridgePrefix.size()) : std::string();
}

NoiseProfile ObserverSource::resolve_profile(const std::string& entry_profile) const {
  NoiseProfile p = NoiseProfile::preset(profile.value_or(entry_profile));
  apply_noise(p, noise);
  p.validate();
  return p;
}

void RunConfig::validate() const {
  tracker.validate();
  if (observer.spec != "synthetic" && !observer.is_bridge()) {
    throw ConfigError("observer must be 'synthetic' or 'bridge:<command>', got '" + observer.spec + "'");
  }
  if (observer.is_bridge() && observer.bridge_command().empty()) throw ConfigError("bridge command is empty");
  if (observer.timeout_ms <= 0) throw ConfigError("observer timeout_ms must be positive");
  observer.resolve_profile(observer.profile.value_or("day"));
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  only_keys(j, "root", {"variant", "seed", "out", "observer", "mcsm", "motion", "memory", "kalman"});
  std::string variant = std::string(variant_name(c.tracker.variant));
  read(j, "variant", variant, "root");
  c.tracker.variant = parse_variant(variant);
  read(j, "seed", c.seed, "root");
  read(j, "out", c.out_dir, "root");

  if (j.contains("observer")) {
    const auto& o = j.at("observer");
    only_keys(o, "observer", {"source", "timeout_ms", "profile", "noise"});
    read(o, "source", c.observer.spec, "observer");
    read(o, "timeout_ms", c.observer.timeout_ms, "observer");
    if (o.contains("profile")) {
      std::string p;
      read(o, "profile", p, "observer");
      c.observer.profile = p;
    }
    if (o.contains("noise")) {
      NoiseProfile probe;
      apply_noise(probe, o.at("noise"));
      c.observer.noise = o.at("noise");
    }
  }
  if (j.contains("mcsm")) {
    const auto& m = j.at("mcsm");
    only_keys(m, "mcsm", {"tau_h", "tau_m", "tau_kf", "T_f", "T_m", "recovery_gate"});
    read(m, "tau_h", c.tracker.mcsm.tau_h, "mcsm");
    read(m, "tau_m", c.tracker.mcsm.tau_m, "mcsm");
    read(m, "tau_kf", c.tracker.mcsm.tau_kf, "mcsm");
    read(m, "T_f", c.tracker.mcsm.T_f, "mcsm");
    read(m, "T_m", c.tracker.mcsm.T_m, "mcsm");
    read(m, "recovery_gate", c.tracker.mcsm.recovery_gate, "mcsm");
  }
  if (j.contains("motion")) {
    const auto& m = j.at("motion");
    only_keys(m, "motion", {"alpha_kf", "deform_lo", "deform_hi", "d_max"});
    read(m, "alpha_kf", c.tracker.motion.alpha_kf, "motion");
    read(m, "deform_lo", c.tracker.motion.deform_lo, "motion");
    read(m, "deform_hi", c.tracker.motion.deform_hi, "motion");
    if (m.contains("d_max")) {
      double d = 0.0;
      read(m, "d_max", d, "motion");
      c.tracker.d_max = d;
    }
  }
  if (j.contains("memory")) {
    const auto& m = j.at("memory");
    only_keys(m, "memory", {"tau_mask", "tau_obj", "tau_kf", "capacity"});
    read(m, "tau_mask", c.tracker.gate.tau_mask, "memory");
    read(m, "tau_obj", c.tracker.gate.tau_obj, "memory");
    read(m, "tau_kf", c.tracker.gate.tau_kf, "memory");
    read(m, "capacity", c.tracker.memory_capacity, "memory");
  }
  if (j.contains("kalman")) {
    const auto& k = j.at("kalman");
    only_keys(k, "kalman", {"dt", "process", "measurement", "initial"});
    read(k, "dt", c.tracker.dt, "kalman");
    read_array(k, "process", c.tracker.noise.process, "kalman");
    read_array(k, "measurement", c.tracker.noise.measurement, "kalman");
    read_array(k, "initial", c.tracker.noise.initial, "kalman");
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
  const auto& t = c.tracker;
  nlohmann::json j;
  j["variant"] = std::string(variant_name(t.variant));
  j["seed"] = c.seed;
  j["out"] = c.out_dir;
  j["observer"] = {{"source", c.observer.spec}, {"timeout_ms", c.observer.timeout_ms}, {"noise", c.observer.noise}};
  if (c.observer.profile) j["observer"]["profile"] = *c.observer.profile;
  j["mcsm"] = {{"tau_h", t.mcsm.tau_h},   {"tau_m", t.mcsm.tau_m}, {"tau_kf", t.mcsm.tau_kf},
               {"T_f", t.mcsm.T_f},       {"T_m", t.mcsm.T_m},     {"recovery_gate", t.mcsm.recovery_gate}};
  j["motion"] = {{"alpha_kf", t.motion.alpha_kf}, {"deform_lo", t.motion.deform_lo}, {"deform_hi", t.motion.deform_hi}};
  if (t.d_max) j["motion"]["d_max"] = *t.d_max;
  j["memory"] = {{"tau_mask", t.gate.tau_mask},
                 {"tau_obj", t.gate.tau_obj},
                 {"tau_kf", t.gate.tau_kf},
                 {"capacity", t.memory_capacity}};
  j["kalman"] = {{"dt", t.dt},
                 {"process", t.noise.process},
                 {"measurement", t.noise.measurement},
                 {"initial", t.noise.initial}};
  return j;
}

RunConfig load_config(const std::string& path) {
  const auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
  };
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  if (ends_with(".toml")) {
    try {
      j = toml_to_json(toml::parse(ss.str(), path));
    } catch (const toml::parse_error& e) {
      std::ostringstream msg;
      msg << path << ':' << e.source().begin.line << ": " << e.description();
      throw ConfigError(msg.str());
    }
  } else if (ends_with(".json")) {
    j = nlohmann::json::parse(ss.str(), nullptr, false);
    if (j.is_discarded()) throw ConfigError("'" + path + "' is not valid JSON");
  } else {
    throw ConfigError("config '" + path + "' must end in .toml or .json");
  }
  return config_from_json(j);
}

void set_parameter(TrackerConfig& c, const std::string& name, double value) {
  if (name == "alpha_kf") {
    c.motion.alpha_kf = value;
  } else if (name == "tau_h") {
    c.mcsm.tau_h = value;
  } else {
    throw ConfigError("unknown sweep parameter '" + name + "' (expected alpha_kf or tau_h)");
  }
}

}  // namespace sattrack
