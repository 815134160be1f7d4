///////////////////////////////////////////////////////////////////////////////
// config.hpp: run configuration read from a TOML or JSON document. Every
// tracker hyperparameter is a named key; missing keys keep their defaults.
//
//   variant = "full"            seed = 0            out = "out"
//   [observer]  source = "synthetic" | "bridge:<command>", timeout_ms, profile
//   [observer.noise]  any NoiseProfile field (overrides the preset)
//   [mcsm]      tau_h, tau_m, tau_kf, T_f, T_m, recovery_gate
//   [motion]    alpha_kf, deform_lo, deform_hi, d_max
//   [memory]    tau_mask, tau_obj, tau_kf, capacity
//   [kalman]    dt, process (9), measurement (4), initial (9)
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sattrack/observer.hpp"
#include "sattrack/tracker.hpp"

namespace sattrack {

struct ObserverSource {
  // "synthetic" or "bridge:<command>".
  std::string spec = "synthetic";
  int timeout_ms = 10000;
  // Forces one noise preset for every sequence; otherwise each suite entry
  // uses its own.
  std::optional<std::string> profile;
  // Field overrides applied on top of the preset.
  nlohmann::json noise = nlohmann::json::object();

  bool is_bridge() const;
  std::string bridge_command() const;
  // Preset for a sequence after profile forcing and field overrides.
  NoiseProfile resolve_profile(const std::string& entry_profile) const;
};

struct RunConfig {
  TrackerConfig tracker;
  ObserverSource observer;
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  // Throws ConfigError.
  void validate() const;
};

// Throws ConfigError on unknown keys, wrong types or out-of-range values.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

// Parser chosen by extension: .toml or .json.
RunConfig load_config(const std::string& path);

// Applies a sweepable hyperparameter (alpha_kf or tau_h) to a tracker config.
// Throws ConfigError for unknown names.
void set_parameter(TrackerConfig& c, const std::string& name, double value);

}  // namespace sattrack
