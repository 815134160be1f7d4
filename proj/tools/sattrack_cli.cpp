// sattrack: command-line front end.
//
//   sattrack simulate --suite occlusion_bridge --out data
//   sattrack track    --spec data/occlusion_bridge_day_00/spec.json --variant full --out runs
//   sattrack eval     --results runs/occlusion_bridge_day_00.csv --gt data/occlusion_bridge_day_00/gt.txt
//   sattrack ablate   --suite all --out runs
//   sattrack sweep    --param alpha_kf --values 0,0.1,0.2 --suite distractor_cross --out runs
//
// MCSM_LOG sets the log level (trace, debug, info, warn, error, off).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sattrack/config.hpp"
#include "sattrack/errors.hpp"
#include "sattrack/metrics.hpp"
#include "sattrack/observer.hpp"
#include "sattrack/results.hpp"
#include "sattrack/runner.hpp"
#include "sattrack/simulator.hpp"

namespace fs = std::filesystem;
using namespace sattrack;

namespace {

struct Common {
  std::string config;
  std::string suite;
  std::string variant;
  std::string observer;
  std::string out;
  std::string profile;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "TOML or JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--suite", c.suite, "builtin suite name, or 'all'");
  app->add_option("--variant", c.variant, "full, no_kfcmm, no_mcsm or no_rs");
  app->add_option("--observer", c.observer, "synthetic or bridge:<command>");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--profile", c.profile, "force a noise preset (day, dusk, night, zero)");
  app->add_option_function<std::uint64_t>(
      "--seed", [&c](std::uint64_t s) { c.seed = s; c.seed_set = true; }, "observer seed");
}

RunConfig resolve(const Common& c) {
  RunConfig rc = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (!c.variant.empty()) rc.tracker.variant = parse_variant(c.variant);
  if (!c.observer.empty()) rc.observer.spec = c.observer;
  if (!c.out.empty()) rc.out_dir = c.out;
  if (!c.profile.empty()) rc.observer.profile = c.profile;
  if (c.seed_set) rc.seed = c.seed;
  rc.validate();
  return rc;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  os << text;
}

std::vector<SuiteEntry> entries_for(const std::string& spec_path, const std::string& suite) {
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw SpecError("cannot open spec '" + spec_path + "'");
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw SpecError("'" + spec_path + "' is not valid JSON");
    SuiteEntry e;
    e.spec = spec_from_json(j);
    e.name = e.spec.name;
    e.profile = j.value("profile", std::string("day"));
    return {e};
  }
  if (suite.empty()) throw ConfigError("give --spec or --suite");
  return builtin_suite(suite).entries;
}

int cmd_simulate(const Common& c, const std::string& spec_path) {
  const RunConfig rc = resolve(c);
  for (const auto& e : entries_for(spec_path, c.suite)) {
    const Scenario sc = generate(e.spec);
    const fs::path dir = fs::path(rc.out_dir) / e.name;
    nlohmann::json spec = spec_to_json(e.spec);
    spec["profile"] = e.profile;
    write_file(dir / "spec.json", spec.dump(2) + "\n");
    std::ostringstream gt;
    write_otb(gt, sc.target);
    write_file(dir / "gt.txt", gt.str());

    Transcript t;
    t.header = {e.spec.arena_width, e.spec.arena_height, sc.target.front(), e.name};
    const NoiseProfile profile = rc.observer.resolve_profile(e.profile);
    for (std::int64_t f = 0; f < sc.frames(); ++f) t.frames.push_back(observe_synthetic(sc, f, profile, rc.seed));
    write_file(dir / "transcript.json", transcript_to_json(t).dump() + "\n");
    spdlog::info("wrote {}", dir.string());
  }
  return 0;
}

BoundingBox parse_box(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
  if (v.size() != 4) throw ConfigError("--prompt needs cx,cy,w,h");
  return {v[0], v[1], v[2], v[3]};
}

int track_one(const RunConfig& rc, Observer& obs, const BoundingBox& prompt, std::int64_t frames,
              const fs::path& csv_path) {
  fs::create_directories(csv_path.parent_path().empty() ? fs::path(".") : csv_path.parent_path());
  std::ofstream os(csv_path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + csv_path.string() + "'");
  write_results_header(os);
  const RunOutcome out = run_tracker(obs, prompt, frames, rc.tracker, [&](const FrameResult& r) {
    write_result_row(os, r);
  });
  if (out.error) {
    write_truncation_marker(os, out.failed_frame, *out.error);
    std::cerr << csv_path.string() << ": stopped at frame " << out.failed_frame << ": " << *out.error << '\n';
    return 1;
  }
  return 0;
}

int cmd_track(const Common& c, const std::string& spec_path, const std::string& results_path,
              const std::string& prompt_text, std::int64_t frames) {
  const RunConfig rc = resolve(c);
  if (rc.observer.is_bridge()) {
    TranscriptHeader header;
    BoundingBox prompt;
    std::int64_t n = frames;
    std::string name = "bridge";
    if (!spec_path.empty()) {
      const auto e = entries_for(spec_path, "").front();
      const Scenario sc = generate(e.spec);
      prompt = sc.target.front();
      header = {e.spec.arena_width, e.spec.arena_height, prompt, e.name};
      if (n <= 0) n = sc.frames();
      name = e.name;
    } else {
      if (prompt_text.empty() || n <= 0) throw ConfigError("bridge runs need --spec, or --prompt and --frames");
      prompt = parse_box(prompt_text);
      header.prompt_box = prompt;
      header.sequence = name;
    }
    const fs::path csv = results_path.empty() ? fs::path(rc.out_dir) / (name + ".csv") : fs::path(results_path);
    try {
      BridgeObserver obs({rc.observer.bridge_command(), rc.observer.timeout_ms}, header);
      return track_one(rc, obs, prompt, n, csv);
    } catch (const Error& e) {
      // Handshake failure: no frame was processed.
      std::ofstream os(csv, std::ios::binary);
      write_results_header(os);
      write_truncation_marker(os, 0, e.what());
      std::cerr << e.what() << '\n';
      return 1;
    }
  }
  const auto entries = entries_for(spec_path, c.suite);
  int status = 0;
  for (const auto& e : entries) {
    const Scenario sc = generate(e.spec);
    SyntheticObserver obs(sc, rc.observer.resolve_profile(e.profile), rc.seed);
    const fs::path csv = results_path.empty() || entries.size() > 1 ? fs::path(rc.out_dir) / (e.name + ".csv")
                                                                     : fs::path(results_path);
    const std::int64_t n = frames > 0 ? std::min(frames, sc.frames()) : sc.frames();
    status |= track_one(rc, obs, sc.target.front(), n, csv);
  }
  return status;
}

int cmd_eval(const std::string& results_path, const std::string& gt_path, const std::string& out) {
  std::ifstream rin(results_path);
  if (!rin) throw ConfigError("cannot open results '" + results_path + "'");
  const ResultsFile res = read_results(rin);
  std::ifstream gin(gt_path);
  if (!gin) throw ConfigError("cannot open ground truth '" + gt_path + "'");
  const auto gt = read_otb(gin);
  std::vector<BoundingBox> pred;
  for (const auto& r : res.rows) pred.push_back(r.out_box);
  const EvalReport rep = evaluate(pred, gt, fs::path(results_path).stem().string(), "all");
  const std::string text = report_to_json(rep).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return res.truncation ? 1 : 0;
}

int cmd_ablate(const Common& c) {
  const RunConfig rc = resolve(c);
  const Suite suite = builtin_suite(c.suite.empty() ? "all" : c.suite);
  const auto rows = ablate(suite, rc.tracker, rc.observer, rc.seed);
  const std::string csv = ablation_csv(rows);
  write_file(fs::path(rc.out_dir) / "ablation.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_sweep(const Common& c, const std::string& param, const std::vector<double>& values) {
  const RunConfig rc = resolve(c);
  const Suite suite = builtin_suite(c.suite.empty() ? "distractor_cross" : c.suite);
  const auto rows = sweep(param, values, suite, rc.tracker, rc.observer, rc.seed);
  const std::string csv = sweep_csv(rows);
  write_file(fs::path(rc.out_dir) / ("sweep_" + param + ".csv"), csv);
  std::cout << csv;
  for (const auto& r : rows) {
    if (!r.error.empty()) return 1;
  }
  return 0;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("sattrack");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("MCSM_LOG")) spdlog::cfg::helpers::load_levels(env);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Satellite video single-object tracker: Kalman motion model and tracking state machine"};
  app.require_subcommand(1);

  Common common;
  std::string spec_path, results_path, gt_path, prompt, eval_out, param;
  std::int64_t frames = 0;
  std::vector<double> values;

  auto* sim = app.add_subcommand("simulate", "write scenario spec, ground truth and synthetic transcript");
  add_common(sim, common);
  sim->add_option("--spec", spec_path, "scenario spec JSON")->check(CLI::ExistingFile);

  auto* trk = app.add_subcommand("track", "run the tracker and write a results CSV");
  add_common(trk, common);
  trk->add_option("--spec", spec_path, "scenario spec JSON")->check(CLI::ExistingFile);
  trk->add_option("--results", results_path, "results CSV path for a single sequence");
  trk->add_option("--prompt", prompt, "first-frame box cx,cy,w,h (bridge runs without --spec)");
  trk->add_option("--frames", frames, "number of frames to process");

  auto* ev = app.add_subcommand("eval", "score a results CSV against OTB-style ground truth");
  ev->add_option("--results", results_path, "results CSV")->required()->check(CLI::ExistingFile);
  ev->add_option("--gt", gt_path, "ground truth, one left,top,w,h line per frame")->required()->check(CLI::ExistingFile);
  ev->add_option("--out", eval_out, "report JSON path (default: stdout)");

  auto* abl = app.add_subcommand("ablate", "run all four variants over a suite");
  add_common(abl, common);

  auto* swp = app.add_subcommand("sweep", "sweep one hyperparameter over a suite");
  add_common(swp, common);
  swp->add_option("--param", param, "alpha_kf or tau_h")->required();
  swp->add_option("--values", values, "comma-separated values")->required()->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(common, spec_path);
    if (*trk) return cmd_track(common, spec_path, results_path, prompt, frames);
    if (*ev) return cmd_eval(results_path, gt_path, eval_out);
    if (*abl) return cmd_ablate(common);
    if (*swp) return cmd_sweep(common, param, values);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
