///////////////////////////////////////////////////////////////////////////////
// runner.hpp: drives a tracker over an observer, and runs suites, ablations
// and parameter sweeps on the builtin scenarios.
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sattrack/config.hpp"
#include "sattrack/metrics.hpp"
#include "sattrack/observer.hpp"
#include "sattrack/simulator.hpp"
#include "sattrack/tracker.hpp"

namespace sattrack {

struct RunOutcome {
  std::vector<FrameResult> results;
  // Set when the run stopped early; results hold the frames before it.
  std::optional<std::string> error;
  std::int64_t failed_frame = -1;
  // Largest |S - S_initial| over the run.
  double s_drift = 0.0;
};

using FrameSink = std::function<void(const FrameResult&)>;

// Observer and tracker errors stop the run and are reported with the frame
// index; nothing is thrown.
RunOutcome run_tracker(Observer& observer, const BoundingBox& prompt, std::int64_t frames,
                       const TrackerConfig& config, const FrameSink& sink = {});

struct SequenceRun {
  std::string name;
  std::string profile;
  RunOutcome outcome;
  std::vector<BoundingBox> gt;
  std::vector<double> visibility;
  EvalReport report;  // over every frame; missing frames count as misses
};

// Synthetic observer over one suite entry. The prompt is the first
// ground-truth box.
SequenceRun run_sequence(const SuiteEntry& entry, const TrackerConfig& config, const ObserverSource& source,
                         std::uint64_t seed);

std::vector<SequenceRun> run_suite(const Suite& suite, const TrackerConfig& config, const ObserverSource& source,
                                   std::uint64_t seed);

double mean_auc(const std::vector<SequenceRun>& runs);
double mean_precision(const std::vector<SequenceRun>& runs);

struct AblationRow {
  Variant variant = Variant::Full;
  AggregateRow metrics;
  double s_drift = 0.0;
  std::size_t failures = 0;
};

// Runs all four variants.
std::vector<AblationRow> ablate(const Suite& suite, const TrackerConfig& base, const ObserverSource& source,
                                std::uint64_t seed);
// Columns variant,auc,p20,pnorm,n_seq,n_frames.
std::string ablation_csv(const std::vector<AblationRow>& rows);

struct SweepRow {
  double value = 0.0;
  double auc = 0.0;
  double p20 = 0.0;
  std::size_t n_seq = 0;
  std::string error;  // empty when every sequence ran
};

// Throws ConfigError for an unknown parameter or an empty value list. A value
// the config rejects is recorded in its row instead.
std::vector<SweepRow> sweep(const std::string& parameter, const std::vector<double>& values, const Suite& suite,
                            const TrackerConfig& base, const ObserverSource& source, std::uint64_t seed);
// Columns value,auc,p20,n_seq,error.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace sattrack
