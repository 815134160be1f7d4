#include "sattrack/runner.hpp"

#include <cmath>
#include <sstream>

#include <spdlog/spdlog.h>

#include "numfmt.hpp"
#include "sattrack/errors.hpp"

namespace sattrack {

RunOutcome run_tracker(Observer& observer, const BoundingBox& prompt, std::int64_t frames,
                       const TrackerConfig& config, const FrameSink& sink) {
  RunOutcome out;
  Tracker tracker(config, prompt);
  bool admit_prev = false;
  double s0 = 0.0;
  for (std::int64_t t = 0; t < frames; ++t) {
    try {
      const ObserverFrame frame = observer.observe(t, admit_prev);
      const Phase before = tracker.phase().phase;
      const FrameResult r = tracker.process(frame);
      if (t == 0) s0 = tracker.filter()->mean(kAreaIndex);
      out.s_drift = std::max(out.s_drift, std::abs(tracker.filter()->mean(kAreaIndex) - s0));
      if (r.phase != before) {
        spdlog::debug("frame {}: {} -> {}", t, phase_name(before), phase_name(r.phase));
      }
      spdlog::trace("frame {}: selected {} s_sam {} s_kf {} admit {}", t, r.selected, r.s_sam, r.s_kf, r.mem_admit);
      admit_prev = r.mem_admit;
      out.results.push_back(r);
      if (sink) sink(r);
    } catch (const std::exception& e) {
      out.error = e.what();
      out.failed_frame = t;
      spdlog::error("frame {}: {}", t, e.what());
      return out;
    }
  }
  try {
    observer.close();
  } catch (const std::exception& e) {
    out.error = e.what();
    out.failed_frame = frames;
  }
  return out;
}

SequenceRun run_sequence(const SuiteEntry& entry, const TrackerConfig& config, const ObserverSource& source,
                         std::uint64_t seed) {
  SequenceRun run;
  run.name = entry.name;
  run.profile = entry.profile;
  const Scenario sc = generate(entry.spec);
  run.gt = sc.target;
  run.visibility = sc.visibility;
  SyntheticObserver obs(sc, source.resolve_profile(entry.profile), seed);
  run.outcome = run_tracker(obs, sc.target.front(), sc.frames(), config);

  // Frames the run never reached are scored with an empty box.
  std::vector<BoundingBox> pred;
  pred.reserve(run.gt.size());
  for (const auto& r : run.outcome.results) pred.push_back(r.out_box);
  while (pred.size() < run.gt.size()) pred.push_back({-1e6, -1e6, 1.0, 1.0});
  run.report = evaluate(pred, run.gt, run.name, entry.profile);
  return run;
}

std::vector<SequenceRun> run_suite(const Suite& suite, const TrackerConfig& config, const ObserverSource& source,
                                   std::uint64_t seed) {
  std::vector<SequenceRun> runs;
  runs.reserve(suite.entries.size());
  for (const auto& e : suite.entries) runs.push_back(run_sequence(e, config, source, seed));
  return runs;
}

double mean_auc(const std::vector<SequenceRun>& runs) {
  if (runs.empty()) throw EmptyGroup("no runs");
  double s = 0.0;
  for (const auto& r : runs) s += r.report.auc;
  return s / static_cast<double>(runs.size());
}

double mean_precision(const std::vector<SequenceRun>& runs) {
  if (runs.empty()) throw EmptyGroup("no runs");
  double s = 0.0;
  for (const auto& r : runs) s += r.report.precision_at_20;
  return s / static_cast<double>(runs.size());
}

std::vector<AblationRow> ablate(const Suite& suite, const TrackerConfig& base, const ObserverSource& source,
                                std::uint64_t seed) {
  std::vector<AblationRow> rows;
  for (Variant v : {Variant::Full, Variant::NoKfcmm, Variant::NoMcsm, Variant::NoRs}) {
    TrackerConfig cfg = base;
    cfg.variant = v;
    const auto runs = run_suite(suite, cfg, source, seed);
    std::vector<EvalReport> reports;
    AblationRow row;
    row.variant = v;
    for (const auto& r : runs) {
      EvalReport rep = r.report;
      rep.tag = std::string(variant_name(v));
      reports.push_back(std::move(rep));
      row.s_drift = std::max(row.s_drift, r.outcome.s_drift);
      row.failures += r.outcome.error ? 1 : 0;
    }
    row.metrics = aggregate(reports).front();
    spdlog::info("{}: auc {:.4f} p20 {:.4f} over {} sequences", row.metrics.tag, row.metrics.auc, row.metrics.p20,
                 row.metrics.n_seq);
    rows.push_back(row);
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "variant,auc,p20,pnorm,n_seq,n_frames\n";
  for (const auto& r : rows) {
    os << variant_name(r.variant) << ',' << detail::format_double(r.metrics.auc) << ','
       << detail::format_double(r.metrics.p20) << ',' << detail::format_double(r.metrics.pnorm) << ','
       << r.metrics.n_seq << ',' << r.metrics.n_frames << '\n';
  }
  return os.str();
}

std::vector<SweepRow> sweep(const std::string& parameter, const std::vector<double>& values, const Suite& suite,
                            const TrackerConfig& base, const ObserverSource& source, std::uint64_t seed) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  {
    TrackerConfig probe = base;
    set_parameter(probe, parameter, values.front());
  }
  std::vector<SweepRow> rows;
  for (double v : values) {
    SweepRow row;
    row.value = v;
    TrackerConfig cfg = base;
    set_parameter(cfg, parameter, v);
    try {
      cfg.validate();
      const auto runs = run_suite(suite, cfg, source, seed);
      row.auc = mean_auc(runs);
      row.p20 = mean_precision(runs);
      row.n_seq = runs.size();
      for (const auto& r : runs) {
        if (r.outcome.error && row.error.empty()) row.error = r.name + ": " + *r.outcome.error;
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    spdlog::info("{} = {}: auc {:.4f} p20 {:.4f}", parameter, v, row.auc, row.p20);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "value,auc,p20,n_seq,error\n";
  for (const auto& r : rows) {
    std::string err = r.error;
    for (char& c : err) {
      if (c == ',' || c == '\n' || c == '"') c = ' ';
    }
    os << detail::format_double(r.value) << ',' << detail::format_double(r.auc) << ','
       << detail::format_double(r.p20) << ',' << r.n_seq << ',' << err << '\n';
  }
  return os.str();
}

}  // namespace sattrack
