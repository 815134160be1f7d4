///////////////////////////////////////////////////////////////////////////////
// metrics.hpp: success-plot AUC, center-error precision and size-normalized
// precision over per-frame box sequences, plus per-tag aggregation.
//
// Success counts frames with IoU strictly above the threshold; both distance
// curves count errors at or below it.
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sattrack/geometry.hpp"

namespace sattrack {

inline constexpr int kSuccessPoints = 101;    // IoU thresholds 0, 0.01, ..., 1
inline constexpr int kPrecisionPoints = 51;   // 0, 1, ..., 50 px
inline constexpr int kNormPoints = 51;        // 0, 0.01, ..., 0.5

// All three throw LengthMismatch on unequal or empty sequences.
double success_auc(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt);
double precision_at(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt,
                    double threshold_px = 20.0);
double norm_precision(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt);

std::vector<double> success_curve(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt);
std::vector<double> precision_curve(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt);
std::vector<double> norm_precision_curve(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt);

struct EvalReport {
  std::string name;
  std::string tag;
  double auc = 0.0;
  double precision_at_20 = 0.0;
  double p_norm = 0.0;
  std::vector<double> success;
  std::vector<double> precision;
  std::vector<double> norm_precision;
  std::size_t frames = 0;
};

EvalReport evaluate(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt,
                    std::string name = {}, std::string tag = {});

nlohmann::json report_to_json(const EvalReport& r);

struct AggregateRow {
  std::string tag;
  double auc = 0.0;
  double p20 = 0.0;
  double pnorm = 0.0;
  std::size_t n_seq = 0;
  std::size_t n_frames = 0;
};

// Per-tag means in tag order. Independent of the order of the input reports.
// Throws EmptyGroup for empty input or a report without a tag.
std::vector<AggregateRow> aggregate(std::vector<EvalReport> reports);

// Header tag,auc,p20,pnorm,n_seq,n_frames.
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
nlohmann::json aggregate_json(const std::vector<AggregateRow>& rows);

}  // namespace sattrack
