#include "sattrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include "numfmt.hpp"
#include "sattrack/errors.hpp"

namespace sattrack {

namespace {

void check(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt) {
  if (pred.size() != gt.size()) {
    throw LengthMismatch(std::to_string(pred.size()) + " predictions vs " + std::to_string(gt.size()) +
                         " ground-truth boxes");
  }
  if (pred.empty()) throw LengthMismatch("sequences are empty");
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Fraction of values at or below each threshold i * step, i = 0..points-1.
std::vector<double> at_or_below(const std::vector<double>& errors, int points, double step) {
  std::vector<double> curve(static_cast<std::size_t>(points), 0.0);
  for (int i = 0; i < points; ++i) {
    const double t = i * step;
    std::size_t hit = 0;
    for (double e : errors) hit += e <= t ? 1 : 0;
    curve[static_cast<std::size_t>(i)] = static_cast<double>(hit) / static_cast<double>(errors.size());
  }
  return curve;
}

double norm_error(const BoundingBox& p, const BoundingBox& g) {
  return std::hypot((p.cx - g.cx) / g.w, (p.cy - g.cy) / g.h);
}

}  // namespace

std::vector<double> success_curve(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt) {
  check(pred, gt);
  std::vector<double> overlaps(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) overlaps[i] = iou(pred[i], gt[i]);
  std::vector<double> curve(kSuccessPoints, 0.0);
  for (int k = 0; k < kSuccessPoints; ++k) {
    const double theta = k / 100.0;
    std::size_t hit = 0;
    for (double o : overlaps) hit += o > theta ? 1 : 0;
    curve[static_cast<std::size_t>(k)] = static_cast<double>(hit) / static_cast<double>(overlaps.size());
  }
  return curve;
}

std::vector<double> precision_curve(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt) {
  check(pred, gt);
  std::vector<double> err(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) err[i] = center_distance(pred[i], gt[i]);
  return at_or_below(err, kPrecisionPoints, 1.0);
}

std::vector<double> norm_precision_curve(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt) {
  check(pred, gt);
  std::vector<double> err(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    require_valid(gt[i]);
    err[i] = norm_error(pred[i], gt[i]);
  }
  std::vector<double> curve(kNormPoints, 0.0);
  for (int k = 0; k < kNormPoints; ++k) {
    const double t = k / 100.0;
    std::size_t hit = 0;
    for (double e : err) hit += e <= t ? 1 : 0;
    curve[static_cast<std::size_t>(k)] = static_cast<double>(hit) / static_cast<double>(err.size());
  }
  return curve;
}

double success_auc(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt) {
  return mean(success_curve(pred, gt));
}

double precision_at(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt, double threshold_px) {
  check(pred, gt);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += center_distance(pred[i], gt[i]) <= threshold_px ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(pred.size());
}

double norm_precision(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt) {
  return mean(norm_precision_curve(pred, gt));
}

EvalReport evaluate(const std::vector<BoundingBox>& pred, const std::vector<BoundingBox>& gt, std::string name,
                    std::string tag) {
  EvalReport r;
  r.name = std::move(name);
  r.tag = std::move(tag);
  r.success = success_curve(pred, gt);
  r.precision = precision_curve(pred, gt);
  r.norm_precision = norm_precision_curve(pred, gt);
  r.auc = mean(r.success);
  r.precision_at_20 = precision_at(pred, gt, 20.0);
  r.p_norm = mean(r.norm_precision);
  r.frames = pred.size();
  return r;
}

nlohmann::json report_to_json(const EvalReport& r) {
  return {{"name", r.name},
          {"tag", r.tag},
          {"auc", r.auc},
          {"precision_at_20", r.precision_at_20},
          {"p_norm", r.p_norm},
          {"frames", r.frames},
          {"curves",
           {{"success", {{"thresholds", "iou 0:0.01:1"}, {"values", r.success}}},
            {"precision", {{"thresholds", "px 0:1:50"}, {"values", r.precision}}},
            {"norm_precision", {{"thresholds", "normalized 0:0.01:0.5"}, {"values", r.norm_precision}}}}}};
}

std::vector<AggregateRow> aggregate(std::vector<EvalReport> reports) {
  if (reports.empty()) throw EmptyGroup("no reports to aggregate");
  // Summation order is fixed so the result does not depend on input order.
  std::sort(reports.begin(), reports.end(), [](const EvalReport& a, const EvalReport& b) {
    return std::tie(a.tag, a.name, a.auc, a.precision_at_20, a.p_norm, a.frames) <
           std::tie(b.tag, b.name, b.auc, b.precision_at_20, b.p_norm, b.frames);
  });
  std::map<std::string, AggregateRow> rows;
  for (const auto& r : reports) {
    if (r.tag.empty()) throw EmptyGroup("report '" + r.name + "' has no tag");
    auto& row = rows[r.tag];
    row.tag = r.tag;
    row.auc += r.auc;
    row.p20 += r.precision_at_20;
    row.pnorm += r.p_norm;
    row.n_seq += 1;
    row.n_frames += r.frames;
  }
  std::vector<AggregateRow> out;
  for (auto& [tag, row] : rows) {
    const auto n = static_cast<double>(row.n_seq);
    row.auc /= n;
    row.p20 /= n;
    row.pnorm /= n;
    out.push_back(row);
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  os << "tag,auc,p20,pnorm,n_seq,n_frames\n";
  for (const auto& r : rows) {
    os << r.tag << ',' << detail::format_double(r.auc) << ',' << detail::format_double(r.p20) << ','
       << detail::format_double(r.pnorm) << ',' << r.n_seq << ',' << r.n_frames << '\n';
  }
  return os.str();
}

nlohmann::json aggregate_json(const std::vector<AggregateRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"tag", r.tag},
                   {"auc", r.auc},
                   {"p20", r.p20},
                   {"pnorm", r.pnorm},
                   {"n_seq", r.n_seq},
                   {"n_frames", r.n_frames}});
  }
  return out;
}

}  // namespace sattrack
