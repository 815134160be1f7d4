// Independent reference implementations used by the tests. Everything here is
// written the slow, obvious way and shares no code with the library beyond
// the plain value types.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sattrack/geometry.hpp"
#include "sattrack/memory_gate.hpp"

namespace sattrack::oracle {

// ---------------------------------------------------------------- geometry

inline double box_iou(const BoundingBox& a, const BoundingBox& b) {
  const double ax0 = a.cx - a.w / 2, ax1 = a.cx + a.w / 2, ay0 = a.cy - a.h / 2, ay1 = a.cy + a.h / 2;
  const double bx0 = b.cx - b.w / 2, bx1 = b.cx + b.w / 2, by0 = b.cy - b.h / 2, by1 = b.cy + b.h / 2;
  const double iw = std::min(ax1, bx1) - std::max(ax0, bx0);
  const double ih = std::min(ay1, by1) - std::max(ay0, by0);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.w * a.h + b.w * b.h - inter);
}

inline double distance(double x0, double y0, double x1, double y1) {
  return std::sqrt((x0 - x1) * (x0 - x1) + (y0 - y1) * (y0 - y1));
}

inline std::vector<std::uint8_t> expand_runs(int width, int height, const std::vector<std::int64_t>& runs) {
  std::vector<std::uint8_t> px;
  std::uint8_t value = 0;
  for (auto r : runs) {
    for (std::int64_t i = 0; i < r; ++i) px.push_back(value);
    value = value ? 0 : 1;
  }
  if (px.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw std::logic_error("runs do not cover the grid");
  }
  return px;
}

struct PixelStats {
  double area = 0;
  double cx = 0, cy = 0;
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // inclusive pixel extents
};

inline PixelStats pixel_scan(int width, int height, const std::vector<std::uint8_t>& px) {
  PixelStats s;
  s.x0 = width;
  s.y0 = height;
  s.x1 = -1;
  s.y1 = -1;
  double sx = 0, sy = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!px[static_cast<std::size_t>(y * width + x)]) continue;
      s.area += 1;
      sx += x;
      sy += y;
      s.x0 = std::min(s.x0, x);
      s.y0 = std::min(s.y0, y);
      s.x1 = std::max(s.x1, x);
      s.y1 = std::max(s.y1, y);
    }
  }
  if (s.area > 0) {
    s.cx = sx / s.area;
    s.cy = sy / s.area;
  }
  return s;
}

// Area of a box covered by the union of at most three rectangles, by
// inclusion-exclusion over clipped intersections.
inline double covered_by_union(const BoundingBox& t, const std::vector<BoundingBox>& occ) {
  if (occ.size() > 3) throw std::logic_error("inclusion-exclusion oracle takes at most three rectangles");
  struct Rect {
    double x0, y0, x1, y1;
  };
  auto clip = [](Rect a, Rect b) {
    return Rect{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1), std::min(a.y1, b.y1)};
  };
  auto area = [](Rect r) { return std::max(0.0, r.x1 - r.x0) * std::max(0.0, r.y1 - r.y0); };
  auto rect = [](const BoundingBox& b) {
    return Rect{b.cx - b.w / 2, b.cy - b.h / 2, b.cx + b.w / 2, b.cy + b.h / 2};
  };
  const Rect target = rect(t);
  const std::size_t n = occ.size();
  double total = 0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    Rect r = target;
    int bits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) {
        r = clip(r, rect(occ[i]));
        ++bits;
      }
    }
    total += (bits % 2 ? 1.0 : -1.0) * area(r);
  }
  return total;
}

// ---------------------------------------------------------------- dense Kalman

using Mat = std::vector<std::vector<double>>;

inline Mat zeros(std::size_t r, std::size_t c) { return Mat(r, std::vector<double>(c, 0.0)); }

inline Mat eye(std::size_t n) {
  Mat m = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat mul(const Mat& a, const Mat& b) {
  Mat m = zeros(a.size(), b[0].size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b[0].size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k) m[i][j] += a[i][k] * b[k][j];
  return m;
}

inline Mat transpose(const Mat& a) {
  Mat m = zeros(a[0].size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) m[j][i] = a[i][j];
  return m;
}

inline Mat add(const Mat& a, const Mat& b, double sign = 1.0) {
  Mat m = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) m[i][j] += sign * b[i][j];
  return m;
}

// Gauss-Jordan with partial pivoting.
inline Mat inverse(Mat a) {
  const std::size_t n = a.size();
  Mat inv = eye(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (a[p][c] == 0.0) throw std::runtime_error("singular");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    const double d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

struct DenseFilter {
  Mat F, H, Q, R;
  double min_size = 0.5;
  Mat x;  // 9 x 1
  Mat P;  // 9 x 9

  DenseFilter(double dt, const std::array<double, 9>& q, const std::array<double, 4>& r,
              const std::array<double, 9>& p0, const BoundingBox& box, double area) {
    F = eye(9);
    for (std::size_t i = 0; i < 4; ++i) F[i][i + 4] = dt;
    H = zeros(4, 9);
    for (std::size_t i = 0; i < 4; ++i) H[i][i] = 1.0;
    Q = zeros(9, 9);
    P = zeros(9, 9);
    R = zeros(4, 4);
    for (std::size_t i = 0; i < 9; ++i) {
      Q[i][i] = q[i];
      P[i][i] = p0[i];
    }
    for (std::size_t i = 0; i < 4; ++i) R[i][i] = r[i];
    x = zeros(9, 1);
    x[0][0] = box.cx;
    x[1][0] = box.cy;
    x[2][0] = box.w;
    x[3][0] = box.h;
    x[8][0] = area;
  }

  void clamp() {
    x[2][0] = std::max(x[2][0], min_size);
    x[3][0] = std::max(x[3][0], min_size);
  }

  void predict() {
    x = mul(F, x);
    clamp();
    P = add(mul(mul(F, P), transpose(F)), Q);
  }

  void update(const BoundingBox& z) {
    Mat zz = {{z.cx}, {z.cy}, {z.w}, {z.h}};
    const Mat S = add(mul(mul(H, P), transpose(H)), R);
    const Mat K = mul(mul(P, transpose(H)), inverse(S));
    x = add(x, mul(K, add(zz, mul(H, x), -1.0)));
    clamp();
    P = mul(add(eye(9), mul(K, H), -1.0), P);
  }
};

// ---------------------------------------------------------------- motion

struct OracleCandidate {
  BoundingBox tight;
  double area = 0;
  double centroid_x = 0, centroid_y = 0;
  double s_sam = 0;
};

inline double fused_score(const OracleCandidate& c, const BoundingBox& pred, double s_ref, double alpha,
                          double lo, double hi, double d_max) {
  const double ratio = s_ref / c.area;
  const double s_kf = (ratio >= lo && ratio <= hi) ? box_iou(pred, c.tight) : 0.0;
  const int gate = distance(pred.cx, pred.cy, c.centroid_x, c.centroid_y) < d_max ? 1 : 0;
  return (alpha * s_kf + (1.0 - alpha) * c.s_sam) * gate;
}

// Exhaustive argmax, first maximum wins; nullopt when nothing scores above 0.
inline std::optional<std::size_t> fused_argmax(const std::vector<OracleCandidate>& cands, const BoundingBox& pred,
                                               double s_ref, double alpha, double lo, double hi, double d_max) {
  std::vector<double> scores;
  for (const auto& c : cands) scores.push_back(fused_score(c, pred, s_ref, alpha, lo, hi, d_max));
  double best = 0.0;
  std::optional<std::size_t> winner;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    bool beats_all_earlier = true;
    for (std::size_t k = 0; k < j; ++k)
      if (scores[k] >= scores[j]) beats_all_earlier = false;
    bool no_later_higher = true;
    for (std::size_t k = j + 1; k < scores.size(); ++k)
      if (scores[k] > scores[j]) no_later_higher = false;
    if (beats_all_earlier && no_later_higher && scores[j] > 0.0) {
      winner = j;
      best = scores[j];
    }
  }
  (void)best;
  return winner;
}

// ---------------------------------------------------------------- memory

struct StreamItem {
  std::int64_t frame;
  double s_mask, s_obj, s_kf;
};

// Keep the admitted frames, then the newest `capacity` of them, newest first.
inline std::vector<std::int64_t> memory_replay(const std::vector<StreamItem>& stream, double t_mask, double t_obj,
                                               double t_kf, std::size_t capacity) {
  std::vector<std::int64_t> admitted;
  for (const auto& s : stream)
    if (s.s_mask > t_mask && s.s_obj > t_obj && s.s_kf > t_kf) admitted.push_back(s.frame);
  std::reverse(admitted.begin(), admitted.end());
  if (admitted.size() > capacity) admitted.resize(capacity);
  return admitted;
}

// ---------------------------------------------------------------- metrics

inline double success_auc(const std::vector<BoundingBox>& p, const std::vector<BoundingBox>& g) {
  double sum = 0;
  for (int k = 0; k <= 100; ++k) {
    int hits = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (box_iou(p[i], g[i]) > k / 100.0) ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(p.size());
  }
  return sum / 101.0;
}

inline double precision(const std::vector<BoundingBox>& p, const std::vector<BoundingBox>& g, double px) {
  int hits = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (distance(p[i].cx, p[i].cy, g[i].cx, g[i].cy) <= px) ++hits;
  return static_cast<double>(hits) / static_cast<double>(p.size());
}

inline double norm_precision(const std::vector<BoundingBox>& p, const std::vector<BoundingBox>& g) {
  double sum = 0;
  for (int k = 0; k <= 50; ++k) {
    int hits = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double ex = (p[i].cx - g[i].cx) / g[i].w;
      const double ey = (p[i].cy - g[i].cy) / g[i].h;
      if (std::sqrt(ex * ex + ey * ey) <= k / 100.0) ++hits;
    }
    sum += static_cast<double>(hits) / static_cast<double>(p.size());
  }
  return sum / 51.0;
}

// ---------------------------------------------------------------- state machine

enum class Branch { A, B, C, D };

// Decision table over integer score grids in units of 0.05, with the default
// thresholds tau_h = 0.3 (6 units), tau_m = 0 and tau_kf = 0.
inline Branch stable_table(int sam_units, int kf_units) {
  if (sam_units > 6) return Branch::A;
  if (sam_units > 0) return Branch::B;
  if (kf_units > 0) return Branch::C;
  return Branch::D;
}

}  // namespace sattrack::oracle
