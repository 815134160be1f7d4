#include "sattrack/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sattrack/errors.hpp"

namespace sattrack {

bool BoundingBox::valid() const {
  return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(w) && std::isfinite(h) &&
         w > 0.0 && h > 0.0;
}

BoundingBox BoundingBox::from_corners(double left, double top, double w, double h) {
  return {left + 0.5 * w, top + 0.5 * h, w, h};
}

void require_valid(const BoundingBox& box) {
  if (!box.valid()) {
    std::ostringstream os;
    os << "box (" << box.cx << ", " << box.cy << ", " << box.w << ", " << box.h
       << ") must have finite fields and positive size";
    throw InvalidBox(os.str());
  }
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  if (inter >= uni) return 1.0;
  return inter / uni;
}

double center_distance(const BoundingBox& a, const BoundingBox& b) {
  return std::hypot(a.cx - b.cx, a.cy - b.cy);
}

MaskGrid::MaskGrid(int width, int height, std::vector<std::int64_t> runs)
    : width_(width), height_(height), runs_(std::move(runs)) {
  if (width <= 0 || height <= 0) throw InvalidMask("mask dimensions must be positive");
  std::int64_t total = 0;
  for (auto r : runs_) {
    if (r < 0) throw InvalidMask("negative run length");
    total += r;
  }
  if (total != static_cast<std::int64_t>(width) * height) {
    throw InvalidMask("run lengths sum to " + std::to_string(total) + ", expected " +
                      std::to_string(static_cast<std::int64_t>(width) * height));
  }
}

MaskGrid MaskGrid::from_pixels(int width, int height, const std::vector<std::uint8_t>& pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvalidMask("pixel buffer size does not match dimensions");
  }
  std::vector<std::int64_t> runs;
  std::uint8_t current = 0;
  std::int64_t count = 0;
  for (auto p : pixels) {
    const std::uint8_t bit = p ? 1 : 0;
    if (bit != current) {
      runs.push_back(count);
      current = bit;
      count = 0;
    }
    ++count;
  }
  runs.push_back(count);
  return MaskGrid(width, height, std::move(runs));
}

MaskGrid MaskGrid::parse_rle(std::string_view text) {
  std::vector<std::int64_t> values;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\n' || *p == '\r')) ++p;
    if (p == end) break;
    std::int64_t v = 0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{}) throw InvalidMask("malformed RLE text");
    values.push_back(v);
    p = next;
  }
  if (values.size() < 2) throw InvalidMask("RLE text needs width and height");
  const auto w = values[0];
  const auto h = values[1];
  if (w <= 0 || h <= 0 || w > std::numeric_limits<int>::max() || h > std::numeric_limits<int>::max()) {
    throw InvalidMask("RLE dimensions out of range");
  }
  return MaskGrid(static_cast<int>(w), static_cast<int>(h),
                  std::vector<std::int64_t>(values.begin() + 2, values.end()));
}

std::vector<std::uint8_t> MaskGrid::decode() const {
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_));
  std::uint8_t value = 0;
  for (auto r : runs_) {
    out.insert(out.end(), static_cast<std::size_t>(r), value);
    value ^= 1;
  }
  return out;
}

std::string MaskGrid::to_rle_string() const {
  std::string s = std::to_string(width_) + " " + std::to_string(height_);
  for (auto r : runs_) {
    s += ' ';
    s += std::to_string(r);
  }
  return s;
}

MaskStats mask_stats(const MaskGrid& mask) {
  // Accumulate directly over the runs; a run of ones may wrap across rows.
  const std::int64_t width = mask.width();
  double count = 0.0;
  double sum_x = 0.0;
  double sum_y = 0.0;
  std::int64_t min_x = width, max_x = -1, min_y = mask.height(), max_y = -1;

  std::int64_t pos = 0;
  bool ones = false;
  for (auto run : mask.runs()) {
    if (ones && run > 0) {
      std::int64_t start = pos;
      const std::int64_t stop = pos + run;
      while (start < stop) {
        const std::int64_t y = start / width;
        const std::int64_t x0 = start % width;
        const std::int64_t x1 = std::min(width, x0 + (stop - start));  // exclusive
        const std::int64_t n = x1 - x0;
        count += static_cast<double>(n);
        // sum of x0..x1-1
        sum_x += static_cast<double>(n) * static_cast<double>(x0 + x1 - 1) / 2.0;
        sum_y += static_cast<double>(n) * static_cast<double>(y);
        min_x = std::min(min_x, x0);
        max_x = std::max(max_x, x1 - 1);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
        start += n;
      }
    }
    pos += run;
    ones = !ones;
  }
  if (count == 0.0) throw EmptyMask("mask has no set pixels");

  MaskStats stats;
  stats.area = count;
  stats.centroid = {sum_x / count, sum_y / count};
  stats.tight_box = {0.5 * static_cast<double>(min_x + max_x), 0.5 * static_cast<double>(min_y + max_y),
                     static_cast<double>(max_x - min_x + 1), static_cast<double>(max_y - min_y + 1)};
  return stats;
}

MaskStats box_stats(const BoundingBox& box) {
  return {box.area(), {box.cx, box.cy}, box};
}

}  // namespace sattrack
