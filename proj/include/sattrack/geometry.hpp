///////////////////////////////////////////////////////////////////////////////
// geometry.hpp: boxes, run-length encoded binary masks and the primitives
// (IoU, centroid, area, center distance) shared by the tracker modules.
//
// Boxes are center-based (cx, cy, w, h) in continuous pixel coordinates.
// Pixel (x, y) of a mask has its center at (x, y), so a single set pixel
// covers [x - 0.5, x + 0.5] x [y - 0.5, y + 0.5].
///////////////////////////////////////////////////////////////////////////////

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sattrack {

struct BoundingBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 1.0;
  double h = 1.0;

  double area() const { return w * h; }
  double left() const { return cx - 0.5 * w; }
  double top() const { return cy - 0.5 * h; }
  double right() const { return cx + 0.5 * w; }
  double bottom() const { return cy + 0.5 * h; }
  bool valid() const;

  static BoundingBox from_corners(double left, double top, double w, double h);

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Throws InvalidBox unless w > 0 and h > 0 and all fields are finite.
void require_valid(const BoundingBox& box);

// Area of the axis-aligned intersection of two boxes; 0 when disjoint.
double intersection_area(const BoundingBox& a, const BoundingBox& b);

double iou(const BoundingBox& a, const BoundingBox& b);

double center_distance(const BoundingBox& a, const BoundingBox& b);

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Binary mask stored as alternating run lengths over the row-major pixel
/// sequence. The first run counts zeros (and may be 0 when the mask starts
/// with a set pixel).
class MaskGrid {
 public:
  MaskGrid() = default;
  MaskGrid(int width, int height, std::vector<std::int64_t> runs);

  static MaskGrid from_pixels(int width, int height, const std::vector<std::uint8_t>& pixels);
  // "W H r0 r1 ..." as used by fixtures and the bridge protocol.
  static MaskGrid parse_rle(std::string_view text);

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::int64_t>& runs() const { return runs_; }

  std::vector<std::uint8_t> decode() const;
  std::string to_rle_string() const;

  friend bool operator==(const MaskGrid&, const MaskGrid&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::int64_t> runs_;
};

struct MaskStats {
  double area = 0.0;
  Point centroid;
  BoundingBox tight_box;

  friend bool operator==(const MaskStats&, const MaskStats&) = default;
};

// Throws EmptyMask when no pixel is set.
MaskStats mask_stats(const MaskGrid& mask);

// Stats of a filled axis-aligned rectangle, used where masks are rigid boxes.
MaskStats box_stats(const BoundingBox& box);

}  // namespace sattrack
