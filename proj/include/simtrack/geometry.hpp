#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "simtrack/error.hpp"

namespace simtrack {

/// Axis-aligned box in (left, top, width, height) pixel form, the layout
/// MOTChallenge files use. Width and height are strictly positive and all
/// fields finite; the constructor enforces it.
class BoundingBox {
 public:
  BoundingBox(double left, double top, double width, double height)
      : left_(left), top_(top), width_(width), height_(height) {
    if (!is_valid(left, top, width, height)) {
      std::ostringstream msg;
      msg << "invalid bounding box (" << left << ", " << top << ", " << width
          << ", " << height << "): extents must be finite and positive";
      throw ValidationError(msg.str());
    }
  }

  static bool is_valid(double left, double top, double width, double height) {
    return std::isfinite(left) && std::isfinite(top) && std::isfinite(width) &&
           std::isfinite(height) && width > 0.0 && height > 0.0 &&
           std::isfinite(width * height);
  }

  static std::optional<BoundingBox> make(double left, double top, double width,
                                         double height) {
    if (!is_valid(left, top, width, height)) return std::nullopt;
    return BoundingBox(left, top, width, height);
  }

  static BoundingBox from_corners(double left, double top, double right,
                                  double bottom) {
    return BoundingBox(left, top, right - left, bottom - top);
  }

  double left() const { return left_; }
  double top() const { return top_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double right() const { return left_ + width_; }
  double bottom() const { return top_ + height_; }
  double area() const { return width_ * height_; }

  BoundingBox translated(double dx, double dy) const {
    return BoundingBox(left_ + dx, top_ + dy, width_, height_);
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double left_;
  double top_;
  double width_;
  double height_;
};

inline double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double h = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  // Shared edges give w or h == 0, hence exactly zero overlap.
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

/// area(a ∩ b) / area(a ∪ b).
inline double iou(const BoundingBox& a, const BoundingBox& b) {
  if (a == b) return 1.0;  // corner arithmetic can round a self-overlap below 1
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

/// min(area) / max(area); 1 iff the areas are equal.
inline double area_ratio(const BoundingBox& a, const BoundingBox& b) {
  const double sa = a.area();
  const double sb = b.area();
  return std::min(sa, sb) / std::max(sa, sb);
}

/// The two geometric cues fed to the enhanced embedding head.
struct GeometryFeatures {
  double iou = 1.0;
  double area_ratio = 1.0;

  friend bool operator==(const GeometryFeatures&, const GeometryFeatures&) = default;
};

inline GeometryFeatures geometry_features(const BoundingBox& a, const BoundingBox& b) {
  return {iou(a, b), area_ratio(a, b)};
}

/// Features of a box paired with itself.
inline constexpr GeometryFeatures kSelfGeometry{1.0, 1.0};

}  // namespace simtrack
