#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "graspkit/geometry.hpp"
#include "graspkit/label_map.hpp"

namespace graspkit {

/// A grasp rectangle cropped from a label map and horizontally aligned:
/// rows run along the grasp breadth, columns along the closing direction,
/// with cell (0,0) at the rectangle's top-left corner.
struct AlignedCrop {
  int gw = 0;  // columns
  int gb = 0;  // rows
  std::vector<std::uint16_t> cells;
  Vec2 src_center;
  double src_angle = 0.0;

  std::uint16_t at(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * gw + col];
  }
};

/// Maps aligned-frame coordinates (col, row) back to sub-pixel image
/// coordinates: offset by the rectangle center, rotate by src_angle about
/// src_center. This is the transform the crop sampling runs through.
inline Vec2 crop_to_image(double col, double row, int gw, int gb, const Vec2& center,
                          double angle) {
  const double dx = col - gw / 2.0;
  const double dy = row - gb / 2.0;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Vec2{center.u + dx * c - dy * s, center.v + dx * s + dy * c};
}

inline Vec2 crop_to_image(const AlignedCrop& crop, double col, double row) {
  return crop_to_image(col, row, crop.gw, crop.gb, crop.src_center, crop.src_angle);
}

/// Samples a gw x gb rectangle centered at `center`, rotated by `angle`
/// (counterclockwise from the image x-axis), nearest-neighbor so no label id
/// is invented. Samples falling outside the image read as background.
inline AlignedCrop crop_aligned_rect(const InstanceLabelMap& map, const Vec2& center, double angle,
                                     int gw, int gb) {
  if (gw < 1 || gb < 1)
    throw std::invalid_argument("crop_aligned_rect: gw and gb must be >= 1");
  AlignedCrop crop;
  crop.gw = gw;
  crop.gb = gb;
  crop.src_center = center;
  crop.src_angle = angle;
  crop.cells.resize(static_cast<std::size_t>(gw) * gb, 0);

  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (int row = 0; row < gb; ++row) {
    const double dy = row - gb / 2.0;
    for (int col = 0; col < gw; ++col) {
      const double dx = col - gw / 2.0;
      const long u = round_pixel(center.u + dx * c - dy * s);
      const long v = round_pixel(center.v + dx * s + dy * c);
      if (map.in_bounds(u, v))
        crop.cells[static_cast<std::size_t>(row) * gw + col] =
            map.at(static_cast<int>(u), static_cast<int>(v));
    }
  }
  return crop;
}

}  // namespace graspkit
