#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "graspkit/crop.hpp"
#include "graspkit/label_map.hpp"
#include "graspkit/planner.hpp"
#include "graspkit/png_io.hpp"

namespace graspkit {

/// Deterministic instance palette: hues walk the golden-ratio sequence so
/// nearby ids stay visually distinct.
inline std::array<std::uint8_t, 3> color_for_instance(std::uint16_t id) {
  const double hue = std::fmod(static_cast<double>(id) * 0.61803398874989484820, 1.0) * 6.0;
  const double sat = 0.65, val = 0.95;
  const int sector = static_cast<int>(hue);
  const double f = hue - sector;
  const double p = val * (1.0 - sat);
  const double q = val * (1.0 - sat * f);
  const double t = val * (1.0 - sat * (1.0 - f));
  double r = 0, g = 0, b = 0;
  switch (sector % 6) {
    case 0: r = val; g = t; b = p; break;
    case 1: r = q; g = val; b = p; break;
    case 2: r = p; g = val; b = t; break;
    case 3: r = p; g = q; b = val; break;
    case 4: r = t; g = p; b = val; break;
    default: r = val; g = p; b = q; break;
  }
  return {static_cast<std::uint8_t>(r * 255.0 + 0.5), static_cast<std::uint8_t>(g * 255.0 + 0.5),
          static_cast<std::uint8_t>(b * 255.0 + 0.5)};
}

/// Colorized instance overlay; background pixels stay black.
inline Rgb8Image render_labels(const InstanceLabelMap& map) {
  Rgb8Image img;
  img.width = map.width();
  img.height = map.height();
  img.pixels.assign(static_cast<std::size_t>(map.width()) * map.height() * 3, 0);
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      const std::uint16_t id = map.at(x, y);
      if (id == 0) continue;
      const auto rgb = color_for_instance(id);
      std::uint8_t* px = img.px(x, y);
      px[0] = rgb[0];
      px[1] = rgb[1];
      px[2] = rgb[2];
    }
  return img;
}

namespace detail {

inline void blend_px(Rgb8Image& img, long x, long y, const std::array<std::uint8_t, 3>& rgb,
                     double alpha) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  std::uint8_t* px = img.px(static_cast<int>(x), static_cast<int>(y));
  for (int i = 0; i < 3; ++i)
    px[i] = static_cast<std::uint8_t>(px[i] * (1.0 - alpha) + rgb[i] * alpha + 0.5);
}

inline void set_px(Rgb8Image& img, long x, long y, const std::array<std::uint8_t, 3>& rgb) {
  blend_px(img, x, y, rgb, 1.0);
}

inline void draw_segment(Rgb8Image& img, Vec2 a, Vec2 b, const std::array<std::uint8_t, 3>& rgb) {
  const double len = std::hypot(b.u - a.u, b.v - a.v);
  const int steps = std::max(1, static_cast<int>(std::ceil(len * 2.0)));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    set_px(img, round_pixel(a.u + (b.u - a.u) * t), round_pixel(a.v + (b.v - a.v) * t), rgb);
  }
}

// 3x5 bitmap glyphs for the quality stamp.
inline const std::uint16_t* glyph_rows(char c) {
  // Each glyph is 5 rows of 3 bits, msb = left column.
  static const std::uint16_t digits[10][5] = {
      {0b111, 0b101, 0b101, 0b101, 0b111}, {0b010, 0b110, 0b010, 0b010, 0b111},
      {0b111, 0b001, 0b111, 0b100, 0b111}, {0b111, 0b001, 0b111, 0b001, 0b111},
      {0b101, 0b101, 0b111, 0b001, 0b001}, {0b111, 0b100, 0b111, 0b001, 0b111},
      {0b111, 0b100, 0b111, 0b101, 0b111}, {0b111, 0b001, 0b001, 0b010, 0b010},
      {0b111, 0b101, 0b111, 0b101, 0b111}, {0b111, 0b101, 0b111, 0b001, 0b111}};
  static const std::uint16_t dot[5] = {0b000, 0b000, 0b000, 0b000, 0b010};
  static const std::uint16_t equals[5] = {0b000, 0b111, 0b000, 0b111, 0b000};
  static const std::uint16_t qu[5] = {0b111, 0b101, 0b101, 0b111, 0b001};
  if (c >= '0' && c <= '9') return digits[c - '0'];
  if (c == '.') return dot;
  if (c == '=') return equals;
  if (c == 'Q') return qu;
  return nullptr;
}

inline void stamp_text(Rgb8Image& img, int x, int y, const std::string& text,
                       const std::array<std::uint8_t, 3>& rgb, int scale = 2) {
  int cursor = x;
  for (char c : text) {
    const std::uint16_t* rows = glyph_rows(c);
    if (rows) {
      for (int r = 0; r < 5; ++r)
        for (int cc = 0; cc < 3; ++cc)
          if (rows[r] & (0b100 >> cc))
            for (int sy = 0; sy < scale; ++sy)
              for (int sx = 0; sx < scale; ++sx)
                set_px(img, cursor + cc * scale + sx, y + r * scale + sy, rgb);
    }
    cursor += 4 * scale;
  }
}

}  // namespace detail

/// Draws a grasp pose onto a rendered overlay: subsector tint over the
/// sampling rectangle, the refined-width grasp rectangle, a center marker,
/// and the quality index stamped in the corner.
inline void draw_grasp_overlay(Rgb8Image& img, const InstanceLabelMap& map, const GraspPose& pose,
                               const GraspRectSpec& rect) {
  static const std::array<std::uint8_t, 3> kContact = {40, 220, 40};
  static const std::array<std::uint8_t, 3> kFree = {235, 235, 235};
  static const std::array<std::uint8_t, 3> kCollision = {230, 40, 40};
  static const std::array<std::uint8_t, 3> kEdge = {255, 230, 30};
  static const std::array<std::uint8_t, 3> kCenter = {40, 90, 255};
  static const std::array<std::uint8_t, 3> kText = {255, 255, 255};

  if (pose.instance != 0) {
    const AlignedCrop crop = crop_aligned_rect(map, pose.center, pose.angle, rect.gw, rect.gb);
    const SubsectorMap sub = identify_subsectors(crop, pose.instance);
    for (int r = 0; r < rect.gb; ++r)
      for (int c = 0; c < rect.gw; ++c) {
        const Vec2 p = crop_to_image(crop, c, r);
        const auto& tint = sub.at(r, c) == Sector::TC   ? kContact
                           : sub.at(r, c) == Sector::UO ? kFree
                                                        : kCollision;
        detail::blend_px(img, round_pixel(p.u), round_pixel(p.v), tint, 0.45);
      }
  }

  // Grasp rectangle at the refined width.
  const double hw = pose.width_px / 2.0;
  const double hb = rect.gb / 2.0;
  const double c = std::cos(pose.angle);
  const double s = std::sin(pose.angle);
  auto corner = [&](double dx, double dy) {
    return Vec2{pose.center.u + dx * c - dy * s, pose.center.v + dx * s + dy * c};
  };
  const Vec2 p00 = corner(-hw, -hb), p10 = corner(hw, -hb);
  const Vec2 p11 = corner(hw, hb), p01 = corner(-hw, hb);
  detail::draw_segment(img, p00, p10, kEdge);
  detail::draw_segment(img, p10, p11, kEdge);
  detail::draw_segment(img, p11, p01, kEdge);
  detail::draw_segment(img, p01, p00, kEdge);

  for (long dy = -1; dy <= 1; ++dy)
    for (long dx = -1; dx <= 1; ++dx)
      detail::set_px(img, round_pixel(pose.center.u) + dx, round_pixel(pose.center.v) + dy,
                     kCenter);

  char buf[32];
  std::snprintf(buf, sizeof buf, "Q=%.1f", pose.quality);
  detail::stamp_text(img, 2, 2, buf, kText);
}

}  // namespace graspkit
