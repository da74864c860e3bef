#pragma once

#include <cmath>

namespace graspkit {

/// Sub-pixel image coordinates. `u` runs along image columns (x), `v` along
/// rows (y). Pixel centers sit at integer coordinates.
struct Vec2 {
  double u = 0.0;
  double v = 0.0;
};

inline bool operator==(const Vec2& a, const Vec2& b) {
  return a.u == b.u && a.v == b.v;
}

/// Nearest-pixel index for a continuous coordinate (half-way cases round up).
inline long round_pixel(double x) { return static_cast<long>(std::floor(x + 0.5)); }

/// Wraps a planar grasp angle into [0, pi). The grasp axis is symmetric under
/// a half-turn, so angles are only meaningful modulo pi.
inline double wrap_angle_half_turn(double a) {
  constexpr double pi = 3.14159265358979323846;
  double r = std::fmod(a, pi);
  if (r < 0.0) r += pi;
  if (r >= pi) r = 0.0;  // fmod rounding edge
  return r;
}

}  // namespace graspkit
