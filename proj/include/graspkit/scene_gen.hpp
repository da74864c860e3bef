#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspkit/label_map.hpp"
#include "graspkit/rng.hpp"

namespace graspkit {

enum class ShapeKind : std::uint8_t { Rectangle, Ellipse, Capsule };

inline const char* shape_kind_name(ShapeKind k) {
  switch (k) {
    case ShapeKind::Rectangle: return "rectangle";
    case ShapeKind::Ellipse: return "ellipse";
    default: return "capsule";
  }
}

inline ShapeKind shape_kind_from_name(const std::string& name) {
  if (name == "rectangle") return ShapeKind::Rectangle;
  if (name == "ellipse") return ShapeKind::Ellipse;
  if (name == "capsule") return ShapeKind::Capsule;
  throw std::invalid_argument("unknown shape kind \"" + name + "\"");
}

/// Parameters of the procedural top-down bin scene generator.
struct SceneConfig {
  int width = 256;
  int height = 256;
  int min_objects = 1;
  int max_objects = 20;
  std::vector<ShapeKind> shape_kinds = {ShapeKind::Rectangle, ShapeKind::Ellipse,
                                        ShapeKind::Capsule};
  double min_size = 12.0;  // pixels
  double max_size = 60.0;  // pixels
  std::uint64_t seed = 0;
  int bin_margin = 8;

  void validate() const {
    if (width < 1 || height < 1) throw std::invalid_argument("SceneConfig: empty canvas");
    if (min_objects < 1 || min_objects > max_objects || max_objects > 0xffff)
      throw std::invalid_argument("SceneConfig: need 1 <= min_objects <= max_objects <= 65535");
    if (shape_kinds.empty()) throw std::invalid_argument("SceneConfig: no shape kinds");
    if (!(min_size > 0.0) || !(min_size <= max_size))
      throw std::invalid_argument("SceneConfig: need 0 < min_size <= max_size");
    if (bin_margin < 0 || bin_margin >= std::min(width, height) / 2)
      throw std::invalid_argument("SceneConfig: margin must be below half the canvas");
  }
};

namespace detail {

struct Shape {
  ShapeKind kind = ShapeKind::Rectangle;
  double cx = 0.0, cy = 0.0;
  double size_a = 0.0, size_b = 0.0;  // full extents
  double angle = 0.0;

  bool contains(double px, double py) const {
    const double dx = px - cx;
    const double dy = py - cy;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double lx = dx * c + dy * s;   // along the shape's major axis
    const double ly = -dx * s + dy * c;  // across it
    switch (kind) {
      case ShapeKind::Rectangle:
        return std::abs(lx) <= size_a / 2.0 && std::abs(ly) <= size_b / 2.0;
      case ShapeKind::Ellipse: {
        const double nx = lx / (size_a / 2.0);
        const double ny = ly / (size_b / 2.0);
        return nx * nx + ny * ny <= 1.0;
      }
      case ShapeKind::Capsule: {
        // Segment of length size_a along the major axis, radius size_b/2.
        const double half = size_a / 2.0;
        const double t = std::clamp(lx, -half, half);
        const double ex = lx - t;
        const double r = size_b / 2.0;
        return ex * ex + ly * ly <= r * r;
      }
    }
    return false;
  }

  double reach() const { return (size_a + size_b) / 2.0 + 1.0; }
};

}  // namespace detail

/// Rasterizes a random clutter of shapes into a label map with ground-truth
/// records. Later shapes occlude earlier ones (paint order doubles as depth
/// order); shapes clip at the bin walls; instances occluded to zero visible
/// pixels are dropped and the survivors relabeled consecutively from 1.
/// Deterministic in (config, seed).
inline GroundTruthScene generate_scene(const SceneConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  const int n = static_cast<int>(rng.uniform_int(cfg.min_objects, cfg.max_objects));
  const double lo_x = cfg.bin_margin, hi_x = cfg.width - cfg.bin_margin;
  const double lo_y = cfg.bin_margin, hi_y = cfg.height - cfg.bin_margin;
  constexpr double pi = 3.14159265358979323846;

  std::vector<std::uint16_t> canvas(static_cast<std::size_t>(cfg.width) * cfg.height, 0);
  for (int k = 1; k <= n; ++k) {
    detail::Shape shape;
    shape.kind = cfg.shape_kinds[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(cfg.shape_kinds.size()) - 1))];
    shape.size_a = rng.uniform(cfg.min_size, cfg.max_size);
    shape.size_b = rng.uniform(cfg.min_size, cfg.max_size);
    shape.cx = rng.uniform(lo_x, hi_x);
    shape.cy = rng.uniform(lo_y, hi_y);
    shape.angle = rng.uniform(0.0, pi);

    // Paint only inside the bin interior so everything beyond the margin
    // stays background.
    const int x0 = std::max(static_cast<int>(std::floor(shape.cx - shape.reach())), cfg.bin_margin);
    const int x1 = std::min(static_cast<int>(std::ceil(shape.cx + shape.reach())),
                            cfg.width - cfg.bin_margin - 1);
    const int y0 = std::max(static_cast<int>(std::floor(shape.cy - shape.reach())), cfg.bin_margin);
    const int y1 = std::min(static_cast<int>(std::ceil(shape.cy + shape.reach())),
                            cfg.height - cfg.bin_margin - 1);
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        if (shape.contains(x, y))
          canvas[static_cast<std::size_t>(y) * cfg.width + x] = static_cast<std::uint16_t>(k);
  }

  // Drop fully occluded instances and relabel survivors consecutively.
  std::vector<std::int64_t> count(static_cast<std::size_t>(n) + 1, 0);
  for (std::uint16_t v : canvas) ++count[v];
  std::vector<std::uint16_t> relabel(static_cast<std::size_t>(n) + 1, 0);
  std::uint16_t next = 1;
  for (int k = 1; k <= n; ++k)
    if (count[k] > 0) relabel[k] = next++;
  for (std::uint16_t& v : canvas) v = relabel[v];

  std::map<std::uint16_t, double> scores;
  for (std::uint16_t id = 1; id < next; ++id) scores[id] = 1.0;
  InstanceLabelMap map(cfg.width, cfg.height, std::move(canvas), std::move(scores));
  return GroundTruthScene::from_map(map);
}

/// Derives imperfect "predictions" from a ground-truth scene: per instance the
/// confidence drops to 1 - u*noise (u uniform), and with probability `noise`
/// the mask is eroded or dilated by one pixel. Deterministic in (scene, noise,
/// seed); noise 0 returns the scene unchanged with all scores 1.0.
inline InstanceLabelMap perturb_scores(const GroundTruthScene& scene, double noise,
                                       std::uint64_t seed) {
  if (!(noise >= 0.0 && noise <= 1.0))
    throw std::invalid_argument("perturb_scores: noise must lie in [0,1]");
  Rng rng(seed);
  const InstanceLabelMap& src = scene.map();
  std::vector<std::uint16_t> labels = src.labels();
  const int w = src.width();
  const int h = src.height();

  auto neighbors4 = [&](int x, int y, auto&& fn) {
    if (x > 0) fn(x - 1, y);
    if (x + 1 < w) fn(x + 1, y);
    if (y > 0) fn(x, y - 1);
    if (y + 1 < h) fn(x, y + 1);
  };

  std::map<std::uint16_t, double> scores;
  for (const auto& [id, unused] : src.scores()) {
    scores[id] = 1.0 - rng.uniform() * noise;
    if (rng.uniform() >= noise) continue;

    const bool erode = rng.uniform() < 0.5;
    const std::vector<std::uint16_t> snapshot = labels;
    auto lab = [&](int x, int y) { return snapshot[static_cast<std::size_t>(y) * w + x]; };
    std::int64_t remaining = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (erode && lab(x, y) == id) {
          bool boundary = false;
          neighbors4(x, y, [&](int nx, int ny) { boundary |= lab(nx, ny) != id; });
          if (x == 0 || y == 0 || x == w - 1 || y == h - 1) boundary = true;
          if (boundary)
            labels[i] = 0;
          else
            ++remaining;
        } else if (!erode && lab(x, y) == 0) {
          bool adjacent = false;
          neighbors4(x, y, [&](int nx, int ny) { adjacent |= lab(nx, ny) == id; });
          if (adjacent) labels[i] = id;
        }
      }
    if (erode && remaining == 0) {
      // Erosion would delete the instance entirely; keep its mask.
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (snapshot[i] == id) labels[i] = id;
    }
  }
  return InstanceLabelMap(w, h, std::move(labels), std::move(scores));
}

// {"width":..., "height":..., "min_objects":..., "max_objects":...,
//  "shape_kinds":[...], "min_size":..., "max_size":..., "seed":...,
//  "bin_margin":...}

inline SceneConfig scene_config_from_json(const nlohmann::json& doc) {
  SceneConfig cfg;
  try {
    if (doc.contains("width")) cfg.width = doc.at("width").get<int>();
    if (doc.contains("height")) cfg.height = doc.at("height").get<int>();
    if (doc.contains("min_objects")) cfg.min_objects = doc.at("min_objects").get<int>();
    if (doc.contains("max_objects")) cfg.max_objects = doc.at("max_objects").get<int>();
    if (doc.contains("min_size")) cfg.min_size = doc.at("min_size").get<double>();
    if (doc.contains("max_size")) cfg.max_size = doc.at("max_size").get<double>();
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("bin_margin")) cfg.bin_margin = doc.at("bin_margin").get<int>();
    if (doc.contains("shape_kinds")) {
      cfg.shape_kinds.clear();
      for (const auto& name : doc.at("shape_kinds"))
        cfg.shape_kinds.push_back(shape_kind_from_name(name.get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("scene config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline nlohmann::json scene_config_to_json(const SceneConfig& cfg) {
  nlohmann::json kinds = nlohmann::json::array();
  for (ShapeKind k : cfg.shape_kinds) kinds.push_back(shape_kind_name(k));
  return nlohmann::json{{"width", cfg.width},
                        {"height", cfg.height},
                        {"min_objects", cfg.min_objects},
                        {"max_objects", cfg.max_objects},
                        {"shape_kinds", kinds},
                        {"min_size", cfg.min_size},
                        {"max_size", cfg.max_size},
                        {"seed", cfg.seed},
                        {"bin_margin", cfg.bin_margin}};
}

inline SceneConfig load_scene_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": invalid JSON: " + e.what());
  }
  try {
    return scene_config_from_json(doc);
  } catch (const std::invalid_argument& e) {
    throw io_error(path + ": " + e.what());
  }
}

}  // namespace graspkit
