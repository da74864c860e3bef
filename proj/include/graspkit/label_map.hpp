#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspkit/geometry.hpp"
#include "graspkit/png_io.hpp"

namespace graspkit {

/// Per-pixel instance identifiers plus per-instance confidence scores.
/// Instance id 0 is background. Immutable after construction; the constructor
/// enforces that labels and scores name exactly the same instance set and
/// that every confidence lies in [0, 1].
class InstanceLabelMap {
 public:
  InstanceLabelMap(int width, int height, std::vector<std::uint16_t> labels,
                   std::map<std::uint16_t, double> scores)
      : width_(width), height_(height), labels_(std::move(labels)), scores_(std::move(scores)) {
    if (width_ < 1 || height_ < 1)
      throw std::invalid_argument("InstanceLabelMap: width and height must be >= 1");
    if (labels_.size() != static_cast<std::size_t>(width_) * height_)
      throw std::invalid_argument("InstanceLabelMap: label grid size mismatch");
    if (scores_.count(0))
      throw std::invalid_argument("InstanceLabelMap: background id 0 cannot carry a score");
    for (const auto& [id, s] : scores_)
      if (!(s >= 0.0 && s <= 1.0))
        throw std::invalid_argument("InstanceLabelMap: confidence for instance " +
                                    std::to_string(id) + " outside [0,1]");

    std::set<std::uint16_t> seen;
    for (std::uint16_t v : labels_)
      if (v != 0) seen.insert(v);
    for (std::uint16_t id : seen)
      if (!scores_.count(id))
        throw std::invalid_argument("unscored instance " + std::to_string(id));
    for (const auto& [id, s] : scores_)
      if (!seen.count(id))
        throw std::invalid_argument("score for absent instance " + std::to_string(id));
  }

  int width() const { return width_; }
  int height() const { return height_; }
  const std::vector<std::uint16_t>& labels() const { return labels_; }
  const std::map<std::uint16_t, double>& scores() const { return scores_; }

  bool in_bounds(long x, long y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  std::uint16_t at(int x, int y) const {
    return labels_[static_cast<std::size_t>(y) * width_ + x];
  }
  double score_of(std::uint16_t id) const { return scores_.at(id); }

  friend bool operator==(const InstanceLabelMap& a, const InstanceLabelMap& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.labels_ == b.labels_ &&
           a.scores_ == b.scores_;
  }

 private:
  int width_;
  int height_;
  std::vector<std::uint16_t> labels_;
  std::map<std::uint16_t, double> scores_;
};

/// Visible-pixel count and centroid of one instance mask.
struct InstanceStat {
  std::int64_t area = 0;
  Vec2 centroid;
};

/// Area and centroid per instance id, keyed ascending.
inline std::map<std::uint16_t, InstanceStat> instance_stats(const InstanceLabelMap& map) {
  struct Acc {
    std::int64_t n = 0;
    double su = 0.0, sv = 0.0;
  };
  std::map<std::uint16_t, Acc> acc;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      std::uint16_t id = map.at(x, y);
      if (id == 0) continue;
      Acc& a = acc[id];
      ++a.n;
      a.su += x;
      a.sv += y;
    }
  std::map<std::uint16_t, InstanceStat> out;
  for (const auto& [id, a] : acc)
    out[id] = InstanceStat{a.n, Vec2{a.su / a.n, a.sv / a.n}};
  return out;
}

struct GroundTruthInstance {
  std::uint16_t id = 0;
  Vec2 centroid;
  std::int64_t visible_area = 0;
};

/// A label map whose scores are all 1.0, annotated with per-instance centroid
/// and visible-area records. Ids are consecutive from 1.
class GroundTruthScene {
 public:
  GroundTruthScene(InstanceLabelMap map, std::vector<GroundTruthInstance> instances)
      : map_(std::move(map)), instances_(std::move(instances)) {
    auto stats = instance_stats(map_);
    if (stats.size() != instances_.size())
      throw std::invalid_argument("GroundTruthScene: instance record count mismatch");
    std::uint16_t expect = 1;
    for (const auto& inst : instances_) {
      if (inst.id != expect++)
        throw std::invalid_argument("GroundTruthScene: ids must be consecutive from 1");
      auto it = stats.find(inst.id);
      if (it == stats.end() || it->second.area != inst.visible_area)
        throw std::invalid_argument("GroundTruthScene: visible-area record for instance " +
                                    std::to_string(inst.id) + " does not match the map");
    }
  }

  /// Derives the instance records by counting the map itself.
  static GroundTruthScene from_map(const InstanceLabelMap& map) {
    std::vector<GroundTruthInstance> inst;
    for (const auto& [id, st] : instance_stats(map))
      inst.push_back(GroundTruthInstance{id, st.centroid, st.area});
    return GroundTruthScene(map, std::move(inst));
  }

  const InstanceLabelMap& map() const { return map_; }
  const std::vector<GroundTruthInstance>& instances() const { return instances_; }

 private:
  InstanceLabelMap map_;
  std::vector<GroundTruthInstance> instances_;
};

// ---------------------------------------------------------------------------
// On-disk format: <stem>.labels.png (16-bit gray, pixel value = instance id)
// paired with <stem>.scores.json ({"scores": {"<id>": <float in [0,1]>}}).
// ---------------------------------------------------------------------------

inline std::map<std::uint16_t, double> read_scores_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("scores") || !doc["scores"].is_object())
    throw io_error(path + ": expected {\"scores\": {...}}");

  std::map<std::uint16_t, double> scores;
  for (const auto& [key, val] : doc["scores"].items()) {
    unsigned long id = 0;
    std::size_t used = 0;
    try {
      id = std::stoul(key, &used);
    } catch (const std::exception&) {
      throw io_error(path + ": non-numeric instance id \"" + key + "\"");
    }
    if (used != key.size() || id == 0 || id > 0xffff)
      throw io_error(path + ": instance id \"" + key + "\" out of range");
    if (!val.is_number()) throw io_error(path + ": score for id " + key + " is not a number");
    double s = val.get<double>();
    if (!(s >= 0.0 && s <= 1.0))
      throw io_error(path + ": score for id " + key + " outside [0,1]");
    scores[static_cast<std::uint16_t>(id)] = s;
  }
  return scores;
}

inline void write_scores_json(const std::string& path,
                              const std::map<std::uint16_t, double>& scores) {
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [id, s] : scores) obj[std::to_string(id)] = s;
  nlohmann::json doc;
  doc["scores"] = obj;
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw io_error("write failed: " + path);
}

inline InstanceLabelMap load_label_map(const std::string& labels_path,
                                       const std::string& scores_path) {
  Gray16Image img = read_gray16_png(labels_path);
  std::map<std::uint16_t, double> scores = read_scores_json(scores_path);
  try {
    return InstanceLabelMap(img.width, img.height, std::move(img.pixels), std::move(scores));
  } catch (const std::invalid_argument& e) {
    throw io_error(labels_path + ": " + e.what());
  }
}

inline void save_label_map(const InstanceLabelMap& map, const std::string& labels_path,
                           const std::string& scores_path) {
  Gray16Image img;
  img.width = map.width();
  img.height = map.height();
  img.pixels = map.labels();
  write_gray16_png(labels_path, img);
  write_scores_json(scores_path, map.scores());
}

inline std::string labels_file(const std::filesystem::path& dir, const std::string& stem) {
  return (dir / (stem + ".labels.png")).string();
}
inline std::string scores_file(const std::filesystem::path& dir, const std::string& stem) {
  return (dir / (stem + ".scores.json")).string();
}

/// Stems that have both a labels raster and a scores sidecar in `dir`,
/// sorted lexicographically. A stem with only one of the pair is an error.
inline std::vector<std::string> list_scene_stems(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw io_error(dir.string() + ": not a directory");
  const std::string labels_suffix = ".labels.png";
  const std::string scores_suffix = ".scores.json";
  std::set<std::string> with_labels, with_scores;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name.size() > labels_suffix.size() &&
        name.compare(name.size() - labels_suffix.size(), labels_suffix.size(), labels_suffix) == 0)
      with_labels.insert(name.substr(0, name.size() - labels_suffix.size()));
    else if (name.size() > scores_suffix.size() &&
             name.compare(name.size() - scores_suffix.size(), scores_suffix.size(),
                          scores_suffix) == 0)
      with_scores.insert(name.substr(0, name.size() - scores_suffix.size()));
  }
  std::vector<std::string> odd;
  std::set_symmetric_difference(with_labels.begin(), with_labels.end(), with_scores.begin(),
                                with_scores.end(), std::back_inserter(odd));
  if (!odd.empty()) {
    std::string msg = dir.string() + ": unpaired scene stems:";
    for (const auto& s : odd) msg += " " + s;
    throw io_error(msg);
  }
  return std::vector<std::string>(with_labels.begin(), with_labels.end());
}

}  // namespace graspkit
