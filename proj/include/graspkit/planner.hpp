#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspkit/camera.hpp"
#include "graspkit/crop.hpp"
#include "graspkit/geometry.hpp"
#include "graspkit/label_map.hpp"

namespace graspkit {

/// Grasp rectangle dimensions in pixels and the number of equally spaced
/// candidate angles sampled per instance.
struct GraspRectSpec {
  int gw = 96;  // rectangle width, along the closing direction
  int gb = 32;  // rectangle breadth
  int angle_count = 6;

  void validate() const {
    if (gw < 1 || gb < 1) throw std::invalid_argument("GraspRectSpec: gw and gb must be >= 1");
    if (angle_count < 1) throw std::invalid_argument("GraspRectSpec: angle count must be >= 1");
  }
};

/// Physical parallel-jaw gripper limits.
struct GripperSpec {
  double max_opening = 0.11;   // meters
  double finger_width = 0.012; // meters

  void validate() const {
    if (!(max_opening > 0.0) || !(finger_width > 0.0))
      throw std::invalid_argument("GripperSpec: dimensions must be positive");
    if (!(finger_width < max_opening))
      throw std::invalid_argument("GripperSpec: finger width must be below max opening");
  }
};

/// Subsector classes within a grasp rectangle: target-contact, unobstructed
/// (background), and collision (other instances).
enum class Sector : std::uint8_t { TC, UO, CL };

/// Per-cell subsector classification of one aligned crop. The three classes
/// partition the rectangle.
struct SubsectorMap {
  int gw = 0;
  int gb = 0;
  std::uint16_t target_id = 0;
  std::vector<Sector> cells;

  Sector at(int row, int col) const { return cells[static_cast<std::size_t>(row) * gw + col]; }
  std::int64_t count(Sector s) const {
    std::int64_t n = 0;
    for (Sector c : cells) n += (c == s);
    return n;
  }
};

struct QualityBreakdown {
  double oss = 0.0;
  double cts = 0.0;
  double ss = 0.0;
};

inline double quality_of(const QualityBreakdown& b) { return (b.oss + b.cts + b.ss) / 3.0; }

/// Grasp pose expressed in the robot's world frame.
struct WorldGrasp {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;      // about world z, wrapped to [0, pi)
  double width_m = 0.0;  // jaw opening
};

/// The planner's unit of output: center P, planar angle Theta, jaw width W,
/// and quality index Q, plus the score breakdown and validity state.
struct GraspPose {
  Vec2 center;
  double angle = 0.0;
  double width_px = 0.0;
  double quality = 0.0;
  QualityBreakdown breakdown;
  std::uint16_t instance = 0;
  int angle_index = 0;
  bool valid = false;
  std::optional<WorldGrasp> world;
};

struct CandidateSample {
  std::uint16_t instance = 0;
  Vec2 center;
  double angle = 0.0;
  int angle_index = 0;
};

/// One candidate per (instance, angle) pair: centers at instance centroids,
/// angles k*pi/D for k = 0..D-1, ordered by ascending id then angle index.
inline std::vector<CandidateSample> sample_candidates(const InstanceLabelMap& map,
                                                      const GraspRectSpec& rect) {
  rect.validate();
  constexpr double pi = 3.14159265358979323846;
  std::vector<CandidateSample> out;
  for (const auto& [id, st] : instance_stats(map))
    for (int k = 0; k < rect.angle_count; ++k)
      out.push_back(CandidateSample{id, st.centroid, k * pi / rect.angle_count, k});
  return out;
}

/// Classifies every crop cell: target pixels form the tactile contact sector,
/// background the unobstructed sector, anything else the collision sector.
inline SubsectorMap identify_subsectors(const AlignedCrop& crop, std::uint16_t target) {
  if (target == 0) throw std::invalid_argument("identify_subsectors: target id must be nonzero");
  SubsectorMap sub;
  sub.gw = crop.gw;
  sub.gb = crop.gb;
  sub.target_id = target;
  sub.cells.resize(crop.cells.size());
  for (std::size_t i = 0; i < crop.cells.size(); ++i)
    sub.cells[i] = crop.cells[i] == target ? Sector::TC
                 : crop.cells[i] == 0     ? Sector::UO
                                          : Sector::CL;
  return sub;
}

/// Object width plus the minimum free-space run widths immediately left and
/// right of the object, all along the closing (column) axis.
struct SectorWidths {
  int object_width = 0;
  int fsl_width = 0;
  int fsr_width = 0;
};

/// Per row holding contact cells: the object span is [min TC col, max TC col];
/// the left run is the contiguous UO stretch ending just before the span, the
/// right run the stretch starting just after it. Aggregates max span width and
/// min run widths over those rows. Rows without contact cells contribute
/// nothing.
inline SectorWidths measure_widths(const SubsectorMap& sub) {
  SectorWidths w;
  w.fsl_width = sub.gw;
  w.fsr_width = sub.gw;
  bool any_tc = false;
  for (int r = 0; r < sub.gb; ++r) {
    int lmin = -1, rmax = -1;
    for (int c = 0; c < sub.gw; ++c)
      if (sub.at(r, c) == Sector::TC) {
        if (lmin < 0) lmin = c;
        rmax = c;
      }
    if (lmin < 0) continue;
    any_tc = true;
    w.object_width = std::max(w.object_width, rmax - lmin + 1);

    int run = 0;
    for (int c = lmin - 1; c >= 0 && sub.at(r, c) == Sector::UO; --c) ++run;
    w.fsl_width = std::min(w.fsl_width, run);
    run = 0;
    for (int c = rmax + 1; c < sub.gw && sub.at(r, c) == Sector::UO; ++c) ++run;
    w.fsr_width = std::min(w.fsr_width, run);
  }
  if (!any_tc) throw std::invalid_argument("measure_widths: empty contact sector");
  return w;
}

/// Validity condition with strict inequalities: both free-space runs must
/// exceed the finger width and the object must be narrower than the maximum
/// opening.
inline bool passes_filter(const SectorWidths& w, double finger_width_px,
                          double max_opening_px) {
  return w.fsl_width > finger_width_px && w.fsr_width > finger_width_px &&
         w.object_width < max_opening_px;
}

/// Same condition with the gripper limits converted to pixels at the working
/// depth (nominal by default).
inline bool filter_pose(const SectorWidths& w, const GripperSpec& gripper, const CameraModel& cam,
                        std::optional<double> depth = std::nullopt) {
  const double z = depth.value_or(cam.nominal_depth);
  return passes_filter(w, meters_to_pixels(cam, gripper.finger_width, z),
                       meters_to_pixels(cam, gripper.max_opening, z));
}

struct Refinement {
  Vec2 center;        // image coordinates
  double width_px = 0.0;
};

/// Repositions the center onto the contact-sector centroid (mapped back to
/// image coordinates) and refines the width as the distance between the
/// column centroids of the right and left free regions. Only meaningful for
/// poses that passed filtration, which guarantees both regions are nonempty.
inline Refinement finetune_pose(const SubsectorMap& sub, const AlignedCrop& crop) {
  std::int64_t n_tc = 0;
  double sum_row = 0.0, sum_col = 0.0;
  std::int64_t n_left = 0, n_right = 0;
  double sum_left = 0.0, sum_right = 0.0;

  for (int r = 0; r < sub.gb; ++r) {
    int lmin = -1, rmax = -1;
    for (int c = 0; c < sub.gw; ++c)
      if (sub.at(r, c) == Sector::TC) {
        if (lmin < 0) lmin = c;
        rmax = c;
        ++n_tc;
        sum_row += r;
        sum_col += c;
      }
    if (lmin < 0) continue;
    for (int c = lmin - 1; c >= 0 && sub.at(r, c) == Sector::UO; --c) {
      ++n_left;
      sum_left += c;
    }
    for (int c = rmax + 1; c < sub.gw && sub.at(r, c) == Sector::UO; ++c) {
      ++n_right;
      sum_right += c;
    }
  }
  if (n_tc == 0) throw std::invalid_argument("finetune_pose: empty contact sector");
  if (n_left == 0 || n_right == 0)
    throw std::logic_error("finetune_pose: empty free region on a filtered pose");

  Refinement fine;
  fine.center = crop_to_image(crop, sum_col / n_tc, sum_row / n_tc);
  fine.width_px = sum_right / n_right - sum_left / n_left;
  return fine;
}

/// OSS: unobstructed fraction of the rectangle. CTS: contact fraction of the
/// central region (half the rectangle dimensions, centered). SS: segmentation
/// confidence. All scaled to [0, 100].
inline QualityBreakdown score_pose(const SubsectorMap& sub, double confidence,
                                   const GraspRectSpec& rect) {
  const int cw = (rect.gw + 1) / 2;
  const int ch = (rect.gb + 1) / 2;
  const int c0 = (rect.gw - cw) / 2;
  const int r0 = (rect.gb - ch) / 2;
  std::int64_t tc_central = 0;
  for (int r = r0; r < r0 + ch; ++r)
    for (int c = c0; c < c0 + cw; ++c) tc_central += (sub.at(r, c) == Sector::TC);

  QualityBreakdown b;
  b.oss = 100.0 * static_cast<double>(sub.count(Sector::UO)) /
          (static_cast<double>(rect.gw) * rect.gb);
  b.cts = 100.0 * static_cast<double>(tc_central) / (static_cast<double>(cw) * ch);
  b.ss = 100.0 * confidence;
  return b;
}

struct PlanResult {
  std::optional<GraspPose> best;
  std::vector<GraspPose> candidates;
};

/// Runs the full pipeline per candidate: crop, subsector identification,
/// width measurement, filtration, finetuning, scoring; then picks the valid
/// pose with the highest quality. Ties break toward the lower instance id,
/// then the lower angle index (the candidate ordering), so the result is
/// independent of evaluation order. Candidates that fail filtration (or have
/// no contact pixels under the rectangle) are reported with the initial fixed
/// width and zero quality.
inline PlanResult plan(const InstanceLabelMap& map, const GraspRectSpec& rect,
                       const GripperSpec& gripper, const CameraModel& cam,
                       std::optional<double> depth = std::nullopt) {
  rect.validate();
  gripper.validate();
  cam.validate();
  const double z = depth.value_or(cam.nominal_depth);
  if (!(z > 0.0)) throw std::invalid_argument("plan: depth must be positive");
  const double finger_px = meters_to_pixels(cam, gripper.finger_width, z);
  const double opening_px = meters_to_pixels(cam, gripper.max_opening, z);

  PlanResult result;
  std::size_t best_index = 0;
  bool have_best = false;

  for (const CandidateSample& cand : sample_candidates(map, rect)) {
    GraspPose pose;
    pose.center = cand.center;
    pose.angle = cand.angle;
    pose.angle_index = cand.angle_index;
    pose.instance = cand.instance;
    pose.width_px = rect.gw;  // initial fixed width

    const AlignedCrop crop = crop_aligned_rect(map, cand.center, cand.angle, rect.gw, rect.gb);
    const SubsectorMap sub = identify_subsectors(crop, cand.instance);

    if (sub.count(Sector::TC) > 0) {
      const SectorWidths widths = measure_widths(sub);
      if (passes_filter(widths, finger_px, opening_px)) {
        const Refinement fine = finetune_pose(sub, crop);
        pose.center = fine.center;
        pose.width_px = fine.width_px;
        pose.breakdown = score_pose(sub, map.score_of(cand.instance), rect);
        pose.quality = quality_of(pose.breakdown);
        pose.valid = true;

        WorldGrasp world;
        world.position = pixel_to_world(cam, fine.center.u, fine.center.v, z);
        const Eigen::Vector3d closing_dir = cam.cam_to_world_rotation *
            Eigen::Vector3d(std::cos(cand.angle), std::sin(cand.angle), 0.0);
        world.yaw = wrap_angle_half_turn(std::atan2(closing_dir.y(), closing_dir.x()));
        world.width_m = pixels_to_meters(cam, fine.width_px, z);
        pose.world = world;
      }
    }

    result.candidates.push_back(pose);
    if (pose.valid && (!have_best || pose.quality > result.candidates[best_index].quality)) {
      best_index = result.candidates.size() - 1;
      have_best = true;
    }
  }
  if (have_best) result.best = result.candidates[best_index];
  return result;
}

// ---------------------------------------------------------------------------
// Document formats
// ---------------------------------------------------------------------------

struct PlannerConfig {
  GraspRectSpec rect;
  GripperSpec gripper;
};

// {"max_opening_m":..., "finger_width_m":..., "gw_px":..., "gb_px":..., "D":6}
inline PlannerConfig planner_config_from_json(const nlohmann::json& doc) {
  PlannerConfig cfg;
  try {
    if (doc.contains("max_opening_m")) cfg.gripper.max_opening = doc.at("max_opening_m").get<double>();
    if (doc.contains("finger_width_m"))
      cfg.gripper.finger_width = doc.at("finger_width_m").get<double>();
    if (doc.contains("gw_px")) cfg.rect.gw = doc.at("gw_px").get<int>();
    if (doc.contains("gb_px")) cfg.rect.gb = doc.at("gb_px").get<int>();
    if (doc.contains("D")) cfg.rect.angle_count = doc.at("D").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("gripper config: ") + e.what());
  }
  cfg.rect.validate();
  cfg.gripper.validate();
  return cfg;
}

inline nlohmann::json planner_config_to_json(const PlannerConfig& cfg) {
  return nlohmann::json{{"max_opening_m", cfg.gripper.max_opening},
                        {"finger_width_m", cfg.gripper.finger_width},
                        {"gw_px", cfg.rect.gw},
                        {"gb_px", cfg.rect.gb},
                        {"D", cfg.rect.angle_count}};
}

inline PlannerConfig load_planner_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": invalid JSON: " + e.what());
  }
  try {
    return planner_config_from_json(doc);
  } catch (const std::invalid_argument& e) {
    throw io_error(path + ": " + e.what());
  }
}

inline nlohmann::json pose_to_json(const GraspPose& pose, const GraspRectSpec& rect,
                                   std::optional<double> width_m = std::nullopt) {
  nlohmann::json doc{{"valid", pose.valid},
                     {"center_px", {pose.center.u, pose.center.v}},
                     {"angle_rad", pose.angle},
                     {"width_px", pose.width_px},
                     {"quality", pose.quality},
                     {"breakdown",
                      {{"oss", pose.breakdown.oss},
                       {"cts", pose.breakdown.cts},
                       {"ss", pose.breakdown.ss}}},
                     {"instance", pose.instance},
                     {"rect_px", {rect.gw, rect.gb}}};
  if (pose.world) {
    doc["width_m"] = pose.world->width_m;
    doc["world"] = {{"xyz_m",
                     {pose.world->position.x(), pose.world->position.y(),
                      pose.world->position.z()}},
                    {"yaw_rad", pose.world->yaw}};
  } else if (width_m) {
    doc["width_m"] = *width_m;
  }
  return doc;
}

inline GraspPose pose_from_json(const nlohmann::json& doc) {
  GraspPose pose;
  try {
    pose.valid = doc.at("valid").get<bool>();
    pose.center = Vec2{doc.at("center_px").at(0).get<double>(),
                       doc.at("center_px").at(1).get<double>()};
    pose.angle = doc.at("angle_rad").get<double>();
    pose.width_px = doc.at("width_px").get<double>();
    pose.quality = doc.at("quality").get<double>();
    pose.breakdown.oss = doc.at("breakdown").at("oss").get<double>();
    pose.breakdown.cts = doc.at("breakdown").at("cts").get<double>();
    pose.breakdown.ss = doc.at("breakdown").at("ss").get<double>();
    pose.instance = doc.at("instance").get<std::uint16_t>();
    if (doc.contains("world")) {
      WorldGrasp world;
      const auto& w = doc.at("world");
      world.position = Eigen::Vector3d(w.at("xyz_m").at(0).get<double>(),
                                       w.at("xyz_m").at(1).get<double>(),
                                       w.at("xyz_m").at(2).get<double>());
      world.yaw = w.at("yaw_rad").get<double>();
      world.width_m = doc.value("width_m", 0.0);
      pose.world = world;
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("pose document: ") + e.what());
  }
  return pose;
}

/// Rectangle dimensions recorded in a pose document, needed to redraw the
/// sampling rectangle.
inline GraspRectSpec rect_from_pose_json(const nlohmann::json& doc) {
  GraspRectSpec rect;
  try {
    rect.gw = doc.at("rect_px").at(0).get<int>();
    rect.gb = doc.at("rect_px").at(1).get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("pose document: ") + e.what());
  }
  rect.validate();
  return rect;
}

}  // namespace graspkit
