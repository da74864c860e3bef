#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "graspkit/png_io.hpp"

namespace graspkit {

/// Pinhole intrinsics plus a rigid camera-to-world transform and the nominal
/// camera-to-bin-floor working distance used whenever no per-point depth is
/// supplied.
struct CameraModel {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 320.0;
  double cy = 240.0;
  Eigen::Matrix3d cam_to_world_rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d cam_to_world_translation = Eigen::Vector3d::Zero();
  double nominal_depth = 0.7;

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
      throw std::invalid_argument("CameraModel: focal lengths must be positive");
    if (!(nominal_depth > 0.0))
      throw std::invalid_argument("CameraModel: nominal depth must be positive");
    const Eigen::Matrix3d& r = cam_to_world_rotation;
    const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (ortho > 1e-9 || std::abs(r.determinant() - 1.0) > 1e-9)
      throw std::invalid_argument("CameraModel: rotation is not orthonormal");
  }
};

struct PixelDepth {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

/// Back-projects pixel (u, v) at the given depth (camera-frame z, meters) and
/// maps the point into the world frame. Depth defaults to the nominal working
/// distance.
inline Eigen::Vector3d pixel_to_world(const CameraModel& cam, double u, double v,
                                      std::optional<double> depth = std::nullopt) {
  const double z = depth.value_or(cam.nominal_depth);
  if (!(z > 0.0)) throw std::invalid_argument("pixel_to_world: depth must be positive");
  const Eigen::Vector3d p_cam((u - cam.cx) * z / cam.fx, (v - cam.cy) * z / cam.fy, z);
  return cam.cam_to_world_rotation * p_cam + cam.cam_to_world_translation;
}

/// Exact algebraic inverse of pixel_to_world. The point must be in front of
/// the camera.
inline PixelDepth world_to_pixel(const CameraModel& cam, const Eigen::Vector3d& p_world) {
  const Eigen::Vector3d p_cam =
      cam.cam_to_world_rotation.transpose() * (p_world - cam.cam_to_world_translation);
  if (!(p_cam.z() > 0.0)) throw std::invalid_argument("world_to_pixel: point behind camera");
  return PixelDepth{cam.fx * p_cam.x() / p_cam.z() + cam.cx,
                    cam.fy * p_cam.y() / p_cam.z() + cam.cy, p_cam.z()};
}

/// Image-plane extent of a physical length at the given depth, along the
/// horizontal axis (the grasp closing direction after alignment).
inline double meters_to_pixels(const CameraModel& cam, double length_m, double depth) {
  if (!(depth > 0.0)) throw std::invalid_argument("meters_to_pixels: depth must be positive");
  return length_m * cam.fx / depth;
}

inline double pixels_to_meters(const CameraModel& cam, double length_px, double depth) {
  if (!(depth > 0.0)) throw std::invalid_argument("pixels_to_meters: depth must be positive");
  return length_px * depth / cam.fx;
}

// Config document:
// {"fx":..., "fy":..., "cx":..., "cy":..., "nominal_depth_m":...,
//  "cam_to_world": {"rotation": [9 floats row-major], "translation": [3 floats]}}

inline CameraModel camera_from_json(const nlohmann::json& doc) {
  CameraModel cam;
  try {
    cam.fx = doc.at("fx").get<double>();
    cam.fy = doc.at("fy").get<double>();
    cam.cx = doc.at("cx").get<double>();
    cam.cy = doc.at("cy").get<double>();
    cam.nominal_depth = doc.at("nominal_depth_m").get<double>();
    if (doc.contains("cam_to_world")) {
      const auto& ext = doc.at("cam_to_world");
      const auto rot = ext.at("rotation").get<std::vector<double>>();
      const auto tr = ext.at("translation").get<std::vector<double>>();
      if (rot.size() != 9 || tr.size() != 3)
        throw std::invalid_argument("cam_to_world: expected 9 rotation and 3 translation floats");
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) cam.cam_to_world_rotation(r, c) = rot[3 * r + c];
      cam.cam_to_world_translation = Eigen::Vector3d(tr[0], tr[1], tr[2]);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("camera config: ") + e.what());
  }
  cam.validate();
  return cam;
}

inline nlohmann::json camera_to_json(const CameraModel& cam) {
  std::vector<double> rot(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot[3 * r + c] = cam.cam_to_world_rotation(r, c);
  return nlohmann::json{
      {"fx", cam.fx},
      {"fy", cam.fy},
      {"cx", cam.cx},
      {"cy", cam.cy},
      {"nominal_depth_m", cam.nominal_depth},
      {"cam_to_world",
       {{"rotation", rot},
        {"translation",
         {cam.cam_to_world_translation.x(), cam.cam_to_world_translation.y(),
          cam.cam_to_world_translation.z()}}}}};
}

inline CameraModel load_camera(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": invalid JSON: " + e.what());
  }
  try {
    return camera_from_json(doc);
  } catch (const std::invalid_argument& e) {
    throw io_error(path + ": " + e.what());
  }
}

}  // namespace graspkit
