// Generates a synthetic bin scene, plans a grasp on it, and writes the
// annotated overlay next to the pose document.
#include <cstdio>
#include <fstream>

#include <graspkit/graspkit.hpp>

int main() {
  graspkit::SceneConfig scene_cfg;
  scene_cfg.width = 160;
  scene_cfg.height = 160;
  scene_cfg.min_objects = 2;
  scene_cfg.max_objects = 5;
  scene_cfg.min_size = 16.0;
  scene_cfg.max_size = 40.0;
  scene_cfg.seed = 42;
  const graspkit::GroundTruthScene scene = graspkit::generate_scene(scene_cfg);
  std::printf("scene: %zu instances on a %dx%d canvas\n", scene.instances().size(),
              scene.map().width(), scene.map().height());

  graspkit::CameraModel cam;
  cam.cx = scene_cfg.width / 2.0;
  cam.cy = scene_cfg.height / 2.0;

  graspkit::GraspRectSpec rect;
  rect.gw = 64;
  rect.gb = 24;
  rect.angle_count = 6;
  graspkit::GripperSpec gripper;  // defaults: 0.11 m opening, 12 mm fingers

  const graspkit::PlanResult result = graspkit::plan(scene.map(), rect, gripper, cam);
  std::printf("evaluated %zu candidates\n", result.candidates.size());
  if (!result.best) {
    std::printf("no graspable pose under the current gripper limits\n");
    return 1;
  }

  const graspkit::GraspPose& best = *result.best;
  std::printf("best: instance %u, angle %.1f deg, width %.1f px, Q %.1f\n", best.instance,
              best.angle * 180.0 / 3.14159265358979323846, best.width_px, best.quality);
  std::printf("breakdown: oss %.1f cts %.1f ss %.1f\n", best.breakdown.oss, best.breakdown.cts,
              best.breakdown.ss);
  if (best.world)
    std::printf("world: position (%.3f, %.3f, %.3f) m, yaw %.3f rad, opening %.3f m\n",
                best.world->position.x(), best.world->position.y(), best.world->position.z(),
                best.world->yaw, best.world->width_m);

  std::ofstream("plan_demo_pose.json") << graspkit::pose_to_json(best, rect).dump(2) << "\n";

  graspkit::Rgb8Image overlay = graspkit::render_labels(scene.map());
  graspkit::draw_grasp_overlay(overlay, scene.map(), best, rect);
  graspkit::write_rgb8_png("plan_demo_overlay.png", overlay);
  std::printf("wrote plan_demo_pose.json and plan_demo_overlay.png\n");
  return 0;
}
