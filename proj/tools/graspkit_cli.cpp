// graspkit command-line front end: plan grasps, evaluate segmentations,
// generate synthetic scenes, render overlays.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "graspkit/graspkit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOpts {
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

class WallClock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_json_file(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw graspkit::io_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw graspkit::io_error("write failed: " + path.string());
}

void write_manifest(const fs::path& path, const std::string& command,
                    const json& config_paths, const GlobalOpts& global, double wall_s) {
  json doc{{"command", command},
           {"version", GRASPKIT_VERSION},
           {"configs", config_paths},
           {"wall_time_s", wall_s}};
  if (global.seed)
    doc["seed"] = *global.seed;
  else
    doc["seed"] = nullptr;
  write_json_file(path, doc);
}

struct PlanArgs {
  std::string labels, scores, camera, gripper;
  std::optional<double> depth;
};

int cmd_plan(const PlanArgs& args, const GlobalOpts& global) {
  WallClock clock;
  const graspkit::InstanceLabelMap map = graspkit::load_label_map(args.labels, args.scores);
  const graspkit::CameraModel cam = graspkit::load_camera(args.camera);
  const graspkit::PlannerConfig cfg = graspkit::load_planner_config(args.gripper);

  const graspkit::PlanResult result =
      graspkit::plan(map, cfg.rect, cfg.gripper, cam, args.depth);

  const fs::path out_dir(global.out);
  fs::create_directories(out_dir);

  graspkit::GraspPose best;
  if (result.best) best = *result.best;
  write_json_file(out_dir / "pose.json", graspkit::pose_to_json(best, cfg.rect));

  json candidates = json::array();
  for (const graspkit::GraspPose& pose : result.candidates)
    candidates.push_back(graspkit::pose_to_json(pose, cfg.rect));
  write_json_file(out_dir / "candidates.json", json{{"candidates", candidates}});

  write_manifest(out_dir / "manifest.json", "plan",
                 json{{"labels", args.labels},
                      {"scores", args.scores},
                      {"camera", args.camera},
                      {"gripper", args.gripper}},
                 global, clock.seconds());

  if (!global.quiet) {
    if (result.best)
      std::cout << "best pose: instance " << result.best->instance << ", angle "
                << result.best->angle << " rad, width " << result.best->width_px << " px, Q "
                << result.best->quality << "\n";
    else
      std::cout << "no valid pose (" << result.candidates.size() << " candidates rejected)\n";
  }
  return result.best ? 0 : 2;
}

struct EvalArgs {
  std::string pred_dir, gt_dir, config;
};

int cmd_eval(const EvalArgs& args, const GlobalOpts& global) {
  WallClock clock;
  graspkit::EvalConfig cfg;
  if (!args.config.empty()) cfg = graspkit::load_eval_config(args.config);

  const std::vector<std::string> pred_stems = graspkit::list_scene_stems(args.pred_dir);
  const std::vector<std::string> gt_stems = graspkit::list_scene_stems(args.gt_dir);
  std::vector<std::string> unmatched;
  std::set_symmetric_difference(pred_stems.begin(), pred_stems.end(), gt_stems.begin(),
                                gt_stems.end(), std::back_inserter(unmatched));
  if (!unmatched.empty()) {
    std::string msg = "unmatched scene stems:";
    for (const std::string& s : unmatched) msg += " " + s;
    throw graspkit::io_error(msg);
  }

  std::vector<graspkit::InstanceLabelMap> predictions;
  std::vector<graspkit::GroundTruthScene> ground_truth;
  for (const std::string& stem : gt_stems) {
    predictions.push_back(graspkit::load_label_map(graspkit::labels_file(args.pred_dir, stem),
                                                   graspkit::scores_file(args.pred_dir, stem)));
    ground_truth.push_back(graspkit::GroundTruthScene::from_map(graspkit::load_label_map(
        graspkit::labels_file(args.gt_dir, stem), graspkit::scores_file(args.gt_dir, stem))));
  }

  const graspkit::EvalReport report = graspkit::evaluate(predictions, ground_truth, cfg);

  const fs::path out_dir(global.out);
  fs::create_directories(out_dir);
  write_json_file(out_dir / "report.json", graspkit::report_to_json(report));
  write_manifest(out_dir / "manifest.json", "eval",
                 json{{"pred", args.pred_dir}, {"gt", args.gt_dir}, {"config", args.config}},
                 global, clock.seconds());

  if (!global.quiet)
    std::cout << "AP=" << report.ap << " AR=" << report.ar << " over " << gt_stems.size()
              << " images\n";
  return 0;
}

struct GenArgs {
  std::string config;
  int count = 1;
};

int cmd_gen(const GenArgs& args, const GlobalOpts& global) {
  WallClock clock;
  graspkit::SceneConfig cfg;
  if (!args.config.empty()) cfg = graspkit::load_scene_config(args.config);
  if (global.seed) cfg.seed = *global.seed;
  if (args.count < 1) throw std::invalid_argument("gen: count must be >= 1");

  const fs::path out_dir(global.out);
  fs::create_directories(out_dir);

  json scene_seeds = json::array();
  json stems = json::array();
  for (int i = 0; i < args.count; ++i) {
    graspkit::SceneConfig scene_cfg = cfg;
    scene_cfg.seed = graspkit::mix_seed(cfg.seed, static_cast<std::uint64_t>(i));
    const graspkit::GroundTruthScene scene = graspkit::generate_scene(scene_cfg);

    char stem[32];
    std::snprintf(stem, sizeof stem, "scene_%04d", i);
    graspkit::save_label_map(scene.map(), graspkit::labels_file(out_dir, stem),
                             graspkit::scores_file(out_dir, stem));
    scene_seeds.push_back(scene_cfg.seed);
    stems.push_back(stem);
  }

  write_json_file(out_dir / "meta.json", json{{"config", graspkit::scene_config_to_json(cfg)},
                                              {"count", args.count},
                                              {"base_seed", cfg.seed},
                                              {"scene_seeds", scene_seeds},
                                              {"stems", stems}});
  write_manifest(out_dir / "manifest.json", "gen", json{{"config", args.config}}, global,
                 clock.seconds());

  if (!global.quiet) std::cout << "wrote " << args.count << " scenes to " << global.out << "\n";
  return 0;
}

struct RenderArgs {
  std::string labels, pose;
};

int cmd_render(const RenderArgs& args, const GlobalOpts& global) {
  WallClock clock;
  graspkit::Gray16Image raster = graspkit::read_gray16_png(args.labels);

  // Rendering needs no confidence sidecar; synthesize unit scores.
  std::map<std::uint16_t, double> scores;
  for (std::uint16_t v : raster.pixels)
    if (v != 0) scores[v] = 1.0;
  const graspkit::InstanceLabelMap map(raster.width, raster.height, std::move(raster.pixels),
                                       std::move(scores));

  graspkit::Rgb8Image img = graspkit::render_labels(map);
  if (!args.pose.empty()) {
    std::ifstream in(args.pose);
    if (!in) throw graspkit::io_error("cannot open " + args.pose);
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw graspkit::io_error(args.pose + ": invalid JSON: " + std::string(e.what()));
    }
    const graspkit::GraspPose pose = graspkit::pose_from_json(doc);
    const graspkit::GraspRectSpec rect = graspkit::rect_from_pose_json(doc);
    graspkit::draw_grasp_overlay(img, map, pose, rect);
  }

  const fs::path out_path(global.out);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  graspkit::write_rgb8_png(out_path.string(), img);

  fs::path manifest = out_path;
  manifest += ".manifest.json";
  write_manifest(manifest, "render", json{{"labels", args.labels}, {"pose", args.pose}}, global,
                 clock.seconds());

  if (!global.quiet) std::cout << "wrote " << global.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graspkit: grasp-pose planning for bin picking"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", GRASPKIT_VERSION);

  GlobalOpts global;
  app.add_option("--seed", global.seed, "Seed override for seeded commands");
  app.add_option("--out", global.out, "Output directory (plan/eval/gen) or image path (render)");
  app.add_flag("--quiet", global.quiet, "Suppress progress output");

  PlanArgs plan_args;
  CLI::App* plan = app.add_subcommand("plan", "Plan a grasp pose from a segmentation label map");
  plan->add_option("--labels", plan_args.labels, "Instance label raster (.labels.png)")
      ->required();
  plan->add_option("--scores", plan_args.scores, "Confidence sidecar (.scores.json)")->required();
  plan->add_option("--camera", plan_args.camera, "Camera config JSON")->required();
  plan->add_option("--gripper", plan_args.gripper, "Gripper/rectangle config JSON")->required();
  plan->add_option("--depth", plan_args.depth, "Working depth override in meters");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate predicted masks against ground truth");
  eval->add_option("--pred", eval_args.pred_dir, "Directory of predicted scene pairs")
      ->required();
  eval->add_option("--gt", eval_args.gt_dir, "Directory of ground-truth scene pairs")->required();
  eval->add_option("--config", eval_args.config, "Evaluation config JSON");

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate synthetic bin scenes");
  gen->add_option("--config", gen_args.config, "Scene config JSON");
  gen->add_option("--count", gen_args.count, "Number of scenes to generate");

  RenderArgs render_args;
  CLI::App* render = app.add_subcommand("render", "Render a colorized overlay image");
  render->add_option("--labels", render_args.labels, "Instance label raster (.labels.png)")
      ->required();
  render->add_option("--pose", render_args.pose, "Pose document to draw");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (plan->parsed() || eval->parsed() || gen->parsed() || render->parsed()) {
      if (global.out.empty()) throw std::invalid_argument("--out is required");
    }
    if (plan->parsed()) return cmd_plan(plan_args, global);
    if (eval->parsed()) return cmd_eval(eval_args, global);
    if (gen->parsed()) return cmd_gen(gen_args, global);
    if (render->parsed()) return cmd_render(render_args, global);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
