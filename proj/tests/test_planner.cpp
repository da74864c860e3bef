#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspkit/graspkit.hpp"
#include "oracles.hpp"

using graspkit::GraspRectSpec;
using graspkit::GripperSpec;
using graspkit::Sector;
using graspkit::SubsectorMap;
using graspkit::Vec2;

namespace {

constexpr double kPi = 3.14159265358979323846;

SubsectorMap sub_from_rows(const std::vector<std::string>& rows) {
  SubsectorMap sub;
  sub.gb = static_cast<int>(rows.size());
  sub.gw = static_cast<int>(rows.front().size());
  sub.target_id = 1;
  for (const std::string& row : rows)
    for (const char ch : row)
      sub.cells.push_back(ch == 'T' ? Sector::TC : ch == 'U' ? Sector::UO : Sector::CL);
  return sub;
}

graspkit::InstanceLabelMap block_map(int w, int h, int x0, int x1, int y0, int y1,
                                     std::uint16_t id = 1, double score = 1.0) {
  std::vector<std::uint16_t> labels(static_cast<std::size_t>(w) * h, 0);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) labels[static_cast<std::size_t>(y) * w + x] = id;
  return graspkit::InstanceLabelMap(w, h, std::move(labels), {{id, score}});
}

}  // namespace

TEST_CASE("candidates pair every instance with every angle") {
  std::vector<std::uint16_t> labels(10 * 10, 0);
  labels[5 * 10 + 2] = 3;
  labels[5 * 10 + 3] = 3;
  labels[7 * 10 + 8] = 7;
  const auto map = oracle::make_map(10, 10, labels);

  const auto cands = graspkit::sample_candidates(map, GraspRectSpec{4, 2, 6});
  REQUIRE(cands.size() == 12);
  for (int k = 0; k < 6; ++k) {
    REQUIRE(cands[k].instance == 3);
    REQUIRE(cands[k].angle_index == k);
    REQUIRE(cands[k].angle == k * kPi / 6);
    REQUIRE((cands[k].center == Vec2{2.5, 5.0}));
    REQUIRE(cands[6 + k].instance == 7);
    REQUIRE((cands[6 + k].center == Vec2{8.0, 7.0}));
  }
}

TEST_CASE("subsectors partition the crop into contact, free and collision") {
  graspkit::AlignedCrop crop;
  crop.gw = 6;
  crop.gb = 4;
  crop.cells = {0, 0, 1, 1, 0, 0,   //
                0, 1, 1, 1, 1, 0,   //
                0, 1, 1, 0, 2, 0,   //
                0, 0, 0, 0, 0, 0};
  const SubsectorMap sub = graspkit::identify_subsectors(crop, 1);
  REQUIRE(sub.count(Sector::TC) == 8);
  REQUIRE(sub.count(Sector::CL) == 1);
  REQUIRE(sub.count(Sector::UO) == 15);
  REQUIRE(sub.at(2, 4) == Sector::CL);
  REQUIRE(sub.at(0, 2) == Sector::TC);
  REQUIRE(sub.at(3, 0) == Sector::UO);

  REQUIRE_THROWS_AS(graspkit::identify_subsectors(crop, 0), std::invalid_argument);
}

TEST_CASE("width measurement scans per contact row") {
  SECTION("single row with collision walls") {
    const auto w = graspkit::measure_widths(sub_from_rows({"CUUTTUUC"}));
    REQUIRE(w.object_width == 2);
    REQUIRE(w.fsl_width == 2);
    REQUIRE(w.fsr_width == 2);
  }
  SECTION("contact spanning the full rectangle leaves no free space") {
    const auto w = graspkit::measure_widths(sub_from_rows({"TTTTT"}));
    REQUIRE(w.object_width == 5);
    REQUIRE(w.fsl_width == 0);
    REQUIRE(w.fsr_width == 0);
  }
  SECTION("contact touching the left edge blocks the left run") {
    const auto w = graspkit::measure_widths(sub_from_rows({"TTUUUU"}));
    REQUIRE(w.object_width == 2);
    REQUIRE(w.fsl_width == 0);
    REQUIRE(w.fsr_width == 4);
  }
  SECTION("the span covers interior gaps") {
    const auto w = graspkit::measure_widths(sub_from_rows({"UTUTTU"}));
    REQUIRE(w.object_width == 4);  // columns 1..4 inclusive
    REQUIRE(w.fsl_width == 1);
    REQUIRE(w.fsr_width == 1);
  }
  SECTION("aggregation takes max span and min runs over contact rows") {
    const auto w = graspkit::measure_widths(sub_from_rows({
        "UUUTUUUU",   // span 1, left 3, right 4
        "UTTTTTUU",   // span 5, left 1, right 2
        "UUUUUUUU",   // no contact, ignored
    }));
    REQUIRE(w.object_width == 5);
    REQUIRE(w.fsl_width == 1);
    REQUIRE(w.fsr_width == 2);
  }
  SECTION("collision next to the object stops the run immediately") {
    const auto w = graspkit::measure_widths(sub_from_rows({"UCTTUU"}));
    REQUIRE(w.fsl_width == 0);
    REQUIRE(w.fsr_width == 2);
  }
  SECTION("a contact-free rectangle cannot be measured") {
    REQUIRE_THROWS_WITH(graspkit::measure_widths(sub_from_rows({"UUUU", "UCUU"})),
                        Catch::Matchers::ContainsSubstring("empty contact sector"));
  }
}

TEST_CASE("filtration uses strict inequalities on both limits") {
  auto widths = [](int ow, int fsl, int fsr) {
    graspkit::SectorWidths w;
    w.object_width = ow;
    w.fsl_width = fsl;
    w.fsr_width = fsr;
    return w;
  };
  const double finger = 2.0, opening = 5.0;
  REQUIRE(graspkit::passes_filter(widths(4, 3, 3), finger, opening));
  REQUIRE_FALSE(graspkit::passes_filter(widths(5, 3, 3), finger, opening));  // equality fails
  REQUIRE_FALSE(graspkit::passes_filter(widths(6, 3, 3), finger, opening));
  REQUIRE_FALSE(graspkit::passes_filter(widths(4, 2, 3), finger, opening));  // equality fails
  REQUIRE_FALSE(graspkit::passes_filter(widths(4, 3, 2), finger, opening));  // equality fails
  REQUIRE_FALSE(graspkit::passes_filter(widths(4, 1, 1), finger, opening));
  REQUIRE(graspkit::passes_filter(widths(1, 9, 9), finger, opening));
}

TEST_CASE("filter_pose converts gripper limits at the working depth") {
  graspkit::CameraModel cam;
  cam.fx = 128.0;  // power of two so the conversions below are exact
  const GripperSpec grip{9.0 / 128.0, 5.0 / 128.0};
  auto widths = [](int ow, int fsl, int fsr) {
    graspkit::SectorWidths w;
    w.object_width = ow;
    w.fsl_width = fsl;
    w.fsr_width = fsr;
    return w;
  };
  // finger_px = 5.0 and opening_px = 9.0 exactly at depth 1.
  REQUIRE(graspkit::filter_pose(widths(8, 6, 6), grip, cam, 1.0));
  REQUIRE_FALSE(graspkit::filter_pose(widths(9, 6, 6), grip, cam, 1.0));
  REQUIRE_FALSE(graspkit::filter_pose(widths(8, 5, 6), grip, cam, 1.0));
  REQUIRE_FALSE(graspkit::filter_pose(widths(8, 6, 5), grip, cam, 1.0));
  // Doubling the depth halves the pixel extents: finger 2.5 px, opening 4.5 px.
  REQUIRE(graspkit::filter_pose(widths(4, 3, 3), grip, cam, 2.0));
  REQUIRE_FALSE(graspkit::filter_pose(widths(4, 2, 3), grip, cam, 2.0));
}

TEST_CASE("finetuning recenters on the contact centroid and measures free-run centroids") {
  // Crop at (5,2), angle 0: both rows read UUTTUU.
  const auto map = block_map(12, 6, 4, 5, 1, 2);
  const auto crop = graspkit::crop_aligned_rect(map, Vec2{5.0, 2.0}, 0.0, 6, 2);
  const auto sub = graspkit::identify_subsectors(crop, 1);
  const auto fine = graspkit::finetune_pose(sub, crop);

  // Aligned contact centroid (2.5, 0.5) maps to (5-0.5, 2-0.5).
  REQUIRE(fine.center.u == 4.5);
  REQUIRE(fine.center.v == 1.5);
  // Free column centroids: left {0,1} -> 0.5, right {4,5} -> 4.5.
  REQUIRE(fine.width_px == 4.0);
}

TEST_CASE("finetuning rejects rectangles it cannot refine") {
  const auto tc_less = sub_from_rows({"UUUU"});
  graspkit::AlignedCrop crop;
  crop.gw = 4;
  crop.gb = 1;
  crop.cells = {0, 0, 0, 0};
  REQUIRE_THROWS_AS(graspkit::finetune_pose(tc_less, crop), std::invalid_argument);

  const auto jammed = sub_from_rows({"TTTT"});
  crop.cells = {1, 1, 1, 1};
  REQUIRE_THROWS_AS(graspkit::finetune_pose(jammed, crop), std::logic_error);
}

TEST_CASE("scoring matches the hand-computed breakdown") {
  // 20x10 rectangle; central region is rows 2..6, columns 5..14.
  std::vector<std::string> rows(10, std::string(20, 'U'));
  for (int r = 2; r <= 6; ++r)
    for (int c = 5; c <= 14; ++c) rows[r][c] = 'T';
  for (int c = 0; c < 20; ++c) {
    rows[8][c] = 'C';
    rows[9][c] = 'C';
  }
  for (int c = 0; c < 10; ++c) rows[7][c] = 'C';
  const SubsectorMap sub = sub_from_rows(rows);
  REQUIRE(sub.count(Sector::TC) == 50);
  REQUIRE(sub.count(Sector::CL) == 50);
  REQUIRE(sub.count(Sector::UO) == 100);

  const auto b = graspkit::score_pose(sub, 0.9, GraspRectSpec{20, 10, 6});
  REQUIRE(b.oss == 50.0);
  REQUIRE(b.cts == 100.0);
  REQUIRE(b.ss == 90.0);
  REQUIRE(graspkit::quality_of(b) == 80.0);
}

TEST_CASE("an empty map plans to nothing") {
  const auto map = oracle::make_map(8, 8, std::vector<std::uint16_t>(64, 0));
  const auto result = graspkit::plan(map, GraspRectSpec{4, 2, 4}, GripperSpec{}, {});
  REQUIRE_FALSE(result.best.has_value());
  REQUIRE(result.candidates.empty());
}

TEST_CASE("a lone graspable object yields a valid world pose") {
  const auto map = block_map(30, 16, 13, 16, 6, 9);
  graspkit::CameraModel cam;
  cam.fx = 100.0;
  cam.fy = 100.0;
  const GripperSpec grip{0.06, 0.003};  // 6 px opening, 0.3 px finger at depth 1
  const GraspRectSpec rect{12, 6, 4};

  const auto result = graspkit::plan(map, rect, grip, cam, 1.0);
  REQUIRE(result.best.has_value());
  REQUIRE(result.candidates.size() == 4);
  const auto& best = *result.best;
  REQUIRE(best.valid);
  REQUIRE(best.instance == 1);
  REQUIRE(best.quality > 0.0);
  REQUIRE(best.quality <= 100.0);
  REQUIRE(best.world.has_value());
  // Identity extrinsics keep the planar angle (up to trig round-trip noise).
  REQUIRE_THAT(best.world->yaw, Catch::Matchers::WithinAbs(best.angle, 1e-12));
  REQUIRE_THAT(best.world->width_m,
               Catch::Matchers::WithinAbs(best.width_px * 1.0 / 100.0, 1e-12));
  const Eigen::Vector3d expect = graspkit::pixel_to_world(cam, best.center.u, best.center.v, 1.0);
  REQUIRE((best.world->position - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quality ties break toward the lower instance id") {
  // Two identical, well-separated blocks with equal confidence.
  std::vector<std::uint16_t> labels(40 * 10, 0);
  for (int y = 3; y <= 6; ++y)
    for (int x = 5; x <= 8; ++x) labels[static_cast<std::size_t>(y) * 40 + x] = 1;
  for (int y = 3; y <= 6; ++y)
    for (int x = 25; x <= 28; ++x) labels[static_cast<std::size_t>(y) * 40 + x] = 2;
  const graspkit::InstanceLabelMap map(40, 10, std::move(labels), {{1, 0.8}, {2, 0.8}});

  graspkit::CameraModel cam;
  cam.fx = 100.0;
  const auto result =
      graspkit::plan(map, GraspRectSpec{10, 6, 4}, GripperSpec{0.08, 0.002}, cam, 1.0);
  REQUIRE(result.best.has_value());

  // The instances see identical surroundings, so the per-angle qualities tie.
  for (int k = 0; k < 4; ++k) {
    REQUIRE(result.candidates[k].valid == result.candidates[4 + k].valid);
    REQUIRE(result.candidates[k].quality == result.candidates[4 + k].quality);
  }
  REQUIRE(result.best->instance == 1);
}

TEST_CASE("rejected candidates keep the sampled center and rectangle width") {
  const auto map = block_map(30, 10, 2, 27, 1, 8);  // 26x8 px object
  graspkit::CameraModel cam;
  cam.fx = 100.0;
  const GripperSpec grip{0.06, 0.003};  // opening 6 px: no side of the object fits
  const auto result = graspkit::plan(map, GraspRectSpec{12, 6, 6}, grip, cam, 1.0);
  REQUIRE_FALSE(result.best.has_value());
  REQUIRE(result.candidates.size() == 6);
  for (const auto& cand : result.candidates) {
    REQUIRE_FALSE(cand.valid);
    REQUIRE_FALSE(cand.world.has_value());
    REQUIRE(cand.width_px == 12.0);
    REQUIRE((cand.center == Vec2{14.5, 4.5}));
    REQUIRE(cand.quality == 0.0);
  }
}

TEST_CASE("plan agrees with the brute-force oracle over a randomized corpus") {
  graspkit::Rng rng(6021023);
  int valid_best = 0;
  for (int rep = 0; rep < 150; ++rep) {
    const auto map = oracle::random_label_map(rng);
    graspkit::CameraModel cam;
    cam.fx = rng.uniform(100.0, 800.0);
    cam.nominal_depth = rng.uniform(0.3, 2.0);
    const GripperSpec grip = oracle::random_gripper(rng, cam, cam.nominal_depth);
    const GraspRectSpec rect{static_cast<int>(rng.uniform_int(3, 10)),
                             static_cast<int>(rng.uniform_int(2, 8)),
                             static_cast<int>(rng.uniform_int(1, 6))};

    const auto got = graspkit::plan(map, rect, grip, cam);
    const auto want = oracle::brute_force_plan(map, rect, grip, cam);

    REQUIRE(got.candidates.size() == want.candidates.size());
    for (std::size_t i = 0; i < got.candidates.size(); ++i) {
      const auto& g = got.candidates[i];
      const auto& w = want.candidates[i];
      REQUIRE(g.instance == w.instance);
      REQUIRE(g.angle_index == w.angle_index);
      REQUIRE(g.angle == w.angle);
      REQUIRE(g.valid == w.valid);
      REQUIRE(w.n_tc + w.n_uo + w.n_cl == static_cast<std::int64_t>(rect.gw) * rect.gb);
      if (g.valid) {
        REQUIRE_THAT(g.quality, Catch::Matchers::WithinAbs(w.quality, 1e-12));
        REQUIRE_THAT(g.breakdown.oss, Catch::Matchers::WithinAbs(w.breakdown.oss, 1e-12));
        REQUIRE_THAT(g.breakdown.cts, Catch::Matchers::WithinAbs(w.breakdown.cts, 1e-12));
        REQUIRE_THAT(g.breakdown.ss, Catch::Matchers::WithinAbs(w.breakdown.ss, 1e-12));
        REQUIRE_THAT(g.center.u, Catch::Matchers::WithinAbs(w.center.u, 1e-9));
        REQUIRE_THAT(g.center.v, Catch::Matchers::WithinAbs(w.center.v, 1e-9));
        REQUIRE_THAT(g.width_px, Catch::Matchers::WithinAbs(w.width_px, 1e-9));
      }
    }

    REQUIRE(got.best.has_value() == want.best.has_value());
    if (got.best) {
      ++valid_best;
      REQUIRE(got.best->instance == want.best->instance);
      REQUIRE(got.best->angle_index == want.best->angle_index);
      REQUIRE(got.best->angle == want.best->angle);
      REQUIRE_THAT(got.best->quality, Catch::Matchers::WithinAbs(want.best->quality, 1e-9));
    }
  }
  REQUIRE(valid_best > 20);  // the corpus must actually exercise the planner
}

TEST_CASE("quality components stay in range and average exactly") {
  graspkit::Rng rng(77);
  for (int rep = 0; rep < 60; ++rep) {
    const auto map = oracle::random_label_map(rng);
    graspkit::CameraModel cam;
    cam.fx = rng.uniform(100.0, 800.0);
    const GripperSpec grip = oracle::random_gripper(rng, cam, cam.nominal_depth);
    const GraspRectSpec rect{static_cast<int>(rng.uniform_int(3, 10)),
                             static_cast<int>(rng.uniform_int(2, 8)), 4};
    for (const auto& cand : graspkit::plan(map, rect, grip, cam).candidates) {
      REQUIRE(cand.breakdown.oss >= 0.0);
      REQUIRE(cand.breakdown.oss <= 100.0);
      REQUIRE(cand.breakdown.cts >= 0.0);
      REQUIRE(cand.breakdown.cts <= 100.0);
      REQUIRE(cand.breakdown.ss >= 0.0);
      REQUIRE(cand.breakdown.ss <= 100.0);
      REQUIRE(cand.quality ==
              (cand.breakdown.oss + cand.breakdown.cts + cand.breakdown.ss) / 3.0);
      REQUIRE(cand.quality >= 0.0);
      REQUIRE(cand.quality <= 100.0);
    }
  }
}

TEST_CASE("loosening the gripper never invalidates a passing pose") {
  graspkit::Rng rng(505);
  for (int rep = 0; rep < 2000; ++rep) {
    graspkit::SectorWidths w;
    w.object_width = static_cast<int>(rng.uniform_int(0, 15));
    w.fsl_width = static_cast<int>(rng.uniform_int(0, 15));
    w.fsr_width = static_cast<int>(rng.uniform_int(0, 15));
    const double finger = rng.uniform(0.0, 12.0);
    const double opening = rng.uniform(0.0, 20.0);
    const double slack = rng.uniform(0.0, 5.0);
    if (graspkit::passes_filter(w, finger, opening)) {
      REQUIRE(graspkit::passes_filter(w, finger - slack, opening + slack));
    } else {
      REQUIRE_FALSE(graspkit::passes_filter(w, finger + slack, opening - slack));
    }
  }
}

TEST_CASE("raising a confidence shifts only that instance's quality") {
  std::vector<std::uint16_t> labels(40 * 10, 0);
  for (int y = 3; y <= 6; ++y)
    for (int x = 5; x <= 8; ++x) labels[static_cast<std::size_t>(y) * 40 + x] = 1;
  for (int y = 3; y <= 6; ++y)
    for (int x = 25; x <= 28; ++x) labels[static_cast<std::size_t>(y) * 40 + x] = 2;
  graspkit::CameraModel cam;
  cam.fx = 100.0;
  const GraspRectSpec rect{10, 6, 4};
  const GripperSpec grip{0.08, 0.002};

  const graspkit::InstanceLabelMap lo(40, 10, std::vector<std::uint16_t>(labels),
                                      {{1, 0.8}, {2, 0.5}});
  const graspkit::InstanceLabelMap hi(40, 10, std::move(labels), {{1, 0.8}, {2, 0.9}});
  const auto before = graspkit::plan(lo, rect, grip, cam, 1.0);
  const auto after = graspkit::plan(hi, rect, grip, cam, 1.0);

  for (std::size_t i = 0; i < before.candidates.size(); ++i) {
    const auto& b = before.candidates[i];
    const auto& a = after.candidates[i];
    REQUIRE(a.valid == b.valid);
    if (!a.valid) continue;
    if (a.instance == 2)
      REQUIRE_THAT(a.quality - b.quality,
                   Catch::Matchers::WithinAbs(100.0 * (0.9 - 0.5) / 3.0, 1e-12));
    else
      REQUIRE(a.quality == b.quality);
  }
  REQUIRE(before.best->instance == 1);
  REQUIRE(after.best->instance == 2);
}

TEST_CASE("planning is equivariant under a quarter turn of the scene") {
  graspkit::Rng rng(314159);
  const GraspRectSpec base{8, 4, 0};  // angle count set per rep
  int checked = 0;
  for (int rep = 0; rep < 60; ++rep) {
    oracle::MapShapeOpts opts;
    opts.min_w = opts.min_h = 6;
    opts.odd_areas = true;  // keeps centroids off half-integer coordinates
    opts.min_instances = 1;
    const auto map = oracle::random_label_map(rng, opts);
    const auto rotated = oracle::rot_quarter_map(map);

    GraspRectSpec rect = base;
    rect.angle_count = rep % 2 == 0 ? 2 : 4;
    graspkit::CameraModel cam;
    cam.fx = rng.uniform(100.0, 800.0);
    cam.nominal_depth = rng.uniform(0.3, 2.0);
    const GripperSpec grip = oracle::random_gripper(rng, cam, cam.nominal_depth);

    const auto orig = graspkit::plan(map, rect, grip, cam);
    const auto rot = graspkit::plan(rotated, rect, grip, cam);
    REQUIRE(orig.candidates.size() == rot.candidates.size());

    const int d = rect.angle_count;
    for (std::size_t base_idx = 0; base_idx < orig.candidates.size();
         base_idx += static_cast<std::size_t>(d))
      for (int k = 0; k < d / 2; ++k) {
        const auto& o = orig.candidates[base_idx + static_cast<std::size_t>(k)];
        const auto& r = rot.candidates[base_idx + static_cast<std::size_t>(k + d / 2)];
        REQUIRE(o.instance == r.instance);
        REQUIRE(o.valid == r.valid);
        if (!o.valid) continue;
        ++checked;
        REQUIRE_THAT(r.quality, Catch::Matchers::WithinAbs(o.quality, 1e-12));
        REQUIRE_THAT(r.width_px, Catch::Matchers::WithinAbs(o.width_px, 1e-9));
        const Vec2 expect = oracle::rot_quarter_point(o.center, map.height());
        REQUIRE_THAT(r.center.u, Catch::Matchers::WithinAbs(expect.u, 1e-9));
        REQUIRE_THAT(r.center.v, Catch::Matchers::WithinAbs(expect.v, 1e-9));
      }
  }
  REQUIRE(checked > 20);
}

TEST_CASE("planning twice produces bitwise identical results") {
  graspkit::Rng rng(17);
  const auto map = oracle::random_label_map(rng);
  graspkit::CameraModel cam;
  cam.fx = 321.0;
  const GraspRectSpec rect{7, 4, 5};
  const GripperSpec grip = oracle::random_gripper(rng, cam, cam.nominal_depth);

  const auto a = graspkit::plan(map, rect, grip, cam);
  const auto b = graspkit::plan(map, rect, grip, cam);
  REQUIRE(a.best.has_value() == b.best.has_value());
  REQUIRE(a.candidates.size() == b.candidates.size());
  for (std::size_t i = 0; i < a.candidates.size(); ++i) {
    REQUIRE(a.candidates[i].center == b.candidates[i].center);
    REQUIRE(a.candidates[i].angle == b.candidates[i].angle);
    REQUIRE(a.candidates[i].width_px == b.candidates[i].width_px);
    REQUIRE(a.candidates[i].quality == b.candidates[i].quality);
    REQUIRE(a.candidates[i].valid == b.candidates[i].valid);
  }
}

TEST_CASE("the best pose is the first valid quality maximum") {
  graspkit::Rng rng(9090);
  for (int rep = 0; rep < 80; ++rep) {
    const auto map = oracle::random_label_map(rng);
    graspkit::CameraModel cam;
    cam.fx = rng.uniform(100.0, 800.0);
    const GripperSpec grip = oracle::random_gripper(rng, cam, cam.nominal_depth);
    const auto result = graspkit::plan(map, GraspRectSpec{6, 4, 4}, grip, cam);

    const graspkit::GraspPose* expect = nullptr;
    for (const auto& cand : result.candidates)
      if (cand.valid && (!expect || cand.quality > expect->quality)) expect = &cand;

    REQUIRE(result.best.has_value() == (expect != nullptr));
    if (expect) {
      REQUIRE(result.best->valid);
      REQUIRE(result.best->instance == expect->instance);
      REQUIRE(result.best->angle_index == expect->angle_index);
      REQUIRE(result.best->quality == expect->quality);
    }
  }
}

TEST_CASE("planner config documents round-trip and validate") {
  graspkit::PlannerConfig cfg;
  cfg.rect = GraspRectSpec{48, 16, 8};
  cfg.gripper = GripperSpec{0.09, 0.011};
  const auto doc = nlohmann::json::parse(graspkit::planner_config_to_json(cfg).dump());
  const auto back = graspkit::planner_config_from_json(doc);
  REQUIRE(back.rect.gw == 48);
  REQUIRE(back.rect.gb == 16);
  REQUIRE(back.rect.angle_count == 8);
  REQUIRE(back.gripper.max_opening == 0.09);
  REQUIRE(back.gripper.finger_width == 0.011);

  REQUIRE(graspkit::planner_config_from_json(nlohmann::json::object()).rect.gw == 96);

  REQUIRE_THROWS_AS(graspkit::planner_config_from_json({{"D", 0}}), std::invalid_argument);
  REQUIRE_THROWS_AS(graspkit::planner_config_from_json({{"gw_px", "wide"}}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(
      graspkit::planner_config_from_json({{"max_opening_m", 0.01}, {"finger_width_m", 0.02}}),
      std::invalid_argument);
}

TEST_CASE("pose documents round-trip with and without a world block") {
  const auto map = block_map(30, 16, 13, 16, 6, 9);
  graspkit::CameraModel cam;
  cam.fx = 100.0;
  const auto result =
      graspkit::plan(map, GraspRectSpec{12, 6, 4}, GripperSpec{0.06, 0.003}, cam, 1.0);
  REQUIRE(result.best.has_value());

  const auto doc =
      nlohmann::json::parse(graspkit::pose_to_json(*result.best, GraspRectSpec{12, 6, 4}).dump());
  const auto back = graspkit::pose_from_json(doc);
  REQUIRE(back.valid);
  REQUIRE(back.center == result.best->center);
  REQUIRE(back.angle == result.best->angle);
  REQUIRE(back.width_px == result.best->width_px);
  REQUIRE(back.quality == result.best->quality);
  REQUIRE(back.instance == result.best->instance);
  REQUIRE(back.world.has_value());
  REQUIRE((back.world->position - result.best->world->position).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.world->yaw == result.best->world->yaw);
  REQUIRE(back.world->width_m == result.best->world->width_m);

  const auto rect = graspkit::rect_from_pose_json(doc);
  REQUIRE(rect.gw == 12);
  REQUIRE(rect.gb == 6);

  graspkit::GraspPose none;  // invalid pose, no world block
  const auto doc2 = nlohmann::json::parse(graspkit::pose_to_json(none, GraspRectSpec{}).dump());
  const auto back2 = graspkit::pose_from_json(doc2);
  REQUIRE_FALSE(back2.valid);
  REQUIRE_FALSE(back2.world.has_value());
  REQUIRE_FALSE(doc2.contains("width_m"));

  REQUIRE_THROWS_AS(graspkit::pose_from_json(nlohmann::json{{"valid", true}}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(graspkit::rect_from_pose_json(nlohmann::json::object()),
                    std::invalid_argument);
}

TEST_CASE("parameter structs validate their domains") {
  REQUIRE_THROWS_AS((GraspRectSpec{0, 4, 4}.validate()), std::invalid_argument);
  REQUIRE_THROWS_AS((GraspRectSpec{4, 4, 0}.validate()), std::invalid_argument);
  REQUIRE_THROWS_AS((GripperSpec{0.0, 0.0}.validate()), std::invalid_argument);
  REQUIRE_THROWS_AS((GripperSpec{0.01, 0.02}.validate()), std::invalid_argument);
  REQUIRE_NOTHROW(GraspRectSpec{}.validate());
  REQUIRE_NOTHROW(GripperSpec{}.validate());

  const auto map = block_map(8, 8, 2, 5, 2, 5);
  REQUIRE_THROWS_AS(graspkit::plan(map, GraspRectSpec{}, GripperSpec{}, {}, -1.0),
                    std::invalid_argument);
}
