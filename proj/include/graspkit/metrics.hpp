#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graspkit/label_map.hpp"

namespace graspkit {

/// Class-agnostic evaluation protocol parameters: IoU thresholds and the
/// per-image detection budget.
struct EvalConfig {
  std::vector<double> iou_thresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                        0.75, 0.80, 0.85, 0.90, 0.95};
  int max_detections = 100;

  void validate() const {
    if (iou_thresholds.empty()) throw std::invalid_argument("EvalConfig: no IoU thresholds");
    double prev = 0.0;
    for (double t : iou_thresholds) {
      if (!(t > 0.0 && t <= 1.0))
        throw std::invalid_argument("EvalConfig: thresholds must lie in (0,1]");
      if (!(t > prev))
        throw std::invalid_argument("EvalConfig: thresholds must be strictly increasing");
      prev = t;
    }
    if (max_detections < 1) throw std::invalid_argument("EvalConfig: max_detections must be >= 1");
  }
};

struct ThresholdResult {
  double iou = 0.0;
  double ap = 0.0;
  double recall = 0.0;
};

struct EvalReport {
  double ap = 0.0;  // mean of per-threshold ap
  double ar = 0.0;  // mean of per-threshold recall
  std::vector<ThresholdResult> per_threshold;
};

/// Binary pixel mask. Bytes are 0/1 flags, row-major.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;
  std::int64_t area = 0;
};

inline BinaryMask instance_mask(const InstanceLabelMap& map, std::uint16_t id) {
  BinaryMask m;
  m.width = map.width();
  m.height = map.height();
  m.bits.resize(map.labels().size());
  for (std::size_t i = 0; i < m.bits.size(); ++i) {
    m.bits[i] = map.labels()[i] == id;
    m.area += m.bits[i];
  }
  return m;
}

/// Intersection over union of two same-sized masks; at least one must be
/// nonempty.
inline double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("mask_iou: dimension mismatch");
  if (a.area == 0 && b.area == 0)
    throw std::invalid_argument("mask_iou: both masks empty");
  std::int64_t inter = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) inter += (a.bits[i] & b.bits[i]);
  const std::int64_t uni = a.area + b.area - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

namespace detail {

// One detection pooled across all images, with its per-threshold match flags.
struct PooledDetection {
  double score = 0.0;
  int image = 0;
  std::uint16_t id = 0;
  std::vector<std::uint8_t> matched;  // per threshold
};

inline const std::vector<double>& recall_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g(101);
    for (int i = 0; i <= 100; ++i) g[i] = i / 100.0;
    return g;
  }();
  return grid;
}

}  // namespace detail

/// COCO-style evaluation specialised to a single category: per image,
/// detections in descending score order (top max_detections) greedily match
/// the unmatched ground truth of highest IoU at or above each threshold;
/// detections are then pooled over all images by descending score, per-
/// threshold precision is interpolated at 101 recall points, and recall is
/// the matched ground-truth fraction. The report averages over thresholds.
inline EvalReport evaluate(const std::vector<InstanceLabelMap>& predictions,
                           const std::vector<GroundTruthScene>& ground_truth,
                           const EvalConfig& cfg = {}) {
  cfg.validate();
  if (predictions.size() != ground_truth.size())
    throw std::invalid_argument("evaluate: prediction/ground-truth image counts differ");

  const std::size_t T = cfg.iou_thresholds.size();
  std::int64_t total_gt = 0;
  std::vector<std::int64_t> matched_gt(T, 0);
  std::vector<detail::PooledDetection> pool;

  for (std::size_t img = 0; img < predictions.size(); ++img) {
    const InstanceLabelMap& pred = predictions[img];
    const GroundTruthScene& gt = ground_truth[img];
    total_gt += static_cast<std::int64_t>(gt.instances().size());

    // Detections ordered by descending score, ties by ascending id.
    std::vector<std::pair<double, std::uint16_t>> dets;
    for (const auto& [id, score] : pred.scores()) dets.emplace_back(score, id);
    std::sort(dets.begin(), dets.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    if (dets.size() > static_cast<std::size_t>(cfg.max_detections))
      dets.resize(static_cast<std::size_t>(cfg.max_detections));

    std::vector<BinaryMask> det_masks;
    det_masks.reserve(dets.size());
    for (const auto& [score, id] : dets) det_masks.push_back(instance_mask(pred, id));
    std::vector<BinaryMask> gt_masks;
    gt_masks.reserve(gt.instances().size());
    for (const auto& inst : gt.instances()) gt_masks.push_back(instance_mask(gt.map(), inst.id));

    std::vector<std::vector<double>> iou(det_masks.size(),
                                         std::vector<double>(gt_masks.size(), 0.0));
    for (std::size_t d = 0; d < det_masks.size(); ++d)
      for (std::size_t g = 0; g < gt_masks.size(); ++g)
        iou[d][g] = mask_iou(det_masks[d], gt_masks[g]);

    std::vector<detail::PooledDetection> img_dets(dets.size());
    for (std::size_t d = 0; d < dets.size(); ++d) {
      img_dets[d].score = dets[d].first;
      img_dets[d].image = static_cast<int>(img);
      img_dets[d].id = dets[d].second;
      img_dets[d].matched.assign(T, 0);
    }

    for (std::size_t t = 0; t < T; ++t) {
      const double thr = cfg.iou_thresholds[t];
      std::vector<std::uint8_t> gt_taken(gt_masks.size(), 0);
      for (std::size_t d = 0; d < dets.size(); ++d) {
        double best = 0.0;
        std::ptrdiff_t pick = -1;
        for (std::size_t g = 0; g < gt_masks.size(); ++g) {
          if (gt_taken[g]) continue;
          if (iou[d][g] < thr) continue;
          if (pick < 0 || iou[d][g] > best) {  // equal IoU keeps the first gt
            best = iou[d][g];
            pick = static_cast<std::ptrdiff_t>(g);
          }
        }
        if (pick >= 0) {
          gt_taken[static_cast<std::size_t>(pick)] = 1;
          img_dets[d].matched[t] = 1;
          ++matched_gt[t];
        }
      }
    }
    pool.insert(pool.end(), img_dets.begin(), img_dets.end());
  }

  // Global score ordering; ties resolved by image then id for determinism.
  std::sort(pool.begin(), pool.end(),
            [](const detail::PooledDetection& a, const detail::PooledDetection& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.image != b.image) return a.image < b.image;
              return a.id < b.id;
            });

  EvalReport report;
  report.per_threshold.resize(T);
  const std::vector<double>& rec_grid = detail::recall_grid();

  for (std::size_t t = 0; t < T; ++t) {
    ThresholdResult& res = report.per_threshold[t];
    res.iou = cfg.iou_thresholds[t];
    if (total_gt == 0) continue;

    std::vector<double> recall_curve(pool.size()), precision_curve(pool.size());
    std::int64_t tp = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      tp += pool[i].matched[t];
      recall_curve[i] = static_cast<double>(tp) / static_cast<double>(total_gt);
      precision_curve[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    }
    // Monotone precision envelope from the right.
    for (std::size_t i = pool.size(); i-- > 1;)
      if (precision_curve[i] > precision_curve[i - 1]) precision_curve[i - 1] = precision_curve[i];

    double ap_sum = 0.0;
    for (double r : rec_grid) {
      const auto it = std::lower_bound(recall_curve.begin(), recall_curve.end(), r);
      if (it != recall_curve.end())
        ap_sum += precision_curve[static_cast<std::size_t>(it - recall_curve.begin())];
    }
    res.ap = ap_sum / static_cast<double>(rec_grid.size());
    res.recall = static_cast<double>(matched_gt[t]) / static_cast<double>(total_gt);
  }

  double ap_sum = 0.0, ar_sum = 0.0;
  for (const ThresholdResult& res : report.per_threshold) {
    ap_sum += res.ap;
    ar_sum += res.recall;
  }
  report.ap = ap_sum / static_cast<double>(T);
  report.ar = ar_sum / static_cast<double>(T);
  return report;
}

// {"AP":..., "AR":..., "per_threshold":[{"iou":..., "ap":..., "recall":...}]}
inline nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json per = nlohmann::json::array();
  for (const ThresholdResult& r : report.per_threshold)
    per.push_back({{"iou", r.iou}, {"ap", r.ap}, {"recall", r.recall}});
  return nlohmann::json{{"AP", report.ap}, {"AR", report.ar}, {"per_threshold", per}};
}

inline EvalConfig eval_config_from_json(const nlohmann::json& doc) {
  EvalConfig cfg;
  try {
    if (doc.contains("iou_thresholds"))
      cfg.iou_thresholds = doc.at("iou_thresholds").get<std::vector<double>>();
    if (doc.contains("max_detections")) cfg.max_detections = doc.at("max_detections").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("eval config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

inline EvalConfig load_eval_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": invalid JSON: " + e.what());
  }
  try {
    return eval_config_from_json(doc);
  } catch (const std::invalid_argument& e) {
    throw io_error(path + ": " + e.what());
  }
}

}  // namespace graspkit
