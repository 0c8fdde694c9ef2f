#include "apsim/evaluation.hpp"

#include <set>

namespace apsim {

SliceInput select_slice(std::span<const Detection> detections,
                        std::span<const GroundTruth> ground_truths, const ClassCatalog& catalog,
                        const EvaluationSlice& slice, const SizeClassification& rules) {
  auto in_group = [&](int class_id) {
    return !slice.group || (catalog.contains(class_id) && catalog.group_of(class_id) == *slice.group);
  };
  SliceInput out;
  for (const auto& gt : ground_truths) {
    if (!in_group(gt.class_id)) continue;
    if (slice.size && classify_bbox(gt.bbox, rules) != *slice.size) continue;
    out.ground_truths.push_back(gt);
  }
  for (const auto& det : detections) {
    if (!in_group(det.class_id)) continue;
    if (slice.size) {
      const BBox* nearest = nullptr;
      double best = 0.0;
      for (const auto& gt : ground_truths) {
        if (gt.image_id != det.image_id) continue;
        const double v = iou(det.bbox, gt.bbox);
        if (v > best) {
          best = v;
          nearest = &gt.bbox;
        }
      }
      if (classify_bbox(nearest ? *nearest : det.bbox, rules) != *slice.size) continue;
    }
    out.detections.push_back(det);
  }
  return out;
}

SliceScore score_slice(std::span<const Detection> detections,
                       std::span<const GroundTruth> ground_truths, const ClassCatalog& catalog,
                       const EvaluationSlice& slice, double confidence_threshold,
                       const SizeClassification& rules) {
  const SliceInput in = select_slice(detections, ground_truths, catalog, slice, rules);
  std::set<int> classes;
  if (slice.group) {
    for (int c : catalog.classes_in(*slice.group)) classes.insert(c);
  } else {
    for (const auto& e : catalog.entries()) classes.insert(e.class_id);
  }
  SliceScore score;
  score.ground_truths = static_cast<int>(in.ground_truths.size());
  if (classes.empty()) return score;
  try {
    score.map_value = map_iou_sweep(in.detections, in.ground_truths, classes, confidence_threshold);
  } catch (const DomainError&) {
    // Nothing scorable in this slice.
  }
  return score;
}

}  // namespace apsim
