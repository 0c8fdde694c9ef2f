#pragma once

// Per class-group and per bbox-size evaluation of one detector run.

#include <optional>
#include <span>
#include <vector>

#include "apsim/dataset_io.hpp"
#include "apsim/detection_stats.hpp"

namespace apsim {

struct EvaluationSlice {
  std::optional<ClassGroup> group;  // nullopt: all classes
  std::optional<SizeClass> size;    // nullopt: all sizes
};

struct SliceInput {
  std::vector<Detection> detections;
  std::vector<GroundTruth> ground_truths;
};

// Keeps ground truths of the slice's size class, and detections whose
// highest-IoU ground truth in the same image (any class) has that size class.
// Detections overlapping no ground truth are classified by their own box.
// Group filtering uses the class id of each box.
SliceInput select_slice(std::span<const Detection> detections,
                        std::span<const GroundTruth> ground_truths, const ClassCatalog& catalog,
                        const EvaluationSlice& slice, const SizeClassification& rules = {});

struct SliceScore {
  std::optional<double> map_value;  // nullopt when no class of the slice is scorable
  int ground_truths = 0;            // fold weight
};

// IoU-sweep mAP over the slice's classes.
SliceScore score_slice(std::span<const Detection> detections,
                       std::span<const GroundTruth> ground_truths, const ClassCatalog& catalog,
                       const EvaluationSlice& slice, double confidence_threshold,
                       const SizeClassification& rules = {});

}  // namespace apsim
