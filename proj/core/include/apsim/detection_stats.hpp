#pragma once

// Detection scoring (precision-style mAP over an IoU sweep), K-fold weighted
// aggregation and Welch two-sample significance tests.

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "apsim/error.hpp"

namespace apsim {

struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }
};

struct Detection {
  long long image_id = 0;
  int class_id = 0;
  BBox bbox;
  double confidence = 0.0;
};

struct GroundTruth {
  long long image_id = 0;
  int class_id = 0;
  BBox bbox;
};

double iou(const BBox& a, const BBox& b);

enum class MatchLabel { kIgnored, kTruePositive, kFalsePositive };

struct ClassCounts {
  int tp = 0;
  int fp = 0;
  int ground_truths = 0;
};

struct MatchResult {
  std::map<int, ClassCounts> per_class;
  // Parallel to the detections passed in.
  std::vector<MatchLabel> labels;
  // Index of the matched ground truth for true positives, -1 otherwise.
  std::vector<int> matched_gt;

  int total_tp() const;
  int total_fp() const;
};

// Detections with confidence <= confidence_threshold are ignored. The rest are
// visited by descending confidence; each claims the unmatched same-class,
// same-image ground truth of highest IoU, provided that IoU > iou_threshold.
MatchResult match_detections(std::span<const Detection> detections,
                             std::span<const GroundTruth> ground_truths, double iou_threshold,
                             double confidence_threshold);

// Mean over classes of TP / (TP + FP). A class without TP and FP scores 0 if it
// has ground truths and is left out otherwise. Throws DomainError when the
// class set is empty or no class is scorable.
double map_eq5(const MatchResult& match, const std::set<int>& class_set);

// IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

double map_iou_sweep(std::span<const Detection> detections,
                     std::span<const GroundTruth> ground_truths, const std::set<int>& class_set,
                     double confidence_threshold);

struct FoldMetric {
  int fold_index = 0;
  double map_value = 0.0;
  double weight_count = 0.0;
};

// Sum of w_k * mu_k with w_k = count_k / sum(counts).
double weighted_mean(std::span<const FoldMetric> folds);
// sqrt(sum w_k (mu_k - mean)^2 / ((K - 1) / K * sum w_k)) with normalized w_k.
double weighted_std(std::span<const FoldMetric> folds);

struct WelchStatistic {
  double t = 0.0;
  double nu = 0.0;
};

class DegenerateVarianceError : public Error {
 public:
  explicit DegenerateVarianceError(const std::string& what) : Error("degenerate_variance", what) {}
};

WelchStatistic welch_t(std::span<const double> sample1, std::span<const double> sample2);
// 2 * (1 - F_t(|t|, nu)).
double welch_p_value(double t, double nu);

struct WelchResult {
  double t = 0.0;
  double nu = 0.0;
  double p_two_tailed = 1.0;
  bool reject = false;
  double alpha = 0.05;
};

WelchResult welch_test(std::span<const double> sample1, std::span<const double> sample2,
                       double alpha = 0.05);

struct PairwiseResult {
  std::string label1;
  std::string label2;
  std::optional<WelchResult> result;
  // Set when the pair could not be tested (e.g. zero variance).
  std::string error;
};

// One entry per unordered pair of groups, ordered lexicographically by label.
std::vector<PairwiseResult> pairwise_tests(const std::map<std::string, std::vector<double>>& groups,
                                           double alpha = 0.05);

}  // namespace apsim
