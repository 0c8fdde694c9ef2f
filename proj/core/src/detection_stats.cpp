#include "apsim/detection_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "apsim/parallel.hpp"
#include "apsim/student_t.hpp"

namespace apsim {

double iou(const BBox& a, const BBox& b) {
  if (!a.valid() || !b.valid()) throw DomainError("IoU of a degenerate box");
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

int MatchResult::total_tp() const {
  int n = 0;
  for (const auto& [c, counts] : per_class) n += counts.tp;
  return n;
}

int MatchResult::total_fp() const {
  int n = 0;
  for (const auto& [c, counts] : per_class) n += counts.fp;
  return n;
}

MatchResult match_detections(std::span<const Detection> detections,
                             std::span<const GroundTruth> ground_truths, double iou_threshold,
                             double confidence_threshold) {
  MatchResult result;
  result.labels.assign(detections.size(), MatchLabel::kIgnored);
  result.matched_gt.assign(detections.size(), -1);
  for (const auto& gt : ground_truths) ++result.per_class[gt.class_id].ground_truths;

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (detections[i].confidence > confidence_threshold) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].confidence > detections[b].confidence;
  });

  std::vector<bool> taken(ground_truths.size(), false);
  for (std::size_t di : order) {
    const Detection& det = detections[di];
    int best = -1;
    double best_iou = iou_threshold;
    for (std::size_t gi = 0; gi < ground_truths.size(); ++gi) {
      const GroundTruth& gt = ground_truths[gi];
      if (taken[gi] || gt.class_id != det.class_id || gt.image_id != det.image_id) continue;
      const double v = iou(det.bbox, gt.bbox);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(gi);
      }
    }
    ClassCounts& counts = result.per_class[det.class_id];
    if (best >= 0) {
      taken[best] = true;
      ++counts.tp;
      result.labels[di] = MatchLabel::kTruePositive;
      result.matched_gt[di] = best;
    } else {
      ++counts.fp;
      result.labels[di] = MatchLabel::kFalsePositive;
    }
  }
  return result;
}

double map_eq5(const MatchResult& match, const std::set<int>& class_set) {
  if (class_set.empty()) throw DomainError("mAP over an empty class set");
  double sum = 0.0;
  int scored = 0;
  for (int c : class_set) {
    auto it = match.per_class.find(c);
    if (it == match.per_class.end()) continue;
    const ClassCounts& k = it->second;
    if (k.tp + k.fp > 0) {
      sum += static_cast<double>(k.tp) / (k.tp + k.fp);
      ++scored;
    } else if (k.ground_truths > 0) {
      ++scored;
    }
  }
  if (scored == 0) throw DomainError("no class in the set has detections or ground truths");
  return sum / scored;
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

double map_iou_sweep(std::span<const Detection> detections,
                     std::span<const GroundTruth> ground_truths, const std::set<int>& class_set,
                     double confidence_threshold) {
  const auto thresholds = coco_iou_thresholds();
  double sum = 0.0;
  for (double thr : thresholds) {
    sum += map_eq5(match_detections(detections, ground_truths, thr, confidence_threshold),
                   class_set);
  }
  return sum / static_cast<double>(thresholds.size());
}

namespace {

std::vector<double> normalized_weights(std::span<const FoldMetric> folds) {
  double total = 0.0;
  for (const auto& f : folds) {
    if (!(f.weight_count >= 0.0)) throw DomainError("fold weight must be non-negative");
    total += f.weight_count;
  }
  if (!(total > 0.0)) throw DomainError("fold weights sum to zero");
  std::vector<double> w;
  w.reserve(folds.size());
  for (const auto& f : folds) w.push_back(f.weight_count / total);
  return w;
}

}  // namespace

double weighted_mean(std::span<const FoldMetric> folds) {
  const auto w = normalized_weights(folds);
  double mean = 0.0;
  for (std::size_t k = 0; k < folds.size(); ++k) mean += w[k] * folds[k].map_value;
  return mean;
}

double weighted_std(std::span<const FoldMetric> folds) {
  const std::size_t k_count = folds.size();
  if (k_count < 2) throw DomainError("weighted STD needs at least 2 folds");
  const auto w = normalized_weights(folds);
  const double mean = weighted_mean(folds);
  double num = 0.0;
  double wsum = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    const double d = folds[k].map_value - mean;
    num += w[k] * d * d;
    wsum += w[k];
  }
  const double K = static_cast<double>(k_count);
  return std::sqrt(num / ((K - 1.0) / K * wsum));
}

namespace {

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // n - 1 denominator
  double n = 0.0;
};

SampleMoments moments(std::span<const double> xs) {
  SampleMoments m;
  m.n = static_cast<double>(xs.size());
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / m.n;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.variance = ss / (m.n - 1.0);
  return m;
}

}  // namespace

WelchStatistic welch_t(std::span<const double> sample1, std::span<const double> sample2) {
  if (sample1.size() < 2 || sample2.size() < 2) {
    throw DegenerateVarianceError("Welch test needs at least 2 values per sample");
  }
  const SampleMoments a = moments(sample1);
  const SampleMoments b = moments(sample2);
  const double va = a.variance / a.n;
  const double vb = b.variance / b.n;
  const double se2 = va + vb;
  if (!(se2 > 0.0)) throw DegenerateVarianceError("both samples have zero variance");
  WelchStatistic s;
  s.t = (a.mean - b.mean) / std::sqrt(se2);
  s.nu = se2 * se2 / (va * va / (a.n - 1.0) + vb * vb / (b.n - 1.0));
  return s;
}

double welch_p_value(double t, double nu) {
  if (!(nu > 0.0)) throw DomainError("degrees of freedom must be positive");
  return std::min(1.0, 2.0 * student_t_sf(std::abs(t), nu));
}

WelchResult welch_test(std::span<const double> sample1, std::span<const double> sample2,
                       double alpha) {
  const WelchStatistic s = welch_t(sample1, sample2);
  WelchResult r;
  r.t = s.t;
  r.nu = s.nu;
  r.p_two_tailed = welch_p_value(s.t, s.nu);
  r.alpha = alpha;
  r.reject = r.p_two_tailed < alpha;
  return r;
}

std::vector<PairwiseResult> pairwise_tests(const std::map<std::string, std::vector<double>>& groups,
                                           double alpha) {
  if (groups.size() < 2) throw DomainError("pairwise tests need at least 2 groups");
  std::vector<std::pair<const std::string*, const std::vector<double>*>> items;
  for (const auto& [label, values] : groups) items.emplace_back(&label, &values);

  std::vector<PairwiseResult> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      out.push_back({*items[i].first, *items[j].first, std::nullopt, {}});
    }
  }
  parallel_for(out.size(), 1, [&](std::size_t idx) {
    PairwiseResult& pr = out[idx];
    try {
      pr.result = welch_test(groups.at(pr.label1), groups.at(pr.label2), alpha);
    } catch (const Error& e) {
      pr.error = e.kind() + ": " + e.what();
    }
  });
  return out;
}

}  // namespace apsim
