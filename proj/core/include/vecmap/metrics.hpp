#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "vecmap/geom.hpp"

namespace vecmap {

/// Evaluation settings. Thresholds must be strictly positive and strictly
/// increasing.
struct EvalConfig {
  std::vector<double> thresholds{0.5, 1.0, 1.5};
  int chamfer_samples = 100;

  void validate() const;
};

/// One prediction's matching outcome; MatchResult lists predictions in the
/// descending-score order they were processed in.
struct MatchedPrediction {
  double score = 0.0;
  bool is_tp = false;
  std::optional<std::size_t> matched_gt;
  double chamfer = 0.0;  // distance to the matched (or nearest unmatched) GT
};

struct MatchResult {
  std::vector<MatchedPrediction> predictions;
};

/// Greedy matching: predictions in descending score order (ties by input
/// order) each claim the unmatched GT with the smallest chamfer distance
/// when that distance is < tau; otherwise they are false positives.
MatchResult match_instances(const std::vector<MapElement>& preds,
                            const std::vector<MapElement>& gts, double tau,
                            int samples);

/// Area under the monotone precision envelope of the PR sweep.
/// n_gt == 0 scores 1 with no predictions and 0 otherwise.
double average_precision(const MatchResult& match, std::size_t n_gt);

struct CategoryEval {
  std::map<double, double> ap_per_threshold;
  double ap_mean = 0.0;
  std::size_t n_predictions = 0;
  std::size_t n_ground_truth = 0;
};

struct EvalReport {
  std::map<Category, CategoryEval> per_category;
  double mean_ap = 0.0;  // mean over the three categories
  std::vector<double> thresholds;
  int chamfer_samples = 100;
};

/// Pooled evaluation: matching runs per frame (frames aligned by frame_id),
/// the PR curve per (category, threshold) is accumulated over the whole
/// sequence. The report is independent of `threads`.
EvalReport evaluate(const std::vector<MapFrame>& preds,
                    const std::vector<MapFrame>& gts, const EvalConfig& cfg,
                    int threads = 1);

}  // namespace vecmap
