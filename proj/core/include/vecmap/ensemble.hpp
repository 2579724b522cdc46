#pragma once

#include <map>
#include <vector>

#include "vecmap/geom.hpp"

namespace vecmap {

/// Merge settings: proposals closer than cd_threshold (chamfer, meters) to
/// anything already accepted are duplicates; accepted proposals carry their
/// score decayed once by score_decay.
struct EnsembleConfig {
  double cd_threshold = 1.0;   // T, meters, > 0
  double score_decay = 0.9;    // sigma, in (0, 1]
  int chamfer_samples = 10;
  int max_history = 3;         // frames of history used per merge
  std::map<Category, double> per_category_threshold;

  double threshold_for(Category c) const;
  void validate() const;
};

/// Accepted proposals in acceptance order with their decayed scores.
struct MergeResult {
  std::vector<MapElement> added;
  std::vector<double> added_scores;
};

/// Chamfer-deduplicating merge. Proposals are taken in descending score
/// order (ties by input order); each is discarded when its chamfer distance
/// to any element of the growing base set falls below the threshold, and
/// otherwise joins the base and the output with score * score_decay.
MergeResult ensemble_merge(const std::vector<MapElement>& base,
                           const std::vector<MapElement>& proposals,
                           const EnsembleConfig& cfg);

/// Per category: first model's elements form the base, the remaining
/// models' elements are the proposals. Frames must share a frame_id.
MapFrame multi_model_ensemble(const std::vector<MapFrame>& model_frames,
                              const EnsembleConfig& cfg);

/// History elements (most recent first, at most max_history frames) are
/// re-expressed in the current ego frame, clipped to the window, and merged
/// into the current frame's predictions per category.
MapFrame multi_frame_ensemble(const MapFrame& current,
                              const std::vector<MapFrame>& history,
                              const EnsembleConfig& cfg,
                              const PerceptionWindow& window);

}  // namespace vecmap
