#include "vecmap/ensemble.hpp"

#include <algorithm>
#include <numeric>

namespace vecmap {

double EnsembleConfig::threshold_for(Category c) const {
  if (auto it = per_category_threshold.find(c);
      it != per_category_threshold.end()) {
    return it->second;
  }
  return cd_threshold;
}

void EnsembleConfig::validate() const {
  if (!(cd_threshold > 0.0)) {
    throw std::invalid_argument("EnsembleConfig: cd_threshold must be > 0");
  }
  if (!(score_decay > 0.0) || score_decay > 1.0) {
    throw std::invalid_argument("EnsembleConfig: score_decay must be in (0, 1]");
  }
  if (chamfer_samples < 2) {
    throw std::invalid_argument("EnsembleConfig: chamfer_samples must be >= 2");
  }
  if (max_history < 0) {
    throw std::invalid_argument("EnsembleConfig: max_history must be >= 0");
  }
  for (const auto& [cat, t] : per_category_threshold) {
    if (!(t > 0.0)) {
      throw std::invalid_argument("EnsembleConfig: thresholds must be > 0");
    }
  }
}

MergeResult ensemble_merge(const std::vector<MapElement>& base,
                           const std::vector<MapElement>& proposals,
                           const EnsembleConfig& cfg) {
  cfg.validate();
  MergeResult result;
  if (proposals.empty()) return result;

  const Category cat =
      base.empty() ? proposals.front().category : base.front().category;
  for (const MapElement& e : base) {
    if (e.category != cat) {
      throw std::invalid_argument("ensemble_merge: mixed categories in base");
    }
  }
  for (const MapElement& e : proposals) {
    if (e.category != cat) {
      throw std::invalid_argument(
          "ensemble_merge: mixed categories in proposals");
    }
    if (!e.score) {
      throw std::invalid_argument("ensemble_merge: unscored proposal");
    }
  }
  const double threshold = cfg.threshold_for(cat);

  std::vector<SampledChain> working;  // grows as proposals are accepted
  working.reserve(base.size() + proposals.size());
  for (const MapElement& e : base) {
    working.push_back(sample_chain(e, cfg.chamfer_samples));
  }

  std::vector<std::size_t> order(proposals.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return *proposals[a].score > *proposals[b].score;
                   });

  for (std::size_t i : order) {
    const MapElement& head = proposals[i];
    const SampledChain head_chain = sample_chain(head, cfg.chamfer_samples);
    bool duplicate = false;
    for (const SampledChain& b : working) {
      if (chamfer_distance(head_chain, b) < threshold) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      working.push_back(head_chain);
      result.added.push_back(head);
      result.added_scores.push_back(*head.score * cfg.score_decay);
    }
  }
  return result;
}

namespace {

std::vector<MapElement> of_category(const std::vector<MapElement>& elems,
                                    Category cat) {
  std::vector<MapElement> out;
  for (const MapElement& e : elems) {
    if (e.category == cat) out.push_back(e);
  }
  return out;
}

void append_added(MapFrame& frame, const MergeResult& merged) {
  for (std::size_t i = 0; i < merged.added.size(); ++i) {
    const MapElement& e = merged.added[i];
    frame.elements.emplace_back(e.category, e.polyline,
                                merged.added_scores[i], e.closed);
  }
}

void require_scored(const MapFrame& f, const char* what) {
  for (const MapElement& e : f.elements) {
    if (!e.score) {
      throw std::invalid_argument(std::string(what) +
                                  ": unscored element in frame '" +
                                  f.frame_id + "'");
    }
  }
}

}  // namespace

MapFrame multi_model_ensemble(const std::vector<MapFrame>& model_frames,
                              const EnsembleConfig& cfg) {
  cfg.validate();
  if (model_frames.empty()) {
    throw std::invalid_argument("multi_model_ensemble: no model frames");
  }
  for (const MapFrame& f : model_frames) {
    if (f.frame_id != model_frames.front().frame_id) {
      throw ValidationError("multi_model_ensemble: frame_id mismatch ('" +
                            f.frame_id + "' vs '" +
                            model_frames.front().frame_id + "')");
    }
    require_scored(f, "multi_model_ensemble");
  }

  MapFrame out = model_frames.front();
  for (Category cat : all_categories()) {
    const std::vector<MapElement> base =
        of_category(model_frames.front().elements, cat);
    std::vector<MapElement> proposals;
    for (std::size_t m = 1; m < model_frames.size(); ++m) {
      for (const MapElement& e : model_frames[m].elements) {
        if (e.category == cat) proposals.push_back(e);
      }
    }
    append_added(out, ensemble_merge(base, proposals, cfg));
  }
  return out;
}

MapFrame multi_frame_ensemble(const MapFrame& current,
                              const std::vector<MapFrame>& history,
                              const EnsembleConfig& cfg,
                              const PerceptionWindow& window) {
  cfg.validate();
  require_scored(current, "multi_frame_ensemble");

  const std::size_t n_hist = std::min<std::size_t>(
      history.size(), static_cast<std::size_t>(cfg.max_history));

  // Proposals: history re-expressed in the current ego frame, in recency
  // order; the scores already encode confidence.
  std::vector<MapElement> proposals;
  for (std::size_t h = 0; h < n_hist; ++h) {
    const MapFrame& prev = history[h];
    require_scored(prev, "multi_frame_ensemble");
    for (const MapElement& e : prev.elements) {
      const std::vector<Point2> moved =
          transform_points(prev.pose, current.pose, e.polyline.points());
      const MapElement shifted(e.category, Polyline(moved), e.score, e.closed);
      for (MapElement& piece :
           clip_to_window(shifted, window, kDefaultMinClipLength)) {
        proposals.push_back(std::move(piece));
      }
    }
  }

  MapFrame out = current;
  for (Category cat : all_categories()) {
    append_added(out, ensemble_merge(of_category(current.elements, cat),
                                     of_category(proposals, cat), cfg));
  }
  return out;
}

}  // namespace vecmap
