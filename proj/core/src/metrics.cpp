#include "vecmap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "parallel_for.hpp"

namespace vecmap {

void EvalConfig::validate() const {
  if (thresholds.empty()) {
    throw std::invalid_argument("EvalConfig: thresholds must be non-empty");
  }
  double prev = 0.0;
  for (double t : thresholds) {
    if (!(t > prev)) {
      throw std::invalid_argument(
          "EvalConfig: thresholds must be positive and strictly increasing");
    }
    prev = t;
  }
  if (chamfer_samples < 2) {
    throw std::invalid_argument("EvalConfig: chamfer_samples must be >= 2");
  }
}

namespace {

// Row-major #preds x #gts chamfer matrix with each element resampled once.
std::vector<double> chamfer_matrix(const std::vector<MapElement>& preds,
                                   const std::vector<MapElement>& gts,
                                   int samples) {
  std::vector<SampledChain> ps;
  ps.reserve(preds.size());
  for (const MapElement& e : preds) ps.push_back(sample_chain(e, samples));
  std::vector<SampledChain> gs;
  gs.reserve(gts.size());
  for (const MapElement& e : gts) gs.push_back(sample_chain(e, samples));

  std::vector<double> m(preds.size() * gts.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t j = 0; j < gs.size(); ++j) {
      m[i * gs.size() + j] = chamfer_distance(ps[i], gs[j]);
    }
  }
  return m;
}

// Descending-score processing order, ties by input index.
std::vector<std::size_t> score_order(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  return order;
}

MatchResult greedy_match(const std::vector<double>& scores,
                         const std::vector<double>& matrix, std::size_t n_gt,
                         double tau) {
  MatchResult result;
  result.predictions.reserve(scores.size());
  std::vector<char> gt_taken(n_gt, 0);
  for (std::size_t i : score_order(scores)) {
    MatchedPrediction mp;
    mp.score = scores[i];
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = n_gt;
    for (std::size_t j = 0; j < n_gt; ++j) {
      if (gt_taken[j]) continue;
      const double d = matrix[i * n_gt + j];
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    mp.chamfer = best;
    if (best_j < n_gt && best < tau) {
      mp.is_tp = true;
      mp.matched_gt = best_j;
      gt_taken[best_j] = 1;
    }
    result.predictions.push_back(mp);
  }
  return result;
}

// AP over a descending-score sweep of TP flags. Recall increments are
// accumulated as integer TP counts so an all-correct sweep sums to exactly
// n_gt / n_gt = 1.
double ap_from_flags(const std::vector<char>& is_tp, std::size_t n_gt) {
  if (n_gt == 0) return is_tp.empty() ? 1.0 : 0.0;
  if (is_tp.empty()) return 0.0;

  std::vector<double> precision(is_tp.size());
  std::vector<std::size_t> tp_cum(is_tp.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < is_tp.size(); ++i) {
    if (is_tp[i]) ++tp;
    tp_cum[i] = tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  // Monotone envelope: p(r) = max precision at recall >= r.
  for (std::size_t i = is_tp.size() - 1; i-- > 0;) {
    precision[i] = std::max(precision[i], precision[i + 1]);
  }
  double weighted = 0.0;
  std::size_t prev_tp = 0;
  for (std::size_t i = 0; i < is_tp.size(); ++i) {
    if (tp_cum[i] > prev_tp) {
      weighted += static_cast<double>(tp_cum[i] - prev_tp) * precision[i];
      prev_tp = tp_cum[i];
    }
  }
  return weighted / static_cast<double>(n_gt);
}

void require_same_category(const std::vector<MapElement>& elems, Category c,
                           const char* what) {
  for (const MapElement& e : elems) {
    if (e.category != c) {
      throw std::invalid_argument(std::string(what) +
                                  ": elements span multiple categories");
    }
  }
}

std::vector<double> scores_of(const std::vector<MapElement>& preds) {
  std::vector<double> scores;
  scores.reserve(preds.size());
  for (const MapElement& e : preds) {
    if (!e.score) {
      throw std::invalid_argument("prediction without a confidence score");
    }
    scores.push_back(*e.score);
  }
  return scores;
}

}  // namespace

MatchResult match_instances(const std::vector<MapElement>& preds,
                            const std::vector<MapElement>& gts, double tau,
                            int samples) {
  if (!preds.empty()) {
    require_same_category(preds, preds.front().category, "match_instances");
    require_same_category(gts, preds.front().category, "match_instances");
  } else if (!gts.empty()) {
    require_same_category(gts, gts.front().category, "match_instances");
  }
  const std::vector<double> scores = scores_of(preds);
  const std::vector<double> matrix = chamfer_matrix(preds, gts, samples);
  return greedy_match(scores, matrix, gts.size(), tau);
}

double average_precision(const MatchResult& match, std::size_t n_gt) {
  std::vector<char> flags;
  flags.reserve(match.predictions.size());
  for (const MatchedPrediction& mp : match.predictions) {
    flags.push_back(mp.is_tp ? 1 : 0);
  }
  return ap_from_flags(flags, n_gt);
}

namespace {

struct PooledPrediction {
  double score;
  char is_tp;
};

// Matching outcome of one frame: per category x threshold, predictions in
// processed order.
struct FrameOutcome {
  std::array<std::vector<std::vector<PooledPrediction>>, 3> per_category;
  std::array<std::size_t, 3> n_gt{};
  std::array<std::size_t, 3> n_pred{};
};

}  // namespace

EvalReport evaluate(const std::vector<MapFrame>& preds,
                    const std::vector<MapFrame>& gts, const EvalConfig& cfg,
                    int threads) {
  cfg.validate();

  std::map<std::string, const MapFrame*> gt_by_id;
  for (const MapFrame& f : gts) {
    if (!gt_by_id.emplace(f.frame_id, &f).second) {
      throw ValidationError("evaluate: duplicate GT frame_id '" + f.frame_id +
                            "'");
    }
  }
  if (preds.size() != gts.size()) {
    throw ValidationError("evaluate: prediction/GT frame count mismatch");
  }
  std::vector<const MapFrame*> gt_frames(preds.size());
  {
    std::map<std::string, bool> seen;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const auto it = gt_by_id.find(preds[i].frame_id);
      if (it == gt_by_id.end()) {
        throw ValidationError("evaluate: no GT frame for id '" +
                              preds[i].frame_id + "'");
      }
      if (!seen.emplace(preds[i].frame_id, true).second) {
        throw ValidationError("evaluate: duplicate prediction frame_id '" +
                              preds[i].frame_id + "'");
      }
      gt_frames[i] = it->second;
    }
  }

  const std::size_t n_thresholds = cfg.thresholds.size();
  std::vector<FrameOutcome> outcomes(preds.size());

  parallel_for_index(preds.size(), threads, [&](std::size_t fi) {
    FrameOutcome& out = outcomes[fi];
    for (std::size_t ci = 0; ci < 3; ++ci) {
      const Category cat = all_categories()[ci];
      std::vector<MapElement> p;
      std::vector<MapElement> g;
      for (const MapElement& e : preds[fi].elements) {
        if (e.category == cat) p.push_back(e);
      }
      for (const MapElement& e : gt_frames[fi]->elements) {
        if (e.category == cat) g.push_back(e);
      }
      out.n_gt[ci] = g.size();
      out.n_pred[ci] = p.size();
      const std::vector<double> scores = scores_of(p);
      const std::vector<double> matrix =
          chamfer_matrix(p, g, cfg.chamfer_samples);
      out.per_category[ci].resize(n_thresholds);
      for (std::size_t ti = 0; ti < n_thresholds; ++ti) {
        const MatchResult match =
            greedy_match(scores, matrix, g.size(), cfg.thresholds[ti]);
        auto& pooled = out.per_category[ci][ti];
        pooled.reserve(match.predictions.size());
        for (const MatchedPrediction& mp : match.predictions) {
          pooled.push_back({mp.score, static_cast<char>(mp.is_tp ? 1 : 0)});
        }
      }
    }
  });

  EvalReport report;
  report.thresholds = cfg.thresholds;
  report.chamfer_samples = cfg.chamfer_samples;

  double category_ap_sum = 0.0;
  for (std::size_t ci = 0; ci < 3; ++ci) {
    const Category cat = all_categories()[ci];
    CategoryEval ce;
    std::size_t n_gt = 0;
    for (const FrameOutcome& out : outcomes) {
      n_gt += out.n_gt[ci];
      ce.n_predictions += out.n_pred[ci];
    }
    ce.n_ground_truth = n_gt;

    double ap_sum = 0.0;
    for (std::size_t ti = 0; ti < n_thresholds; ++ti) {
      std::vector<PooledPrediction> pooled;
      for (const FrameOutcome& out : outcomes) {
        const auto& frame_preds = out.per_category[ci][ti];
        pooled.insert(pooled.end(), frame_preds.begin(), frame_preds.end());
      }
      // Frames already emit descending-score runs; pooled ties keep frame
      // order via the stable sort.
      std::stable_sort(pooled.begin(), pooled.end(),
                       [](const PooledPrediction& a, const PooledPrediction& b) {
                         return a.score > b.score;
                       });
      std::vector<char> flags;
      flags.reserve(pooled.size());
      for (const PooledPrediction& p : pooled) flags.push_back(p.is_tp);
      const double ap = ap_from_flags(flags, n_gt);
      ce.ap_per_threshold[cfg.thresholds[ti]] = ap;
      ap_sum += ap;
    }
    ce.ap_mean = ap_sum / static_cast<double>(n_thresholds);
    category_ap_sum += ce.ap_mean;
    report.per_category[cat] = std::move(ce);
  }
  report.mean_ap = category_ap_sum / 3.0;
  return report;
}

}  // namespace vecmap
