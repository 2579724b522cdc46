#include "vecmap/compact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "parallel_for.hpp"
#include "vecmap/metrics.hpp"

namespace vecmap {

namespace {

double triangle_area(const Point2& a, const Point2& b, const Point2& c) {
  return 0.5 * std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

// Twice the signed area of the ring (shoelace); positive when CCW.
double ring_signed_area2(const std::vector<Point2>& ring) {
  double s = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Point2& a = ring[i];
    const Point2& b = ring[(i + 1) % ring.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return s;
}

std::vector<Point2> simplify_chain_dp(const std::vector<Point2>& pts,
                                      double epsilon) {
  const std::size_t n = pts.size();
  std::vector<char> keep(n, 0);
  keep.front() = keep.back() = 1;

  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n - 1}};
  while (!stack.empty()) {
    const auto [lo, hi] = stack.back();
    stack.pop_back();
    if (hi <= lo + 1) continue;
    double max_d = -1.0;
    std::size_t max_i = lo;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      const double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
      if (d > max_d) {
        max_d = d;
        max_i = i;
      }
    }
    if (max_d > epsilon) {
      keep[max_i] = 1;
      stack.emplace_back(lo, max_i);
      stack.emplace_back(max_i, hi);
    }
  }

  std::vector<Point2> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) out.push_back(pts[i]);
  }
  return out;
}

std::vector<Point2> simplify_chain_vis(const std::vector<Point2>& pts,
                                       double area_threshold) {
  const std::size_t n = pts.size();
  if (n <= 2) return pts;

  std::vector<std::size_t> prev(n), next(n);
  std::vector<char> removed(n, 0);
  std::vector<std::uint32_t> stamp(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    prev[i] = i == 0 ? 0 : i - 1;
    next[i] = i == n - 1 ? n - 1 : i + 1;
  }

  using Entry = std::tuple<double, std::size_t, std::uint32_t>;
  auto cmp = [](const Entry& a, const Entry& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::get<1>(a) > std::get<1>(b);
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);

  auto push_area = [&](std::size_t i) {
    heap.emplace(triangle_area(pts[prev[i]], pts[i], pts[next[i]]), i,
                 ++stamp[i]);
  };
  for (std::size_t i = 1; i + 1 < n; ++i) push_area(i);

  while (!heap.empty()) {
    const auto [area, i, version] = heap.top();
    heap.pop();
    if (removed[i] || version != stamp[i]) continue;
    if (area > area_threshold) break;
    removed[i] = 1;
    const std::size_t p = prev[i];
    const std::size_t q = next[i];
    next[p] = q;
    prev[q] = p;
    if (p != 0) push_area(p);
    if (q != n - 1) push_area(q);
  }

  std::vector<Point2> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) out.push_back(pts[i]);
  }
  return out;
}

std::vector<Point2> simplify_chain(const std::vector<Point2>& pts,
                                   SimplifyMethod method, double tolerance) {
  return method == SimplifyMethod::DouglasPeucker
             ? simplify_chain_dp(pts, tolerance)
             : simplify_chain_vis(pts, tolerance);
}

}  // namespace

CompactionConfig::Override CompactionConfig::for_category(Category c) const {
  if (auto it = per_category.find(c); it != per_category.end()) {
    return it->second;
  }
  const double tol = method == SimplifyMethod::DouglasPeucker
                         ? dp_epsilon
                         : vis_area_threshold;
  return Override{method, tol};
}

void CompactionConfig::validate() const {
  if (!(dp_epsilon > 0.0) || !(vis_area_threshold > 0.0)) {
    throw std::invalid_argument("CompactionConfig: tolerances must be > 0");
  }
  for (const auto& [cat, ov] : per_category) {
    if (!(ov.tolerance > 0.0)) {
      throw std::invalid_argument("CompactionConfig: tolerances must be > 0");
    }
  }
}

MapElement canonicalize_direction(const MapElement& e) {
  const std::vector<Point2>& pts = e.polyline.points();

  if (!e.closed) {
    // Keep or reverse only; equal endpoints keep the input order.
    if (bev_order_before(pts.back(), pts.front())) {
      std::vector<Point2> rev(pts.rbegin(), pts.rend());
      return MapElement(e.category, Polyline(std::move(rev)), e.score, false);
    }
    return e;
  }

  std::vector<Point2> ring = pts;
  if (ring_signed_area2(ring) < 0.0) {
    std::reverse(ring.begin(), ring.end());
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    if (bev_order_before(ring[i], ring[best])) best = i;
  }
  std::rotate(ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(best),
              ring.end());
  return MapElement(e.category, Polyline(std::move(ring)), e.score, true);
}

Polyline simplify_dp(const Polyline& p, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("simplify_dp: epsilon must be > 0");
  }
  return Polyline(simplify_chain_dp(p.points(), epsilon));
}

Polyline simplify_visvalingam(const Polyline& p, double area_threshold) {
  if (!(area_threshold > 0.0)) {
    throw std::invalid_argument(
        "simplify_visvalingam: area threshold must be > 0");
  }
  return Polyline(simplify_chain_vis(p.points(), area_threshold));
}

MapElement compact_element(const MapElement& e, const CompactionConfig& cfg) {
  const MapElement canon = canonicalize_direction(e);
  const auto [method, tolerance] = cfg.for_category(e.category);

  if (!canon.closed) {
    return MapElement(canon.category,
                      Polyline(simplify_chain(canon.polyline.points(), method,
                                              tolerance)),
                      canon.score, false);
  }

  // Simplify the ring-expanded chain; both copies of the pinned start
  // vertex survive, so the result stays canonical.
  const std::vector<Point2> expanded = canon.chain();
  std::vector<Point2> simplified = simplify_chain(expanded, method, tolerance);
  if (simplified.size() < 3) {
    // Ring collapsed onto its start vertex; keep the farthest vertex so a
    // degenerate two-point ring survives.
    std::size_t far = 1;
    double far_d = -1.0;
    for (std::size_t i = 1; i + 1 < expanded.size(); ++i) {
      const double d = std::hypot(expanded[i].x - expanded[0].x,
                                  expanded[i].y - expanded[0].y);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    simplified = {expanded.front(), expanded[far], expanded.back()};
  }
  simplified.pop_back();  // drop the duplicated seam vertex
  return MapElement(canon.category, Polyline(std::move(simplified)),
                    canon.score, true);
}

MapFrame compact_frame(const MapFrame& f, const CompactionConfig& cfg) {
  cfg.validate();
  MapFrame out;
  out.frame_id = f.frame_id;
  out.timestamp_us = f.timestamp_us;
  out.pose = f.pose;
  out.elements.reserve(f.elements.size());
  for (const MapElement& e : f.elements) {
    out.elements.push_back(compact_element(e, cfg));
  }
  return out;
}

std::vector<MapFrame> compact_frames(const std::vector<MapFrame>& frames,
                                     const CompactionConfig& cfg,
                                     int threads) {
  cfg.validate();
  std::vector<MapFrame> out(frames.size());
  parallel_for_index(frames.size(), threads, [&](std::size_t i) {
    out[i] = compact_frame(frames[i], cfg);
  });
  return out;
}

CompactionReport verify_compaction(const std::vector<MapFrame>& original,
                                   const std::vector<MapFrame>& compacted,
                                   const std::vector<double>& thresholds,
                                   int chamfer_samples) {
  if (original.size() != compacted.size()) {
    throw ValidationError("verify_compaction: frame count mismatch");
  }
  std::map<std::string, const MapFrame*> by_id;
  for (const MapFrame& f : compacted) by_id[f.frame_id] = &f;
  if (by_id.size() != compacted.size()) {
    throw ValidationError("verify_compaction: duplicate frame_id");
  }

  CompactionReport report;
  report.thresholds = thresholds;
  report.chamfer_samples = chamfer_samples;
  for (Category c : all_categories()) report.per_category[c];

  std::vector<MapFrame> preds;
  preds.reserve(original.size());
  for (const MapFrame& orig : original) {
    const auto it = by_id.find(orig.frame_id);
    if (it == by_id.end()) {
      throw ValidationError("verify_compaction: no compacted frame for id '" +
                            orig.frame_id + "'");
    }
    const MapFrame& comp = *it->second;
    if (comp.elements.size() != orig.elements.size()) {
      throw ValidationError(
          "verify_compaction: element count mismatch in frame '" +
          orig.frame_id + "'");
    }
    for (const MapElement& e : orig.elements) {
      auto& stats = report.per_category[e.category];
      stats.instance_count += 1;
      stats.raw_point_count += static_cast<std::int64_t>(e.polyline.size());
    }
    MapFrame pred = comp;
    for (MapElement& e : pred.elements) {
      report.per_category[e.category].compacted_point_count +=
          static_cast<std::int64_t>(e.polyline.size());
      e.score = 1.0;
    }
    preds.push_back(std::move(pred));
  }

  for (auto& [cat, stats] : report.per_category) {
    stats.reduction_percent =
        stats.raw_point_count > 0
            ? 100.0 * (1.0 - static_cast<double>(stats.compacted_point_count) /
                                 static_cast<double>(stats.raw_point_count))
            : 0.0;
  }

  EvalConfig eval_cfg;
  eval_cfg.thresholds = thresholds;
  eval_cfg.chamfer_samples = chamfer_samples;
  const EvalReport eval = evaluate(preds, original, eval_cfg);
  for (const auto& [cat, ce] : eval.per_category) {
    report.per_category[cat].ap_at = ce.ap_per_threshold;
  }
  return report;
}

}  // namespace vecmap
