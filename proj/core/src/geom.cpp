#include "vecmap/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vecmap {

namespace {

constexpr double kPi = 3.14159265358979323846;

Point2 lerp(const Point2& a, const Point2& b, double t) {
  return Point2(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
}

double segment_length(const Point2& a, const Point2& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

}  // namespace

Point2::Point2(double x_, double y_) : x(x_), y(y_) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("Point2: coordinates must be finite");
  }
}

bool bev_order_before(const Point2& a, const Point2& b) {
  if (a.y != b.y) return a.y > b.y;
  return a.x < b.x;
}

Polyline::Polyline(std::vector<Point2> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw std::invalid_argument("Polyline: needs at least 2 points");
  }
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y)) {
      throw std::invalid_argument("Polyline: non-finite coordinate");
    }
    if (points_[i] == points_[i + 1]) {
      throw std::invalid_argument(
          "Polyline: consecutive duplicate points (zero-length segment)");
    }
  }
  const Point2& last = points_.back();
  if (!std::isfinite(last.x) || !std::isfinite(last.y)) {
    throw std::invalid_argument("Polyline: non-finite coordinate");
  }
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::PedCrossing:
      return "ped_crossing";
    case Category::LaneDivider:
      return "lane_divider";
    case Category::RoadBoundary:
      return "road_boundary";
  }
  return "unknown";
}

std::optional<Category> category_from_string(std::string_view s) {
  if (s == "ped_crossing") return Category::PedCrossing;
  if (s == "lane_divider") return Category::LaneDivider;
  if (s == "road_boundary") return Category::RoadBoundary;
  return std::nullopt;
}

MapElement::MapElement(Category category_, Polyline polyline_,
                       std::optional<double> score_, bool closed_)
    : category(category_),
      polyline(std::move(polyline_)),
      score(score_),
      closed(closed_) {
  if (score && (!std::isfinite(*score) || *score < 0.0 || *score > 1.0)) {
    throw std::invalid_argument("MapElement: score must be in [0, 1]");
  }
  if (closed && polyline.front() == polyline.back()) {
    throw std::invalid_argument(
        "MapElement: closed ring must not duplicate its first point");
  }
}

std::vector<Point2> MapElement::chain() const {
  std::vector<Point2> pts = polyline.points();
  if (closed) pts.push_back(pts.front());
  return pts;
}

bool element_order_less(const MapElement& a, const MapElement& b) {
  if (a.category != b.category) {
    return static_cast<int>(a.category) < static_cast<int>(b.category);
  }
  const Point2& pa = a.polyline.front();
  const Point2& pb = b.polyline.front();
  if (pa.y != pb.y) return pa.y > pb.y;
  if (pa.x != pb.x) return pa.x < pb.x;
  const auto& va = a.polyline.points();
  const auto& vb = b.polyline.points();
  for (std::size_t i = 0; i < std::min(va.size(), vb.size()); ++i) {
    if (va[i].x != vb[i].x) return va[i].x < vb[i].x;
    if (va[i].y != vb[i].y) return va[i].y < vb[i].y;
  }
  if (va.size() != vb.size()) return va.size() < vb.size();
  if (a.closed != b.closed) return b.closed;
  return a.score.value_or(-1.0) < b.score.value_or(-1.0);
}

Pose2::Pose2(double tx_, double ty_, double yaw_) : tx(tx_), ty(ty_) {
  if (!std::isfinite(tx) || !std::isfinite(ty) || !std::isfinite(yaw_)) {
    throw std::invalid_argument("Pose2: fields must be finite");
  }
  // Normalize to (-pi, pi].
  double y = std::fmod(yaw_, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  if (y > kPi) y -= 2.0 * kPi;
  yaw = y;
}

PerceptionWindow::PerceptionWindow(double x_min_, double x_max_, double y_min_,
                                   double y_max_)
    : x_min(x_min_), x_max(x_max_), y_min(y_min_), y_max(y_max_) {
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw std::invalid_argument("PerceptionWindow: empty or inverted bounds");
  }
}

bool PerceptionWindow::contains(const Point2& p, double eps) const {
  return p.x >= x_min - eps && p.x <= x_max + eps && p.y >= y_min - eps &&
         p.y <= y_max + eps;
}

double chain_length(std::span<const Point2> pts) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    len += segment_length(pts[i], pts[i + 1]);
  }
  return len;
}

double polyline_length(const Polyline& p) { return chain_length(p.points()); }

double point_segment_distance(const Point2& p, const Point2& a,
                              const Point2& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return std::hypot(p.x - a.x, p.y - a.y);
  double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

std::vector<Point2> resample_points(std::span<const Point2> pts, int n) {
  if (n < 2) {
    throw std::invalid_argument("resample_points: n must be >= 2");
  }
  if (pts.size() < 2) {
    throw std::invalid_argument("resample_points: chain needs >= 2 points");
  }
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    cum[i] = cum[i - 1] + segment_length(pts[i - 1], pts[i]);
  }
  const double total = cum.back();

  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(n));
  out.push_back(pts.front());
  if (total > 0.0) {
    std::size_t seg = 0;
    for (int k = 1; k + 1 < n; ++k) {
      const double target = total * static_cast<double>(k) / (n - 1);
      while (seg + 2 < pts.size() && cum[seg + 1] < target) ++seg;
      const double seg_len = cum[seg + 1] - cum[seg];
      const double t = seg_len > 0.0 ? (target - cum[seg]) / seg_len : 0.0;
      out.push_back(lerp(pts[seg], pts[seg + 1], t));
    }
  } else {
    for (int k = 1; k + 1 < n; ++k) out.push_back(pts.front());
  }
  out.push_back(pts.back());
  return out;
}

Polyline resample_polyline(const Polyline& p, int n) {
  return Polyline(resample_points(p.points(), n));
}

SampledChain sample_chain(std::span<const Point2> pts, int samples) {
  const std::vector<Point2> rs = resample_points(pts, samples);
  SampledChain out;
  out.xs.reserve(rs.size());
  out.ys.reserve(rs.size());
  for (const Point2& p : rs) {
    out.xs.push_back(p.x);
    out.ys.push_back(p.y);
  }
  return out;
}

SampledChain sample_chain(const MapElement& e, int samples) {
  const std::vector<Point2> pts = e.chain();
  return sample_chain(pts, samples);
}

namespace {

// Mean over a of the distance to the nearest point of b.
double mean_nearest(const SampledChain& a, const SampledChain& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const double* bx = b.xs.data();
  const double* by = b.ys.data();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = a.xs[i];
    const double ay = a.ys[i];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      const double dx = ax - bx[j];
      const double dy = ay - by[j];
      const double d2 = dx * dx + dy * dy;
      best = d2 < best ? d2 : best;
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(n);
}

}  // namespace

double chamfer_distance(const SampledChain& a, const SampledChain& b) {
  if (a.size() == 0 || b.size() == 0) {
    throw std::invalid_argument("chamfer_distance: empty sample set");
  }
  return 0.5 * (mean_nearest(a, b) + mean_nearest(b, a));
}

double chamfer_distance(const Polyline& a, const Polyline& b, int samples) {
  return chamfer_distance(sample_chain(a.points(), samples),
                          sample_chain(b.points(), samples));
}

double chamfer_distance(const MapElement& a, const MapElement& b,
                        int samples) {
  return chamfer_distance(sample_chain(a, samples), sample_chain(b, samples));
}

std::vector<Point2> transform_points(const Pose2& src, const Pose2& dst,
                                     std::span<const Point2> pts) {
  const double cs = std::cos(src.yaw);
  const double ss = std::sin(src.yaw);
  const double cd = std::cos(dst.yaw);
  const double sd = std::sin(dst.yaw);
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const Point2& p : pts) {
    const double wx = cs * p.x - ss * p.y + src.tx;
    const double wy = ss * p.x + cs * p.y + src.ty;
    const double rx = wx - dst.tx;
    const double ry = wy - dst.ty;
    out.emplace_back(cd * rx + sd * ry, -sd * rx + cd * ry);
  }
  return out;
}

bool clip_segment_to_window(const Point2& p, const Point2& q,
                            const PerceptionWindow& w, double& t0, double& t1) {
  const double dx = q.x - p.x;
  const double dy = q.y - p.y;
  t0 = 0.0;
  t1 = 1.0;
  const double denom[4] = {-dx, dx, -dy, dy};
  const double num[4] = {p.x - w.x_min, w.x_max - p.x, p.y - w.y_min,
                         w.y_max - p.y};
  for (int k = 0; k < 4; ++k) {
    if (denom[k] == 0.0) {
      if (num[k] < 0.0) return false;
      continue;
    }
    const double t = num[k] / denom[k];
    if (denom[k] < 0.0) {
      if (t > t1) return false;
      if (t > t0) t0 = t;
    } else {
      if (t < t0) return false;
      if (t < t1) t1 = t;
    }
  }
  return t0 <= t1;
}

std::vector<MapElement> clip_to_window(const MapElement& e,
                                       const PerceptionWindow& w,
                                       double min_length) {
  const std::vector<Point2> pts = e.chain();

  std::vector<std::vector<Point2>> pieces;
  std::vector<Point2> cur;
  auto flush = [&]() {
    if (cur.size() >= 2) pieces.push_back(cur);
    cur.clear();
  };
  auto push_point = [&](const Point2& p) {
    if (cur.empty() || !(cur.back() == p)) cur.push_back(p);
  };

  bool whole_chain_inside = true;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double t0 = 0.0;
    double t1 = 1.0;
    if (!clip_segment_to_window(pts[i], pts[i + 1], w, t0, t1)) {
      whole_chain_inside = false;
      flush();
      continue;
    }
    const Point2 a = t0 == 0.0 ? pts[i] : lerp(pts[i], pts[i + 1], t0);
    const Point2 b = t1 == 1.0 ? pts[i + 1] : lerp(pts[i], pts[i + 1], t1);
    if (t0 > 0.0) {
      whole_chain_inside = false;
      flush();  // entered mid-segment: any previous piece ended earlier
    }
    push_point(a);
    push_point(b);
    if (t1 < 1.0) {
      whole_chain_inside = false;
      flush();
    }
  }
  flush();

  if (whole_chain_inside && pieces.size() == 1 &&
      pieces[0].size() == pts.size()) {
    // Untouched by the border; keep closedness (and identity).
    if (chain_length(pts) >= min_length) return {e};
    return {};
  }

  // A cut ring leaves two pieces meeting at the seam vertex; join them so
  // the output is one contiguous chain through the original start point.
  if (e.closed && pieces.size() >= 2) {
    const std::vector<Point2>& first = pieces.front();
    const std::vector<Point2>& last = pieces.back();
    if (first.front() == pts.front() && last.back() == pts.front()) {
      std::vector<Point2> merged = last;
      merged.insert(merged.end(), first.begin() + 1, first.end());
      pieces.front() = std::move(merged);
      pieces.pop_back();
    }
  }

  std::vector<MapElement> out;
  for (const std::vector<Point2>& piece : pieces) {
    if (chain_length(piece) < min_length) continue;
    out.emplace_back(e.category, Polyline(piece), e.score, false);
  }
  return out;
}

}  // namespace vecmap
