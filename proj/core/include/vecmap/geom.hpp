#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vecmap {

/// Thrown for malformed user input: files, configs, CLI arguments.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 2D point in BEV ego coordinates, meters. x is lateral (right positive),
/// y is longitudinal (forward positive). Coordinates must be finite.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  Point2() = default;
  Point2(double x_, double y_);

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Canonical BEV ordering: a precedes b when a is further front (larger y),
/// ties broken left-to-right (smaller x).
bool bev_order_before(const Point2& a, const Point2& b);

struct MapElement;

/// Total order used for canonical element listing: category, then the
/// front-left key of the start point, then progressively deeper fields.
bool element_order_less(const MapElement& a, const MapElement& b);

/// Ordered chain of at least two points. Consecutive duplicates are
/// rejected, so the total arc length is always positive. Immutable.
class Polyline {
 public:
  explicit Polyline(std::vector<Point2> points);

  const std::vector<Point2>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Point2& front() const { return points_.front(); }
  const Point2& back() const { return points_.back(); }
  const Point2& operator[](std::size_t i) const { return points_[i]; }

  friend bool operator==(const Polyline&, const Polyline&) = default;

 private:
  std::vector<Point2> points_;
};

enum class Category { PedCrossing, LaneDivider, RoadBoundary };

constexpr std::array<Category, 3> all_categories() {
  return {Category::PedCrossing, Category::LaneDivider,
          Category::RoadBoundary};
}

std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view s);

/// One vectorized map instance. `closed` marks a ring: an implicit segment
/// joins the last point back to the first and is never stored explicitly.
/// `score` is absent on ground truth and in [0, 1] on predictions.
struct MapElement {
  Category category;
  Polyline polyline;
  std::optional<double> score;
  bool closed = false;

  MapElement(Category category, Polyline polyline,
             std::optional<double> score = std::nullopt, bool closed = false);

  /// Point sequence with the closing segment made explicit for rings;
  /// open elements return their points unchanged.
  std::vector<Point2> chain() const;

  friend bool operator==(const MapElement&, const MapElement&) = default;
};

/// SE(2) ego pose (ego-to-world). yaw is normalized to (-pi, pi] at
/// construction.
struct Pose2 {
  double tx = 0.0;
  double ty = 0.0;
  double yaw = 0.0;

  Pose2() = default;
  Pose2(double tx_, double ty_, double yaw_);

  friend bool operator==(const Pose2&, const Pose2&) = default;
};

/// Timestamped set of elements with the ego pose; the unit of evaluation
/// and ensembling.
struct MapFrame {
  std::string frame_id;
  std::int64_t timestamp_us = 0;
  Pose2 pose;
  std::vector<MapElement> elements;

  friend bool operator==(const MapFrame&, const MapFrame&) = default;
};

/// Axis-aligned BEV perception window. Defaults to the 30 x 60 m region
/// [-15, 15] x [-30, 30].
struct PerceptionWindow {
  double x_min;
  double x_max;
  double y_min;
  double y_max;

  PerceptionWindow(double x_min_, double x_max_, double y_min_, double y_max_);

  static PerceptionWindow default_window() {
    return PerceptionWindow(-15.0, 15.0, -30.0, 30.0);
  }

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(const Point2& p, double eps = 0.0) const;

  friend bool operator==(const PerceptionWindow&,
                         const PerceptionWindow&) = default;
};

/// Fragments shorter than this are dropped when clipping; evaluation noise
/// rather than map content (half the tightest evaluation threshold).
inline constexpr double kDefaultMinClipLength = 0.5;

double chain_length(std::span<const Point2> pts);
double polyline_length(const Polyline& p);

/// Euclidean distance from p to the segment [a, b]; handles degenerate
/// zero-length segments.
double point_segment_distance(const Point2& p, const Point2& a,
                              const Point2& b);

/// n points at equal arc-length spacing along the chain. First and last
/// output points equal the chain endpoints exactly; all outputs lie on the
/// input chain. n >= 2.
std::vector<Point2> resample_points(std::span<const Point2> pts, int n);
Polyline resample_polyline(const Polyline& p, int n);

/// Resampled chain in structure-of-arrays layout for the chamfer kernel.
struct SampledChain {
  std::vector<double> xs;
  std::vector<double> ys;

  std::size_t size() const { return xs.size(); }
};

SampledChain sample_chain(std::span<const Point2> pts, int samples);
SampledChain sample_chain(const MapElement& e, int samples);

/// Symmetric chamfer distance between two sampled point sets:
/// 0.5 * (mean nearest-neighbor distance a->b + mean b->a).
double chamfer_distance(const SampledChain& a, const SampledChain& b);

/// Chamfer distance after resampling both polylines to `samples` points.
/// Symmetric, non-negative, deterministic. samples >= 2.
double chamfer_distance(const Polyline& a, const Polyline& b, int samples);

/// Element-level chamfer; rings are compared on their ring-expanded chains.
double chamfer_distance(const MapElement& a, const MapElement& b, int samples);

/// Re-expresses points given in the src ego frame in the dst ego frame:
/// out = dst^-1 . (src . p).
std::vector<Point2> transform_points(const Pose2& src, const Pose2& dst,
                                     std::span<const Point2> pts);

/// Liang-Barsky segment/rectangle intersection. Returns false when the
/// segment misses the window; otherwise [t0, t1] delimits the in-window
/// part of p + t*(q - p).
bool clip_segment_to_window(const Point2& p, const Point2& q,
                            const PerceptionWindow& w, double& t0, double& t1);

/// Intersects the element with the window. Chains crossing the border are
/// cut at the exact boundary intersection; each contiguous in-window piece
/// becomes one output element. Rings that are cut come back open. Pieces
/// shorter than min_length are dropped. Fully outside yields an empty list.
std::vector<MapElement> clip_to_window(const MapElement& e,
                                       const PerceptionWindow& w,
                                       double min_length);

}  // namespace vecmap
