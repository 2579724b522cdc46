#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "vecmap/geom.hpp"

namespace vecmap {

enum class SimplifyMethod { DouglasPeucker, Visvalingam };

/// Simplification settings. Tolerances are strictly positive; defaults keep
/// the deviation below the tightest 0.2 m verification threshold.
struct CompactionConfig {
  struct Override {
    SimplifyMethod method;
    double tolerance;
  };

  SimplifyMethod method = SimplifyMethod::DouglasPeucker;
  double dp_epsilon = 0.15;            // meters
  double vis_area_threshold = 0.10;    // square meters
  std::map<Category, Override> per_category;

  /// Effective (method, tolerance) for one category.
  Override for_category(Category c) const;
  void validate() const;
};

struct CategoryCompactionStats {
  std::int64_t instance_count = 0;
  std::int64_t raw_point_count = 0;
  std::int64_t compacted_point_count = 0;
  double reduction_percent = 0.0;
  std::map<double, double> ap_at;  // threshold (m) -> AP
};

struct CompactionReport {
  std::map<Category, CategoryCompactionStats> per_category;
  std::vector<double> thresholds;
  int chamfer_samples = 100;
};

/// Reorders the points of an element so equivalent geometry has a unique
/// representation: open chains run front-to-back (larger y first, ties
/// left-to-right); rings start at the front-left-most vertex and run
/// counterclockwise. The point set is preserved exactly. Idempotent.
MapElement canonicalize_direction(const MapElement& e);

/// Douglas-Peucker: keeps a subsequence of the input containing both
/// endpoints; every removed point lies within epsilon of the output chain.
Polyline simplify_dp(const Polyline& p, double epsilon);

/// Visvalingam: repeatedly removes the interior point whose effective
/// triangle area is smallest, while that minimum is <= area_threshold.
Polyline simplify_visvalingam(const Polyline& p, double area_threshold);

/// Canonicalize + simplify one element. Rings are simplified on the
/// ring-expanded chain with the canonical start vertex pinned.
MapElement compact_element(const MapElement& e, const CompactionConfig& cfg);

/// compact_element over every element of the frame; element order and frame
/// metadata are untouched.
MapFrame compact_frame(const MapFrame& f, const CompactionConfig& cfg);

/// Frame-parallel map of compact_frame; output is independent of threads.
std::vector<MapFrame> compact_frames(const std::vector<MapFrame>& frames,
                                     const CompactionConfig& cfg,
                                     int threads = 1);

/// Fidelity check: compacted elements (score 1.0) are evaluated as
/// predictions against the originals at each threshold, and point counts
/// are tallied per category. Frames are aligned by frame_id.
CompactionReport verify_compaction(const std::vector<MapFrame>& original,
                                   const std::vector<MapFrame>& compacted,
                                   const std::vector<double>& thresholds,
                                   int chamfer_samples = 100);

}  // namespace vecmap
