#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vecmap/compact.hpp"
#include "vecmap/geom.hpp"

namespace vecmap {

/// BEV raster layout over the perception window. Rows run along the
/// longitudinal axis (row 0 at y_max), columns along the lateral axis
/// (col 0 at x_min). Defaults give 0.15 m/cell in both directions.
struct GridSpec {
  int rows = 400;
  int cols = 200;
  PerceptionWindow window = PerceptionWindow::default_window();

  struct Cell {
    int row = 0;
    int col = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
  };

  double res_x() const { return window.width() / cols; }
  double res_y() const { return window.height() / rows; }

  /// row = floor((y_max - y) / res_y), col = floor((x - x_min) / res_x),
  /// clamped to bounds.
  Cell to_cell(const Point2& p) const;

  /// Metric coordinates of the cell center; inverse of to_cell for all
  /// in-range cells.
  Point2 cell_center(int row, int col) const;

  void validate() const;
};

/// Binary occupancy raster; a value object.
class BevMask {
 public:
  explicit BevMask(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  int rows() const { return grid_.rows; }
  int cols() const { return grid_.cols; }

  bool at(int row, int col) const {
    return bits_[static_cast<std::size_t>(row) * grid_.cols + col] != 0;
  }
  void set(int row, int col, bool value = true) {
    bits_[static_cast<std::size_t>(row) * grid_.cols + col] = value ? 1 : 0;
  }
  bool in_bounds(int row, int col) const {
    return row >= 0 && row < grid_.rows && col >= 0 && col < grid_.cols;
  }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  friend bool operator==(const BevMask&, const BevMask&) = default;

 private:
  GridSpec grid_;
  std::vector<std::uint8_t> bits_;
};

/// Draws the element onto a fresh mask: segments are clipped to the window,
/// walked cell-by-cell, then the mask is dilated by (thickness_cells - 1)
/// with a square structuring element. Rings include the closing segment;
/// with `filled` the ring interior is filled by scanline. Throws when the
/// element misses the window entirely.
BevMask rasterize(const MapElement& e, const GridSpec& g, int thickness_cells,
                  bool filled = false);

/// Zhang-Suen thinning: two-subpass boundary deletion iterated to a fixed
/// point. The skeleton is a subset of the input and one pixel wide.
BevMask thin(const BevMask& m);

struct TracedCurve {
  Polyline polyline;
  bool closed = false;
};

/// Vectorizes a thinned mask. Each 8-connected component yields the longest
/// endpoint-to-endpoint path through it (branches off that path are
/// dropped); components without endpoints are traced as closed rings
/// starting from the front-left-most pixel. Pixel centers are returned in
/// metric coordinates.
std::vector<TracedCurve> trace_skeleton(const BevMask& m);

/// Mask post-processing to vector elements. LaneDivider: thin, trace,
/// simplify, canonicalize. PedCrossing: outer contour of each filled
/// component, simplified and canonicalized as a ring. RoadBoundary is
/// rejected (it is regressed, never rasterized).
std::vector<MapElement> mask_to_elements(const BevMask& m, Category category,
                                         double score,
                                         const CompactionConfig& cfg);

/// Binary PGM (P5, 0/255) dump for debugging.
void write_pgm(const BevMask& m, const std::filesystem::path& path);

}  // namespace vecmap
