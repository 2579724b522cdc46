#include "vecmap/raster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <tuple>

namespace vecmap {

namespace {

constexpr int kNeighborOffsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                        {0, 1},   {1, -1}, {1, 0},  {1, 1}};

}  // namespace

GridSpec::Cell GridSpec::to_cell(const Point2& p) const {
  int row = static_cast<int>(std::floor((window.y_max - p.y) / res_y()));
  int col = static_cast<int>(std::floor((p.x - window.x_min) / res_x()));
  row = std::clamp(row, 0, rows - 1);
  col = std::clamp(col, 0, cols - 1);
  return Cell{row, col};
}

Point2 GridSpec::cell_center(int row, int col) const {
  return Point2(window.x_min + (col + 0.5) * res_x(),
                window.y_max - (row + 0.5) * res_y());
}

void GridSpec::validate() const {
  if (rows <= 0 || cols <= 0) {
    throw std::invalid_argument("GridSpec: rows and cols must be positive");
  }
}

BevMask::BevMask(const GridSpec& grid)
    : grid_(grid),
      bits_(static_cast<std::size_t>(grid.rows) * grid.cols, 0) {
  grid.validate();
}

std::size_t BevMask::count() const {
  std::size_t n = 0;
  for (std::uint8_t b : bits_) n += b;
  return n;
}

namespace {

void draw_line(BevMask& m, GridSpec::Cell a, GridSpec::Cell b) {
  int col = a.col;
  int row = a.row;
  const int dc = std::abs(b.col - a.col);
  const int sc = a.col < b.col ? 1 : -1;
  const int dr = -std::abs(b.row - a.row);
  const int sr = a.row < b.row ? 1 : -1;
  int err = dc + dr;
  while (true) {
    m.set(row, col);
    if (row == b.row && col == b.col) break;
    const int e2 = 2 * err;
    if (e2 >= dr) {
      err += dr;
      col += sc;
    }
    if (e2 <= dc) {
      err += dc;
      row += sr;
    }
  }
}

// Grows the footprint by (thickness - 1) cells total, split around each set
// pixel, so a one-cell line becomes exactly `thickness` cells wide.
BevMask dilate_square(const BevMask& m, int thickness) {
  const int lo = -((thickness - 1) / 2);
  const int hi = thickness / 2;
  BevMask out(m.grid());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (!m.at(r, c)) continue;
      for (int dr = lo; dr <= hi; ++dr) {
        for (int dc = lo; dc <= hi; ++dc) {
          if (m.in_bounds(r + dr, c + dc)) out.set(r + dr, c + dc);
        }
      }
    }
  }
  return out;
}

// Even-odd scanline fill over cell centers.
void fill_ring_interior(BevMask& m, const std::vector<Point2>& ring) {
  const GridSpec& g = m.grid();
  std::vector<double> xs;
  for (int r = 0; r < g.rows; ++r) {
    const double y = g.cell_center(r, 0).y;
    xs.clear();
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Point2& a = ring[i];
      const Point2& b = ring[(i + 1) % ring.size()];
      if ((a.y <= y && b.y > y) || (b.y <= y && a.y > y)) {
        xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Cells whose center lies in [xs[k], xs[k+1]].
      const int c_lo = static_cast<int>(
          std::ceil((xs[k] - g.window.x_min) / g.res_x() - 0.5));
      const int c_hi = static_cast<int>(
          std::floor((xs[k + 1] - g.window.x_min) / g.res_x() - 0.5));
      for (int c = std::max(c_lo, 0); c <= std::min(c_hi, g.cols - 1); ++c) {
        m.set(r, c);
      }
    }
  }
}

}  // namespace

BevMask rasterize(const MapElement& e, const GridSpec& g, int thickness_cells,
                  bool filled) {
  g.validate();
  if (thickness_cells < 1) {
    throw std::invalid_argument("rasterize: thickness must be >= 1");
  }
  const std::vector<Point2> chain = e.chain();
  BevMask m(g);
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    double t0 = 0.0;
    double t1 = 1.0;
    if (!clip_segment_to_window(chain[i], chain[i + 1], g.window, t0, t1)) {
      continue;
    }
    const Point2& p = chain[i];
    const Point2& q = chain[i + 1];
    const Point2 a(p.x + t0 * (q.x - p.x), p.y + t0 * (q.y - p.y));
    const Point2 b(p.x + t1 * (q.x - p.x), p.y + t1 * (q.y - p.y));
    draw_line(m, g.to_cell(a), g.to_cell(b));
  }
  if (filled && e.closed) {
    fill_ring_interior(m, e.polyline.points());
  }
  if (m.empty()) {
    throw std::invalid_argument("rasterize: element lies outside the window");
  }
  if (thickness_cells > 1) {
    m = dilate_square(m, thickness_cells);
  }
  return m;
}

namespace {

// Zhang-Suen neighborhood, clockwise from north: P2..P9.
void neighborhood(const BevMask& m, int r, int c, int p[8]) {
  auto v = [&](int rr, int cc) {
    return m.in_bounds(rr, cc) && m.at(rr, cc) ? 1 : 0;
  };
  p[0] = v(r - 1, c);      // P2 N
  p[1] = v(r - 1, c + 1);  // P3 NE
  p[2] = v(r, c + 1);      // P4 E
  p[3] = v(r + 1, c + 1);  // P5 SE
  p[4] = v(r + 1, c);      // P6 S
  p[5] = v(r + 1, c - 1);  // P7 SW
  p[6] = v(r, c - 1);      // P8 W
  p[7] = v(r - 1, c - 1);  // P9 NW
}

bool thin_subpass(BevMask& m, int pass) {
  std::vector<GridSpec::Cell> deletions;
  int p[8];
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (!m.at(r, c)) continue;
      neighborhood(m, r, c, p);
      int b = 0;
      for (int k = 0; k < 8; ++k) b += p[k];
      if (b < 2 || b > 6) continue;
      int a = 0;
      for (int k = 0; k < 8; ++k) {
        if (p[k] == 0 && p[(k + 1) % 8] == 1) ++a;
      }
      if (a != 1) continue;
      // pass 0: P2*P4*P6 == 0 and P4*P6*P8 == 0
      // pass 1: P2*P4*P8 == 0 and P2*P6*P8 == 0
      const bool cond = pass == 0
                            ? (p[0] * p[2] * p[4] == 0 && p[2] * p[4] * p[6] == 0)
                            : (p[0] * p[2] * p[6] == 0 && p[0] * p[4] * p[6] == 0);
      if (cond) deletions.push_back({r, c});
    }
  }
  for (const auto& cell : deletions) m.set(cell.row, cell.col, false);
  return !deletions.empty();
}

}  // namespace

BevMask thin(const BevMask& m) {
  BevMask out = m;
  while (true) {
    const bool c1 = thin_subpass(out, 0);
    const bool c2 = thin_subpass(out, 1);
    if (!c1 && !c2) break;
  }
  return out;
}

namespace {

struct PixelGraph {
  std::vector<GridSpec::Cell> pixels;            // sorted by (row, col)
  std::vector<std::vector<std::size_t>> adj;     // 8-neighborhood indices
  std::vector<std::size_t> endpoints;            // degree-1 pixels
};

// 8-connected components of the mask, in row-major discovery order; pixels
// within a component are sorted by (row, col).
std::vector<std::vector<GridSpec::Cell>> connected_components(
    const BevMask& m) {
  std::vector<char> seen(static_cast<std::size_t>(m.rows()) * m.cols(), 0);
  auto idx = [&](int r, int c) {
    return static_cast<std::size_t>(r) * m.cols() + c;
  };
  std::vector<std::vector<GridSpec::Cell>> components;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (!m.at(r, c) || seen[idx(r, c)]) continue;
      std::vector<GridSpec::Cell> comp;
      std::queue<GridSpec::Cell> queue;
      queue.push({r, c});
      seen[idx(r, c)] = 1;
      while (!queue.empty()) {
        const GridSpec::Cell cur = queue.front();
        queue.pop();
        comp.push_back(cur);
        for (const auto& d : kNeighborOffsets) {
          const int rr = cur.row + d[0];
          const int cc = cur.col + d[1];
          if (m.in_bounds(rr, cc) && m.at(rr, cc) && !seen[idx(rr, cc)]) {
            seen[idx(rr, cc)] = 1;
            queue.push({rr, cc});
          }
        }
      }
      std::sort(comp.begin(), comp.end(),
                [](const GridSpec::Cell& a, const GridSpec::Cell& b) {
                  return std::tie(a.row, a.col) < std::tie(b.row, b.col);
                });
      components.push_back(std::move(comp));
    }
  }
  return components;
}

PixelGraph build_graph(const std::vector<GridSpec::Cell>& comp) {
  PixelGraph g;
  g.pixels = comp;
  std::map<std::pair<int, int>, std::size_t> index;
  for (std::size_t i = 0; i < comp.size(); ++i) {
    index[{comp[i].row, comp[i].col}] = i;
  }
  g.adj.resize(comp.size());
  for (std::size_t i = 0; i < comp.size(); ++i) {
    for (const auto& d : kNeighborOffsets) {
      const auto it = index.find({comp[i].row + d[0], comp[i].col + d[1]});
      if (it != index.end()) g.adj[i].push_back(it->second);
    }
  }
  for (std::size_t i = 0; i < comp.size(); ++i) {
    if (g.adj[i].size() == 1) g.endpoints.push_back(i);
  }
  return g;
}

double edge_weight(const GridSpec::Cell& a, const GridSpec::Cell& b) {
  return (a.row != b.row && a.col != b.col) ? std::numbers::sqrt2 : 1.0;
}

// Shortest-path distances and parents from `start` over the pixel graph.
void dijkstra(const PixelGraph& g, std::size_t start,
              std::vector<double>& dist, std::vector<std::size_t>& parent) {
  const std::size_t n = g.pixels.size();
  dist.assign(n, std::numeric_limits<double>::infinity());
  parent.assign(n, n);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[start] = 0.0;
  heap.emplace(0.0, start);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (std::size_t v : g.adj[u]) {
      const double nd = d + edge_weight(g.pixels[u], g.pixels[v]);
      if (nd < dist[v]) {
        dist[v] = nd;
        parent[v] = u;
        heap.emplace(nd, v);
      }
    }
  }
}

std::vector<GridSpec::Cell> path_between(const PixelGraph& g,
                                         std::size_t start, std::size_t goal) {
  std::vector<double> dist;
  std::vector<std::size_t> parent;
  dijkstra(g, start, dist, parent);
  std::vector<GridSpec::Cell> path;
  std::size_t cur = goal;
  while (cur != g.pixels.size()) {
    path.push_back(g.pixels[cur]);
    if (cur == start) break;
    cur = parent[cur];
  }
  std::reverse(path.begin(), path.end());
  return path;
}

// Longest endpoint-to-endpoint path; with a single endpoint the farthest
// pixel stands in for the missing one.
std::vector<GridSpec::Cell> longest_endpoint_path(const PixelGraph& g) {
  std::vector<double> dist;
  std::vector<std::size_t> parent;
  double best = -1.0;
  std::size_t best_start = 0;
  std::size_t best_goal = 0;
  for (std::size_t s : g.endpoints) {
    dijkstra(g, s, dist, parent);
    if (g.endpoints.size() >= 2) {
      for (std::size_t t : g.endpoints) {
        if (t == s || !std::isfinite(dist[t])) continue;
        if (dist[t] > best) {
          best = dist[t];
          best_start = s;
          best_goal = t;
        }
      }
    } else {
      for (std::size_t t = 0; t < g.pixels.size(); ++t) {
        if (std::isfinite(dist[t]) && dist[t] > best) {
          best = dist[t];
          best_start = s;
          best_goal = t;
        }
      }
    }
  }
  if (best < 0.0) return {};
  return path_between(g, best_start, best_goal);
}

// Walks a closed degree-2 cycle starting from its front-left-most pixel.
std::vector<GridSpec::Cell> walk_ring(const PixelGraph& g) {
  std::vector<char> visited(g.pixels.size(), 0);
  std::size_t start = 0;  // pixels are (row, col)-sorted: index 0 is canonical
  std::vector<std::size_t> order{start};
  visited[start] = 1;
  std::size_t prev = start;
  std::size_t cur = g.adj[start].empty() ? start : g.adj[start].front();
  while (cur != start && !visited[cur]) {
    visited[cur] = 1;
    order.push_back(cur);
    std::size_t next = g.pixels.size();
    for (std::size_t v : g.adj[cur]) {
      if (v == prev) continue;
      if (v == start || !visited[v]) {
        next = v;
        break;
      }
    }
    if (next == g.pixels.size()) break;
    prev = cur;
    cur = next;
  }
  std::vector<GridSpec::Cell> ring;
  ring.reserve(order.size());
  for (std::size_t i : order) ring.push_back(g.pixels[i]);
  return ring;
}

std::vector<Point2> cells_to_points(const GridSpec& g,
                                    const std::vector<GridSpec::Cell>& cells) {
  std::vector<Point2> pts;
  pts.reserve(cells.size());
  for (const auto& cell : cells) pts.push_back(g.cell_center(cell.row, cell.col));
  return pts;
}

}  // namespace

std::vector<TracedCurve> trace_skeleton(const BevMask& m) {
  std::vector<TracedCurve> out;
  for (const auto& comp : connected_components(m)) {
    if (comp.size() < 2) continue;
    const PixelGraph graph = build_graph(comp);
    if (graph.endpoints.empty()) {
      const std::vector<GridSpec::Cell> ring = walk_ring(graph);
      if (ring.size() < 3) continue;
      out.push_back(
          TracedCurve{Polyline(cells_to_points(m.grid(), ring)), true});
    } else {
      const std::vector<GridSpec::Cell> path = longest_endpoint_path(graph);
      if (path.size() < 2) continue;
      out.push_back(
          TracedCurve{Polyline(cells_to_points(m.grid(), path)), false});
    }
  }
  return out;
}

namespace {

// Moore-neighbor boundary tracing with Jacob's stopping criterion. Directions
// are clockwise in image coordinates starting west.
std::vector<GridSpec::Cell> outer_contour(const BevMask& m,
                                          const GridSpec::Cell& start) {
  static constexpr int kDir[8][2] = {{0, -1}, {-1, -1}, {-1, 0}, {-1, 1},
                                     {0, 1},  {1, 1},   {1, 0},  {1, -1}};
  auto is_set = [&](int r, int c) { return m.in_bounds(r, c) && m.at(r, c); };

  std::vector<GridSpec::Cell> contour{start};
  // The cell west of the scan-order start is always background.
  int back_dir = 0;
  GridSpec::Cell cur = start;
  const int initial_back_dir = back_dir;
  const std::size_t cap = 4 * static_cast<std::size_t>(m.rows()) * m.cols();
  for (std::size_t iter = 0; iter < cap; ++iter) {
    int found = -1;
    for (int k = 1; k <= 8; ++k) {
      const int dir = (back_dir + k) % 8;
      const int rr = cur.row + kDir[dir][0];
      const int cc = cur.col + kDir[dir][1];
      if (is_set(rr, cc)) {
        found = dir;
        break;
      }
    }
    if (found < 0) break;  // isolated pixel
    const GridSpec::Cell next{cur.row + kDir[found][0],
                              cur.col + kDir[found][1]};
    // New backtrack: the background cell scanned just before the hit, seen
    // from the next pixel.
    const int prev_dir = (found + 7) % 8;
    const GridSpec::Cell back{cur.row + kDir[prev_dir][0],
                              cur.col + kDir[prev_dir][1]};
    cur = next;
    back_dir = 0;
    for (int d = 0; d < 8; ++d) {
      if (cur.row + kDir[d][0] == back.row && cur.col + kDir[d][1] == back.col) {
        back_dir = d;
        break;
      }
    }
    if (cur == start && back_dir == initial_back_dir) break;
    contour.push_back(cur);
  }
  return contour;
}

}  // namespace

std::vector<MapElement> mask_to_elements(const BevMask& m, Category category,
                                         double score,
                                         const CompactionConfig& cfg) {
  if (category == Category::RoadBoundary) {
    throw std::invalid_argument(
        "mask_to_elements: road boundaries are regressed, not rasterized");
  }
  cfg.validate();
  std::vector<MapElement> out;

  if (category == Category::LaneDivider) {
    const BevMask skeleton = thin(m);
    for (const TracedCurve& curve : trace_skeleton(skeleton)) {
      out.push_back(compact_element(
          MapElement(category, curve.polyline, score, curve.closed), cfg));
    }
    return out;
  }

  for (const auto& comp : connected_components(m)) {
    std::vector<GridSpec::Cell> contour = outer_contour(m, comp.front());
    std::vector<Point2> ring;
    for (const auto& cell : contour) {
      const Point2 p = m.grid().cell_center(cell.row, cell.col);
      if (ring.empty() || !(ring.back() == p)) ring.push_back(p);
    }
    while (ring.size() > 1 && ring.back() == ring.front()) ring.pop_back();
    if (ring.size() < 3) continue;
    out.push_back(compact_element(
        MapElement(category, Polyline(std::move(ring)), score, true), cfg));
  }
  return out;
}

void write_pgm(const BevMask& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("write_pgm: cannot open '" + path.string() + "'");
  }
  out << "P5\n" << m.cols() << " " << m.rows() << "\n255\n";
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      out.put(m.at(r, c) ? static_cast<char>(255) : static_cast<char>(0));
    }
  }
  if (!out) {
    throw ValidationError("write_pgm: write failed for '" + path.string() +
                          "'");
  }
}

}  // namespace vecmap
