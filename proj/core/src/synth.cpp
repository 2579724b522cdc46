#include "vecmap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vecmap/compact.hpp"
#include "vecmap/rng.hpp"

namespace vecmap {

void SynthConfig::validate() const {
  if (n_frames < 1) throw std::invalid_argument("SynthConfig: n_frames >= 1");
  if (lanes_per_frame < 0) {
    throw std::invalid_argument("SynthConfig: lanes_per_frame >= 0");
  }
  if (!(gt_spacing > 0.0) || !(ego_step > 0.0) || !(lane_width > 0.0)) {
    throw std::invalid_argument("SynthConfig: spacings must be > 0");
  }
  if (!(curvature_min >= 0.0) || !(curvature_max >= curvature_min)) {
    throw std::invalid_argument("SynthConfig: bad curvature range");
  }
  if (crossing_density < 0.0) {
    throw std::invalid_argument("SynthConfig: crossing_density >= 0");
  }
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(noise.dropout_prob)) {
    throw std::invalid_argument("SynthConfig: dropout_prob in [0, 1]");
  }
  if (noise.point_jitter_sigma < 0.0 || noise.false_positive_rate < 0.0) {
    throw std::invalid_argument("SynthConfig: noise magnitudes >= 0");
  }
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Road centerline: two gentle sine modes along the world Y axis.
struct Road {
  double a1, w1, p1;
  double a2, w2, p2;

  double x(double s) const {
    return a1 * std::sin(w1 * s + p1) + a2 * std::sin(w2 * s + p2);
  }
  double dx(double s) const {
    return a1 * w1 * std::cos(w1 * s + p1) + a2 * w2 * std::cos(w2 * s + p2);
  }
  Point2 at(double s, double offset) const {
    // Right-pointing unit normal of the tangent (dx, 1).
    const double d = dx(s);
    const double inv = 1.0 / std::hypot(d, 1.0);
    return Point2(x(s) + offset * inv, s - offset * d * inv);
  }
};

Road make_road(Rng& rng, const SynthConfig& cfg) {
  Road r;
  const double k1 = rng.uniform(cfg.curvature_min, cfg.curvature_max);
  const double k2 = rng.uniform(cfg.curvature_min, cfg.curvature_max) * 0.5;
  r.w1 = 2.0 * 3.14159265358979323846 / rng.uniform(90.0, 160.0);
  r.w2 = 2.0 * 3.14159265358979323846 / rng.uniform(40.0, 70.0);
  r.a1 = k1 / (r.w1 * r.w1);
  r.a2 = k2 / (r.w2 * r.w2);
  r.p1 = rng.uniform(0.0, 6.28318530717958647692);
  r.p2 = rng.uniform(0.0, 6.28318530717958647692);
  return r;
}

struct WorldElement {
  Category category;
  std::vector<Point2> points;
  bool closed;
};

std::vector<Point2> offset_chain(const Road& road, double s_lo, double s_hi,
                                 double offset, double step) {
  std::vector<Point2> pts;
  int k = 0;
  for (double s = s_lo; s < s_hi; s = s_lo + (++k) * step) {
    pts.push_back(road.at(s, offset));
  }
  pts.push_back(road.at(s_hi, offset));
  return pts;
}

// Evenly resampled copy at ~spacing; rings resample the expanded chain.
MapElement even_gt_element(const MapElement& e, double spacing) {
  if (!e.closed) {
    const double len = polyline_length(e.polyline);
    const int n = std::max(2, static_cast<int>(std::lround(len / spacing)) + 1);
    return MapElement(e.category, resample_polyline(e.polyline, n),
                      std::nullopt, false);
  }
  const std::vector<Point2> expanded = e.chain();
  const double perimeter = chain_length(expanded);
  const int n =
      std::max(4, static_cast<int>(std::lround(perimeter / spacing)) + 1);
  std::vector<Point2> ring = resample_points(expanded, n);
  ring.pop_back();  // implicit closure
  return MapElement(e.category, Polyline(std::move(ring)), std::nullopt, true);
}

std::string frame_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d", i);
  return buf;
}

}  // namespace

SynthResult generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const Road road = make_road(rng, cfg);

  const double half_width = cfg.lane_width * (cfg.lanes_per_frame + 1) / 2.0;
  const double margin = cfg.window.height() / 2.0 + 10.0;
  const double s_lo = -margin;
  const double s_hi = (cfg.n_frames - 1) * cfg.ego_step + margin;

  std::vector<WorldElement> world;
  world.push_back({Category::RoadBoundary,
                   offset_chain(road, s_lo, s_hi, -half_width, 0.5), false});
  world.push_back({Category::RoadBoundary,
                   offset_chain(road, s_lo, s_hi, half_width, 0.5), false});
  for (int k = 1; k <= cfg.lanes_per_frame; ++k) {
    world.push_back(
        {Category::LaneDivider,
         offset_chain(road, s_lo, s_hi, -half_width + cfg.lane_width * k, 0.5),
         false});
  }
  if (cfg.crossing_density > 0.0) {
    double s = s_lo;
    while (true) {
      const double gap =
          std::max(8.0, -std::log(1.0 - rng.uniform()) / cfg.crossing_density);
      s += gap;
      if (s + 4.0 > s_hi) break;
      const double d = half_width + 0.5;
      world.push_back({Category::PedCrossing,
                       {road.at(s, -d), road.at(s, d), road.at(s + 4.0, d),
                        road.at(s + 4.0, -d)},
                       true});
    }
  }

  SynthResult result;
  for (int i = 0; i < cfg.n_frames; ++i) {
    const double s_ego = i * cfg.ego_step;
    const double d = road.dx(s_ego);
    const double inv = 1.0 / std::hypot(d, 1.0);
    // Ego +Y must map onto the world tangent (d, 1)/|.|.
    const Pose2 pose(road.x(s_ego), s_ego, std::atan2(-d * inv, inv));

    MapFrame gt_frame;
    gt_frame.frame_id = frame_name(i);
    gt_frame.timestamp_us = static_cast<std::int64_t>(i) * 500000;
    gt_frame.pose = pose;

    for (const WorldElement& we : world) {
      const std::vector<Point2> ego_pts =
          transform_points(Pose2(), pose, we.points);
      const MapElement in_ego(we.category, Polyline(ego_pts), std::nullopt,
                              we.closed);
      for (const MapElement& piece :
           clip_to_window(in_ego, cfg.window, kDefaultMinClipLength)) {
        gt_frame.elements.push_back(
            canonicalize_direction(even_gt_element(piece, cfg.gt_spacing)));
      }
    }
    std::sort(gt_frame.elements.begin(), gt_frame.elements.end(),
              element_order_less);

    MapFrame pred_frame;
    pred_frame.frame_id = gt_frame.frame_id;
    pred_frame.timestamp_us = gt_frame.timestamp_us;
    pred_frame.pose = gt_frame.pose;

    for (const MapElement& e : gt_frame.elements) {
      if (rng.bernoulli(cfg.noise.dropout_prob)) continue;
      std::vector<Point2> pts = e.polyline.points();
      for (Point2& p : pts) {
        p = Point2(p.x + rng.normal(0.0, cfg.noise.point_jitter_sigma),
                   p.y + rng.normal(0.0, cfg.noise.point_jitter_sigma));
      }
      const double score =
          clamp01(rng.normal(cfg.noise.tp_score_mean, cfg.noise.tp_score_sigma));
      const MapElement jittered(e.category, Polyline(std::move(pts)), score,
                                e.closed);
      for (MapElement& piece :
           clip_to_window(jittered, cfg.window, kDefaultMinClipLength)) {
        pred_frame.elements.push_back(std::move(piece));
      }
    }

    const int n_fp = rng.poisson(cfg.noise.false_positive_rate);
    for (int f = 0; f < n_fp; ++f) {
      const Category cat = all_categories()[rng.uniform_int(0, 2)];
      const double score =
          clamp01(rng.normal(cfg.noise.fp_score_mean, cfg.noise.fp_score_sigma));
      std::vector<Point2> pts;
      bool closed = false;
      if (cat == Category::PedCrossing) {
        const double cx = rng.uniform(cfg.window.x_min + 4.0, cfg.window.x_max - 4.0);
        const double cy = rng.uniform(cfg.window.y_min + 4.0, cfg.window.y_max - 4.0);
        const double hx = rng.uniform(1.5, 3.0);
        const double hy = rng.uniform(1.0, 2.0);
        pts = {Point2(cx - hx, cy - hy), Point2(cx + hx, cy - hy),
               Point2(cx + hx, cy + hy), Point2(cx - hx, cy + hy)};
        closed = true;
      } else {
        const double x0 = rng.uniform(cfg.window.x_min + 2.0, cfg.window.x_max - 2.0);
        const double y0 = rng.uniform(cfg.window.y_min + 2.0, cfg.window.y_max - 2.0);
        const double heading = rng.uniform(0.0, 6.28318530717958647692);
        const double len = rng.uniform(3.0, 10.0);
        const double bend = rng.uniform(-0.3, 0.3);
        for (int k = 0; k < 4; ++k) {
          const double t = len * k / 3.0;
          pts.push_back(Point2(x0 + t * std::cos(heading) - bend * t * t / len *
                                        std::sin(heading),
                               y0 + t * std::sin(heading) + bend * t * t / len *
                                        std::cos(heading)));
        }
      }
      const MapElement fp(cat, Polyline(std::move(pts)), score, closed);
      for (MapElement& piece :
           clip_to_window(fp, cfg.window, kDefaultMinClipLength)) {
        pred_frame.elements.push_back(std::move(piece));
      }
    }

    std::sort(pred_frame.elements.begin(), pred_frame.elements.end(),
              element_order_less);

    result.gt.push_back(std::move(gt_frame));
    result.preds.push_back(std::move(pred_frame));
  }
  return result;
}

}  // namespace vecmap
