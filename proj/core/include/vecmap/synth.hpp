#pragma once

#include <cstdint>
#include <vector>

#include "vecmap/geom.hpp"

namespace vecmap {

/// Noise applied to ground truth to fabricate predictions. Scores are drawn
/// so perturbed-true elements rank above false positives in expectation.
struct NoiseModel {
  double point_jitter_sigma = 0.05;  // meters, per coordinate
  double dropout_prob = 0.0;         // per element
  double false_positive_rate = 0.0;  // expected FP elements per frame
  double tp_score_mean = 0.85;
  double tp_score_sigma = 0.08;
  double fp_score_mean = 0.35;
  double fp_score_sigma = 0.12;
};

/// Deterministic synthetic-scene settings; the seed fixes everything.
struct SynthConfig {
  std::uint64_t seed = 1;
  int n_frames = 20;
  int lanes_per_frame = 3;       // lane dividers between the two boundaries
  double curvature_min = 0.001;  // 1/m, road curvature scale
  double curvature_max = 0.004;
  double crossing_density = 0.025;  // crossings per meter of road
  double lane_width = 3.5;          // meters
  double gt_spacing = 0.2;          // even resample spacing of GT chains
  double ego_step = 2.0;            // ego advance per frame, meters
  NoiseModel noise;
  PerceptionWindow window = PerceptionWindow::default_window();

  void validate() const;
};

struct SynthResult {
  std::vector<MapFrame> gt;
  std::vector<MapFrame> preds;
};

/// Smooth boundaries and parallel dividers along +Y with rectangular
/// crossings, emitted per frame in ego coordinates: clipped to the window,
/// evenly resampled, canonicalized, and canonically ordered. Predictions
/// are the GT perturbed per the noise model.
SynthResult generate_synthetic(const SynthConfig& cfg);

}  // namespace vecmap
