#include "vecmap/sequence_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace vecmap {

namespace {

using nlohmann::json;

std::string field_path(const std::string& base, std::size_t index) {
  return base + "[" + std::to_string(index) + "]";
}

double require_finite_number(const json& j, const std::string& path) {
  if (!j.is_number()) {
    throw ValidationError(path + ": expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v)) {
    throw ValidationError(path + ": non-finite value");
  }
  return v;
}

const json& require_field(const json& j, const char* key,
                          const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError(path + ": missing field '" + key + "'");
  }
  return *it;
}

MapElement parse_element(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");

  const json& cat_j = require_field(j, "category", path);
  if (!cat_j.is_string()) {
    throw ValidationError(path + ".category: expected a string");
  }
  const auto category = category_from_string(cat_j.get<std::string>());
  if (!category) {
    throw ValidationError(path + ".category: unknown category '" +
                          cat_j.get<std::string>() + "'");
  }

  const json& closed_j = require_field(j, "closed", path);
  if (!closed_j.is_boolean()) {
    throw ValidationError(path + ".closed: expected a boolean");
  }

  std::optional<double> score;
  if (const auto it = j.find("score"); it != j.end()) {
    score = require_finite_number(*it, path + ".score");
  }

  const json& pts_j = require_field(j, "points", path);
  if (!pts_j.is_array() || pts_j.size() < 2) {
    throw ValidationError(path + ".points: expected an array of >= 2 points");
  }
  std::vector<Point2> pts;
  pts.reserve(pts_j.size());
  for (std::size_t i = 0; i < pts_j.size(); ++i) {
    const json& p = pts_j[i];
    const std::string p_path = field_path(path + ".points", i);
    if (!p.is_array() || p.size() != 2) {
      throw ValidationError(p_path + ": expected [x, y]");
    }
    pts.emplace_back(require_finite_number(p[0], p_path + "[0]"),
                     require_finite_number(p[1], p_path + "[1]"));
  }

  try {
    return MapElement(*category, Polyline(std::move(pts)), score,
                      closed_j.get<bool>());
  } catch (const std::invalid_argument& err) {
    throw ValidationError(path + ": " + err.what());
  }
}

MapFrame parse_frame(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path + ": expected an object");
  MapFrame frame;

  const json& id_j = require_field(j, "frame_id", path);
  if (!id_j.is_string()) {
    throw ValidationError(path + ".frame_id: expected a string");
  }
  frame.frame_id = id_j.get<std::string>();

  const json& ts_j = require_field(j, "timestamp_us", path);
  if (!ts_j.is_number_integer()) {
    throw ValidationError(path + ".timestamp_us: expected an integer");
  }
  frame.timestamp_us = ts_j.get<std::int64_t>();

  const json& pose_j = require_field(j, "pose", path);
  if (!pose_j.is_object()) {
    throw ValidationError(path + ".pose: expected an object");
  }
  try {
    frame.pose =
        Pose2(require_finite_number(require_field(pose_j, "tx", path + ".pose"),
                                    path + ".pose.tx"),
              require_finite_number(require_field(pose_j, "ty", path + ".pose"),
                                    path + ".pose.ty"),
              require_finite_number(require_field(pose_j, "yaw", path + ".pose"),
                                    path + ".pose.yaw"));
  } catch (const std::invalid_argument& err) {
    throw ValidationError(path + ".pose: " + err.what());
  }

  const json& elems_j = require_field(j, "elements", path);
  if (!elems_j.is_array()) {
    throw ValidationError(path + ".elements: expected an array");
  }
  for (std::size_t i = 0; i < elems_j.size(); ++i) {
    frame.elements.push_back(
        parse_element(elems_j[i], field_path(path + ".elements", i)));
  }
  return frame;
}

json window_to_json(const PerceptionWindow& w) {
  return json{{"x_min", w.x_min},
              {"x_max", w.x_max},
              {"y_min", w.y_min},
              {"y_max", w.y_max}};
}

json element_to_json(const MapElement& e) {
  json pts = json::array();
  for (const Point2& p : e.polyline.points()) {
    pts.push_back(json::array({p.x, p.y}));
  }
  json out{{"category", std::string(to_string(e.category))},
           {"closed", e.closed},
           {"points", std::move(pts)}};
  if (e.score) out["score"] = *e.score;
  return out;
}

std::string threshold_key(double t) { return json(t).dump(); }

}  // namespace

Sequence read_sequence(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open '" + path.string() + "'");
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& err) {
    throw ValidationError(path.string() + ": " + err.what());
  }
  if (!j.is_object()) {
    throw ValidationError(path.string() + ": expected a top-level object");
  }

  const json& ver = require_field(j, "schema_version", "$");
  if (!ver.is_string() ||
      ver.get<std::string>() != kSequenceSchemaVersion) {
    throw ValidationError("$.schema_version: unrecognized version (expected '" +
                          std::string(kSequenceSchemaVersion) + "')");
  }

  Sequence seq;
  const json& win = require_field(j, "window", "$");
  try {
    seq.window = PerceptionWindow(
        require_finite_number(require_field(win, "x_min", "$.window"),
                              "$.window.x_min"),
        require_finite_number(require_field(win, "x_max", "$.window"),
                              "$.window.x_max"),
        require_finite_number(require_field(win, "y_min", "$.window"),
                              "$.window.y_min"),
        require_finite_number(require_field(win, "y_max", "$.window"),
                              "$.window.y_max"));
  } catch (const std::invalid_argument& err) {
    throw ValidationError(std::string("$.window: ") + err.what());
  }

  const json& frames = require_field(j, "frames", "$");
  if (!frames.is_array()) {
    throw ValidationError("$.frames: expected an array");
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    seq.frames.push_back(parse_frame(frames[i], field_path("$.frames", i)));
  }

  std::vector<std::string> ids;
  for (const MapFrame& f : seq.frames) ids.push_back(f.frame_id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw ValidationError("$.frames: duplicate frame_id");
  }
  return seq;
}

std::string sequence_to_json(const Sequence& seq) {
  json frames = json::array();
  for (const MapFrame& f : seq.frames) {
    std::vector<MapElement> sorted = f.elements;
    std::stable_sort(sorted.begin(), sorted.end(), element_order_less);
    json elems = json::array();
    for (const MapElement& e : sorted) elems.push_back(element_to_json(e));
    frames.push_back(json{{"frame_id", f.frame_id},
                          {"timestamp_us", f.timestamp_us},
                          {"pose",
                           json{{"tx", f.pose.tx},
                                {"ty", f.pose.ty},
                                {"yaw", f.pose.yaw}}},
                          {"elements", std::move(elems)}});
  }
  const json doc{{"schema_version", std::string(kSequenceSchemaVersion)},
                 {"window", window_to_json(seq.window)},
                 {"frames", std::move(frames)}};
  return doc.dump(2) + "\n";
}

void write_sequence(const Sequence& seq, const std::filesystem::path& path) {
  write_text_file(sequence_to_json(seq), path);
}

std::string eval_report_json(const EvalReport& report) {
  json cats = json::object();
  for (const auto& [cat, ce] : report.per_category) {
    json ap = json::object();
    for (const auto& [t, v] : ce.ap_per_threshold) ap[threshold_key(t)] = v;
    cats[std::string(to_string(cat))] =
        json{{"ap_per_threshold", std::move(ap)},
             {"ap_mean", ce.ap_mean},
             {"n_predictions", ce.n_predictions},
             {"n_ground_truth", ce.n_ground_truth}};
  }
  const json doc{{"schema_version", std::string(kReportSchemaVersion)},
                 {"kind", "eval"},
                 {"thresholds", report.thresholds},
                 {"chamfer_samples", report.chamfer_samples},
                 {"categories", std::move(cats)},
                 {"mean_ap", report.mean_ap}};
  return doc.dump(2) + "\n";
}

std::string compaction_report_json(const CompactionReport& report) {
  json cats = json::object();
  for (const auto& [cat, stats] : report.per_category) {
    json ap = json::object();
    for (const auto& [t, v] : stats.ap_at) ap[threshold_key(t)] = v;
    cats[std::string(to_string(cat))] =
        json{{"instance_count", stats.instance_count},
             {"raw_point_count", stats.raw_point_count},
             {"compacted_point_count", stats.compacted_point_count},
             {"reduction_percent", stats.reduction_percent},
             {"ap_per_threshold", std::move(ap)}};
  }
  const json doc{{"schema_version", std::string(kReportSchemaVersion)},
                 {"kind", "compaction"},
                 {"thresholds", report.thresholds},
                 {"chamfer_samples", report.chamfer_samples},
                 {"categories", std::move(cats)}};
  return doc.dump(2) + "\n";
}

void write_text_file(const std::string& content,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("cannot open '" + path.string() + "' for writing");
  }
  out << content;
  if (!out) {
    throw ValidationError("write failed for '" + path.string() + "'");
  }
}

}  // namespace vecmap
