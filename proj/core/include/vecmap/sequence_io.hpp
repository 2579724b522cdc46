#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vecmap/compact.hpp"
#include "vecmap/geom.hpp"
#include "vecmap/metrics.hpp"

namespace vecmap {

inline constexpr std::string_view kSequenceSchemaVersion = "vecmap-sequence/1";
inline constexpr std::string_view kReportSchemaVersion = "vecmap-report/1";

/// On-disk unit: a perception window plus an ordered list of frames.
struct Sequence {
  PerceptionWindow window = PerceptionWindow::default_window();
  std::vector<MapFrame> frames;
};

/// Parses and validates a sequence file; schema violations raise
/// ValidationError naming the offending field.
Sequence read_sequence(const std::filesystem::path& path);

/// Canonical serialization: sorted keys, shortest round-trip float text,
/// elements ordered by category then canonical start key. Re-serializing a
/// canonical file is byte-identical.
std::string sequence_to_json(const Sequence& seq);
void write_sequence(const Sequence& seq, const std::filesystem::path& path);

std::string eval_report_json(const EvalReport& report);
std::string compaction_report_json(const CompactionReport& report);

void write_text_file(const std::string& content,
                     const std::filesystem::path& path);

}  // namespace vecmap
