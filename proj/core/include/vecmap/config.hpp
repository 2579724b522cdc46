#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "vecmap/geom.hpp"

namespace vecmap {

/// Flat key-value configuration loaded from a TOML (subset: sections,
/// scalars, number arrays, comments) or JSON file. Section membership is
/// encoded as "section.key".
class ConfigMap {
 public:
  using Value = std::variant<bool, double, std::string, std::vector<double>>;

  ConfigMap() = default;

  static ConfigMap load(const std::filesystem::path& path);
  static ConfigMap from_toml(const std::string& text);
  static ConfigMap from_json(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  const std::map<std::string, Value>& values() const { return values_; }

 private:
  std::map<std::string, Value> values_;
};

}  // namespace vecmap
