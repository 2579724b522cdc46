#include "vecmap/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vecmap {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Strips a trailing comment, honoring double-quoted strings.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

ConfigMap::Value parse_toml_value(const std::string& raw, int line_no) {
  const std::string v = trim(raw);
  if (v.empty()) {
    throw ValidationError("config line " + std::to_string(line_no) +
                          ": empty value");
  }
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": unterminated string");
    }
    return v.substr(1, v.size() - 2);
  }
  if (v.front() == '[') {
    if (v.back() != ']') {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": unterminated array");
    }
    std::vector<double> items;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;
      try {
        std::size_t used = 0;
        const double d = std::stod(t, &used);
        if (used != t.size() || !std::isfinite(d)) throw std::exception();
        items.push_back(d);
      } catch (...) {
        throw ValidationError("config line " + std::to_string(line_no) +
                              ": arrays may hold numbers only");
      }
    }
    return items;
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::exception();
    return d;
  } catch (...) {
    throw ValidationError("config line " + std::to_string(line_no) +
                          ": cannot parse value '" + v + "'");
  }
}

}  // namespace

ConfigMap ConfigMap::from_toml(const std::string& text) {
  ConfigMap cfg;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::string stripped = trim(strip_comment(line));
    if (stripped.empty()) continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']') {
        throw ValidationError("config line " + std::to_string(line_no) +
                              ": malformed section header");
      }
      section = trim(stripped.substr(1, stripped.size() - 2));
      if (section.empty()) {
        throw ValidationError("config line " + std::to_string(line_no) +
                              ": empty section name");
      }
      continue;
    }
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    if (key.empty()) {
      throw ValidationError("config line " + std::to_string(line_no) +
                            ": empty key");
    }
    const std::string full = section.empty() ? key : section + "." + key;
    cfg.values_[full] = parse_toml_value(stripped.substr(eq + 1), line_no);
  }
  return cfg;
}

ConfigMap ConfigMap::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw ValidationError(std::string("config: ") + err.what());
  }
  if (!j.is_object()) {
    throw ValidationError("config: expected a top-level object");
  }

  ConfigMap cfg;
  auto store_scalar = [&](const std::string& key, const nlohmann::json& v) {
    if (v.is_boolean()) {
      cfg.values_[key] = v.get<bool>();
    } else if (v.is_number()) {
      cfg.values_[key] = v.get<double>();
    } else if (v.is_string()) {
      cfg.values_[key] = v.get<std::string>();
    } else if (v.is_array()) {
      std::vector<double> items;
      for (const auto& item : v) {
        if (!item.is_number()) {
          throw ValidationError("config: '" + key +
                                "': arrays may hold numbers only");
        }
        items.push_back(item.get<double>());
      }
      cfg.values_[key] = std::move(items);
    } else {
      throw ValidationError("config: '" + key + "': unsupported value type");
    }
  };

  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      for (const auto& [sub, v] : value.items()) {
        if (v.is_object()) {
          throw ValidationError("config: '" + key + "." + sub +
                                "': nesting deeper than one section");
        }
        store_scalar(key + "." + sub, v);
      }
    } else {
      store_scalar(key, value);
    }
  }
  return cfg;
}

ConfigMap ConfigMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open config '" + path.string() + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string ext = path.extension().string();
  if (ext == ".json") return from_json(buf.str());
  if (ext == ".toml") return from_toml(buf.str());
  throw ValidationError("config '" + path.string() +
                        "': expected a .toml or .json file");
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const double* v = std::get_if<double>(&it->second)) return *v;
  throw ValidationError("config: '" + key + "' must be a number");
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const double* v = std::get_if<double>(&it->second)) {
    if (*v != std::floor(*v)) {
      throw ValidationError("config: '" + key + "' must be an integer");
    }
    return static_cast<int>(*v);
  }
  throw ValidationError("config: '" + key + "' must be an integer");
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const bool* v = std::get_if<bool>(&it->second)) return *v;
  throw ValidationError("config: '" + key + "' must be a boolean");
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const std::string* v = std::get_if<std::string>(&it->second)) return *v;
  throw ValidationError("config: '" + key + "' must be a string");
}

std::vector<double> ConfigMap::get_double_list(
    const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
  throw ValidationError("config: '" + key + "' must be an array of numbers");
}

}  // namespace vecmap
