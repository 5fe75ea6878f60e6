#pragma once

// Plain-text run configuration: one "key = value" per line, '#' comments,
// dotted keys for grouping. Parsing is permissive about whitespace and
// strict about everything else; schema validation rejects unknown keys.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "veritor/interval.hpp"

namespace veritor {

struct ConfigError : Error {
  using Error::Error;
};

class Config {
 public:
  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    Config c = from_string(ss.str());
    c.path_ = path;
    return c;
  }

  static Config from_string(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      c.lines_.push_back(line);
      std::string s = line;
      auto hash = s.find('#');
      if (hash != std::string::npos) s.erase(hash);
      s = trim(s);
      if (s.empty()) continue;
      auto eq = s.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) +
                          " has no '=': " + line);
      std::string key = trim(s.substr(0, eq));
      std::string val = trim(s.substr(eq + 1));
      if (key.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          " has an empty key");
      if (c.kv_.count(key))
        throw ConfigError("duplicate config key: " + key);
      c.kv_[key] = val;
    }
    return c;
  }

  const std::string& path() const { return path_; }
  const std::vector<std::string>& raw_lines() const { return lines_; }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end())
      throw ConfigError("missing required config key: " + key);
    return it->second;
  }
  std::string get_string(const std::string& key,
                         const std::string& def) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
  }

  double get_double(const std::string& key) const {
    return parse_double(key, get_string(key));
  }
  double get_double(const std::string& key, double def) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? def : parse_double(key, it->second);
  }

  int get_int(const std::string& key) const {
    double d = get_double(key);
    int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
      throw ConfigError("config key " + key + " must be an integer");
    return i;
  }
  int get_int(const std::string& key, int def) const {
    return has(key) ? get_int(key) : def;
  }

  bool get_bool(const std::string& key, bool def) const {
    if (!has(key)) return def;
    std::string v = get_string(key);
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ConfigError("config key " + key + " is not a boolean: " + v);
  }

  std::vector<double> get_doubles(const std::string& key,
                                  int expected = -1) const {
    std::istringstream ss(get_string(key));
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) {
      if (!tok.empty() && tok.back() == ',') tok.pop_back();
      if (tok.empty()) continue;
      out.push_back(parse_double(key, tok));
    }
    if (expected >= 0 && static_cast<int>(out.size()) != expected)
      throw ConfigError("config key " + key + " needs exactly " +
                        std::to_string(expected) + " numbers, got " +
                        std::to_string(out.size()));
    return out;
  }

  void check_schema(const std::vector<std::string>& allowed,
                    const std::vector<std::string>& required) const {
    for (const auto& [key, val] : kv_) {
      (void)val;
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
        throw ConfigError("unknown config key: " + key);
    }
    for (const auto& key : required)
      if (!has(key))
        throw ConfigError("missing required config key: " + key);
  }

 private:
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  static double parse_double(const std::string& key, const std::string& v) {
    if (v.empty()) throw ConfigError("config key " + key + " has no value");
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
      throw ConfigError("config key " + key + " is not a number: " + v);
    return d;
  }

  std::map<std::string, std::string> kv_;
  std::vector<std::string> lines_;
  std::string path_;
};

}  // namespace veritor
