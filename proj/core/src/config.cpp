#include "fitact/config.hpp"

#include <fstream>
#include <sstream>

#include "fitact/errors.hpp"

namespace fitact {

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + t + "'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (!cfg.kv_.emplace(key, value).second) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  const std::int64_t version = cfg.integer_or("version", -1);
  if (version != 1) {
    throw ConfigError(origin + ": missing or unsupported config version (need 'version = 1')");
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

std::string Config::str(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError(origin_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string Config::str_or(const std::string& key, const std::string& fallback) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::real(const std::string& key) const {
  const std::string v = str(key);
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": key '" + key + "' is not a number: '" + v + "'");
  }
}

double Config::real_or(const std::string& key, double fallback) const {
  return has(key) ? real(key) : fallback;
}

std::int64_t Config::integer(const std::string& key) const {
  const std::string v = str(key);
  try {
    std::size_t used = 0;
    const std::int64_t out = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError(origin_ + ": key '" + key + "' is not an integer: '" + v + "'");
  }
}

std::int64_t Config::integer_or(const std::string& key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool Config::flag_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = str(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(origin_ + ": key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<std::string> Config::strings(const std::string& key) const {
  const std::string v = str(key);
  std::vector<std::string> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  if (out.empty()) throw ConfigError(origin_ + ": key '" + key + "' has an empty list");
  return out;
}

std::vector<double> Config::reals(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& s : strings(key)) {
    try {
      out.push_back(std::stod(s));
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ": key '" + key + "' has a non-numeric entry '" + s + "'");
    }
  }
  return out;
}

}  // namespace fitact
