#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fitact {

/// Versioned `key = value` config files: blank lines and `#` comments are
/// ignored, every other line must be a single assignment. Schema version 1.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  std::string str(const std::string& key) const;
  std::string str_or(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key) const;
  double real_or(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key) const;
  std::int64_t integer_or(const std::string& key, std::int64_t fallback) const;
  bool flag_or(const std::string& key, bool fallback) const;

  /// Comma-separated lists.
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::string> strings(const std::string& key) const;

  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> kv_;
  std::string origin_;
};

}  // namespace fitact
