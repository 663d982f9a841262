#pragma once

#include <filesystem>
#include <istream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include "cusp/exponent.hpp"

namespace cuspkit {

/// Bad or missing configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// INI file with [sections] of key = value lines. Keys are addressed as
/// "section.key". Every getter records the value it resolved, defaults
/// included, so effective() describes the run completely.
class Config {
 public:
  static Config load(const std::filesystem::path& path);
  static Config parse(std::istream& in, const std::string& source, std::filesystem::path base_dir);

  /// Throws ConfigError for the first key that is not in `allowed`.
  void restrict_to(const std::set<std::string>& allowed) const;

  bool has(const std::string& key) const;

  double get_double(const std::string& key);
  double get_double(const std::string& key, double fallback);
  int get_int(const std::string& key);
  int get_int(const std::string& key, int fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::string get_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  /// Exact value; decimals and p/q both accepted. Echoed as written.
  cusp::Rational get_rational(const std::string& key);
  /// Comma separated doubles; empty string gives an empty list.
  std::vector<double> get_double_list(const std::string& key, const std::string& fallback);
  /// Comma separated items, whitespace trimmed, empty items dropped.
  std::vector<std::string> get_list(const std::string& key, const std::string& fallback);

  /// Resolves a path relative to the directory holding the config file.
  std::filesystem::path resolve(const std::string& relative) const;

  const nlohmann::json& effective() const { return effective_; }
  const std::string& source() const { return source_; }

 private:
  std::string raw(const std::string& key) const;
  void record(const std::string& key, nlohmann::json value);

  boost::property_tree::ptree tree_;
  nlohmann::json effective_ = nlohmann::json::object();
  std::string source_;
  std::filesystem::path base_dir_;
};

std::string trim(const std::string& s);

/// Throws ConfigError("<key>: <message>") unless `ok`.
void require(bool ok, const std::string& key, const std::string& message);

}  // namespace cuspkit
