#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include <boost/property_tree/ini_parser.hpp>

#include "cusp/errors.hpp"

namespace cuspkit {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigError(key + ": " + message);
}

namespace {

std::pair<std::string, std::string> split_key(const std::string& key) {
  const auto dot = key.find('.');
  if (dot == std::string::npos) return {"", key};
  return {key.substr(0, dot), key.substr(dot + 1)};
}

double parse_double(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return v;
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse(in, path.string(), path.parent_path());
}

Config Config::parse(std::istream& in, const std::string& source, std::filesystem::path base_dir) {
  Config c;
  c.source_ = source;
  c.base_dir_ = std::move(base_dir);
  try {
    pt::read_ini(in, c.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return c;
}

void Config::restrict_to(const std::set<std::string>& allowed) const {
  for (const auto& [name, child] : tree_) {
    if (child.empty()) {
      if (!allowed.count(name)) throw ConfigError(name + ": unknown key");
      continue;
    }
    for (const auto& [key, leaf] : child) {
      const std::string full = name + "." + key;
      if (!allowed.count(full)) throw ConfigError(full + ": unknown key");
    }
  }
}

std::string Config::raw(const std::string& key) const {
  const auto [section, name] = split_key(key);
  const pt::ptree* node = &tree_;
  if (!section.empty()) {
    const auto it = tree_.find(section);
    if (it == tree_.not_found()) throw ConfigError(key + ": missing required key");
    node = &it->second;
  }
  const auto it = node->find(name);
  if (it == node->not_found()) throw ConfigError(key + ": missing required key");
  return trim(it->second.data());
}

bool Config::has(const std::string& key) const {
  try {
    raw(key);
    return true;
  } catch (const ConfigError&) {
    return false;
  }
}

void Config::record(const std::string& key, nlohmann::json value) {
  const auto [section, name] = split_key(key);
  if (section.empty()) {
    effective_[name] = std::move(value);
  } else {
    effective_[section][name] = std::move(value);
  }
}

double Config::get_double(const std::string& key) {
  const double v = parse_double(key, raw(key));
  record(key, v);
  return v;
}

double Config::get_double(const std::string& key, double fallback) {
  const double v = has(key) ? parse_double(key, raw(key)) : fallback;
  record(key, v);
  return v;
}

int Config::get_int(const std::string& key) {
  const std::string s = raw(key);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(key + ": expected an integer, got '" + s + "'");
  }
  record(key, v);
  return v;
}

int Config::get_int(const std::string& key, int fallback) {
  if (has(key)) return get_int(key);
  record(key, fallback);
  return fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) {
  bool v = fallback;
  if (has(key)) {
    const std::string s = raw(key);
    if (s == "true" || s == "yes" || s == "1") {
      v = true;
    } else if (s == "false" || s == "no" || s == "0") {
      v = false;
    } else {
      throw ConfigError(key + ": expected true or false, got '" + s + "'");
    }
  }
  record(key, v);
  return v;
}

std::string Config::get_string(const std::string& key) {
  std::string v = raw(key);
  record(key, v);
  return v;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
  std::string v = has(key) ? raw(key) : fallback;
  record(key, v);
  return v;
}

cusp::Rational Config::get_rational(const std::string& key) {
  const std::string s = raw(key);
  cusp::Rational q;
  try {
    q = cusp::parse_rational(s);
  } catch (const cusp::InvalidArgument& e) {
    throw ConfigError(key + ": " + e.what());
  }
  record(key, s);
  return q;
}

std::vector<std::string> Config::get_list(const std::string& key, const std::string& fallback) {
  const std::string s = has(key) ? raw(key) : fallback;
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const std::string item = trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  record(key, s);
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key, const std::string& fallback) {
  std::vector<double> out;
  for (const auto& item : get_list(key, fallback)) out.push_back(parse_double(key, item));
  record(key, out);
  return out;
}

std::filesystem::path Config::resolve(const std::string& relative) const {
  const std::filesystem::path p(relative);
  return p.is_absolute() ? p : base_dir_ / p;
}

}  // namespace cuspkit
