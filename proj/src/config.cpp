#include "swarmcov/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <charconv>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "swarmcov/csv.hpp"
#include "swarmcov/error.hpp"

namespace swarmcov {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips inline comments, which the boost INI reader keeps as part of the value.
std::string strip_inline_comments(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.find_first_of("#;");
    if (pos != std::string::npos) line.erase(pos);
    out << line << '\n';
  }
  return out.str();
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

Config Config::parse(const std::string& text, std::filesystem::path base_dir) {
  boost::property_tree::ptree tree;
  std::istringstream in(strip_inline_comments(text));
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  Config cfg;
  cfg.base_dir_ = std::move(base_dir);
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key `" + section + "` must live in a [section]");
    for (const auto& [key, value] : body) {
      if (!value.empty()) throw ConfigError("nested config key " + section + "." + key);
      cfg.values_[section + "." + key] = trim(value.data());
    }
  }
  return cfg;
}

const std::string* Config::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::text(const std::string& key) const {
  const auto* v = raw(key);
  if (!v) throw ConfigError("missing config key " + key);
  return *v;
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  const auto* v = raw(key);
  return v ? *v : fallback;
}

double Config::number(const std::string& key) const {
  const std::string v = text(key);
  try {
    const double x = parse_double(v);
    if (!std::isfinite(x)) throw ConfigError("");
    return x;
  } catch (const Error&) {
    throw ConfigError("config key " + key + ": expected a finite number, got `" + v + "`");
  }
}

double Config::number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

std::uint64_t Config::integer(const std::string& key) const {
  const std::string v = text(key);
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty())
    throw ConfigError("config key " + key + ": expected a nonnegative integer, got `" + v + "`");
  return out;
}

std::uint64_t Config::integer(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = text(key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("config key " + key + ": expected true/false, got `" + v + "`");
}

std::vector<double> Config::numbers(const std::string& key) const {
  const std::string v = text(key);
  std::vector<double> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    try {
      const double x = parse_double(item);
      if (!std::isfinite(x)) throw ConfigError("");
      out.push_back(x);
    } catch (const Error&) {
      throw ConfigError("config key " + key + ": `" + item + "` is not a finite number");
    }
  }
  if (out.empty()) throw ConfigError("config key " + key + ": empty list");
  return out;
}

std::vector<double> Config::numbers(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? numbers(key) : fallback;
}

std::string Config::choice(const std::string& key, const std::vector<std::string>& choices) const {
  const std::string v = text(key);
  if (std::find(choices.begin(), choices.end(), v) == choices.end()) {
    std::string list;
    for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
    throw ConfigError("config key " + key + ": `" + v + "` is not one of " + list);
  }
  return v;
}

std::string Config::choice(const std::string& key, const std::vector<std::string>& choices,
                           const std::string& fallback) const {
  return has(key) ? choice(key, choices) : fallback;
}

std::filesystem::path Config::existing_file(const std::string& key) const {
  std::filesystem::path p = text(key);
  if (p.is_relative()) p = base_dir_ / p;
  if (!std::filesystem::is_regular_file(p)) throw ConfigError("config key " + key + ": file not found: " + p.string());
  return p;
}

double Config::positive(const std::string& key) const {
  const double v = number(key);
  if (!(v > 0.0)) throw ConfigError("config key " + key + " must be positive");
  return v;
}

double Config::positive(const std::string& key, double fallback) const {
  return has(key) ? positive(key) : fallback;
}

double Config::nonnegative(const std::string& key, double fallback) const {
  const double v = number(key, fallback);
  if (!(v >= 0.0)) throw ConfigError("config key " + key + " must be nonnegative");
  return v;
}

void Config::finish() const {
  std::string unknown;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  if (!unknown.empty()) throw ConfigError("unknown config key(s): " + unknown);
}

}  // namespace swarmcov
