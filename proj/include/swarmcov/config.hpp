#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace swarmcov {

// Flat INI file (`[section]` then `key = value`, `#` or `;` comments).
// Every key read is recorded; finish() rejects whatever was never read.
// All errors are ConfigError naming the offending `section.key`.
class Config {
 public:
  static Config load(const std::filesystem::path& path);
  static Config parse(const std::string& text, std::filesystem::path base_dir = ".");

  bool has(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::uint64_t integer(const std::string& key) const;
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;
  // One of `choices`.
  std::string choice(const std::string& key, const std::vector<std::string>& choices) const;
  std::string choice(const std::string& key, const std::vector<std::string>& choices,
                     const std::string& fallback) const;
  // Path resolved relative to the config file's directory; must exist.
  std::filesystem::path existing_file(const std::string& key) const;

  // Range helpers; throw ConfigError naming `key`.
  double positive(const std::string& key) const;
  double positive(const std::string& key, double fallback) const;
  double nonnegative(const std::string& key, double fallback) const;

  // ConfigError listing keys that were present but never read.
  void finish() const;

  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  const std::string* raw(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::filesystem::path base_dir_;
  mutable std::set<std::string> used_;
};

}  // namespace swarmcov
