#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ergolab::harness {

// Plain-text configuration.
//
//   # comment
//   key = value              top-level keys
//   [section]
//   key = value              addressed as "section.key"
//   list = [1, 2, 3]         arrays in brackets, comma separated
//   name = "quoted text"     quotes are optional for single words
//
// Values are kept as text and converted on access; every conversion failure
// and every missing required key throws ConfigError naming the key.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string text(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> texts(const std::string& key) const;

  // Keys never read so far; a run rejects them to catch typos.
  std::vector<std::string> unused() const;
  // Canonical "key = value" lines in key order; the basis of the config hash.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
  const std::string& raw(const std::string& key) const;
};

// FNV-1a 64-bit.
std::uint64_t fnv1a(const std::string& data);

}  // namespace ergolab::harness
