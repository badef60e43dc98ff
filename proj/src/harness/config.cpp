#include "ergolab/harness/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ergolab/core/error.hpp"

namespace ergolab::harness {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

double parse_plain(const std::string& key, const std::string& t) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(key, "expected a number, got '" + t + "'");
  return v;
}

// Plain decimal or a ratio "a/b" such as 1/32.
double to_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const auto slash = t.find('/');
  if (slash == std::string::npos) return parse_plain(key, t);
  const double den = parse_plain(key, trim(t.substr(slash + 1)));
  if (den == 0) throw ConfigError(key, "zero denominator in '" + t + "'");
  return parse_plain(key, trim(t.substr(0, slash))) / den;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError(where, "unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!valid_name(section)) throw ConfigError(where, "bad section name '" + section + "'");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
    const std::string name = trim(body.substr(0, eq));
    if (!valid_name(name)) throw ConfigError(where, "bad key '" + name + "'");
    const std::string key = section.empty() ? name : section + "." + name;
    if (c.values_.count(key)) throw ConfigError(key, "defined twice (" + where + ")");
    const std::string value = trim(body.substr(eq + 1));
    if (value.empty()) throw ConfigError(key, "empty value");
    if (value.front() == '[' && value.back() != ']') throw ConfigError(key, "unterminated array");
    c.values_[key] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open configuration file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

void Config::set(const std::string& key, const std::string& value) { values_[key] = trim(value); }

const std::string& Config::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, "required key is missing");
  used_.insert(key);
  return it->second;
}

std::string Config::text(const std::string& key) const {
  const std::string& v = raw(key);
  if (v.front() == '[') throw ConfigError(key, "expected a single value, got an array");
  return unquote(v);
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  return has(key) ? text(key) : fallback;
}

double Config::number(const std::string& key) const { return to_number(key, text(key)); }

double Config::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::int64_t Config::integer(const std::string& key) const {
  const std::string t = text(key);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError(key, "expected an integer, got '" + t + "'");
  return v;
}

std::int64_t Config::integer(const std::string& key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t Config::seed(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string t = text(key);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) throw ConfigError(key, "expected an unsigned seed, got '" + t + "'");
  return v;
}

bool Config::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string t = text(key);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + t + "'");
}

std::vector<std::string> Config::texts(const std::string& key) const {
  const std::string& v = raw(key);
  if (v.front() != '[') return {unquote(v)};
  std::vector<std::string> out;
  const std::string inner = trim(v.substr(1, v.size() - 2));
  if (inner.empty()) return out;
  // Split on commas outside parentheses and quotes, so "gaussian(1, 2)" stays whole.
  int depth = 0;
  bool quoted = false;
  std::string cur;
  for (char ch : inner) {
    if (ch == '"') quoted = !quoted;
    if (!quoted && ch == '(') ++depth;
    if (!quoted && ch == ')') --depth;
    if (ch == ',' && depth == 0 && !quoted) {
      out.push_back(unquote(trim(cur)));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(unquote(trim(cur)));
  for (const auto& s : out)
    if (s.empty()) throw ConfigError(key, "empty array element");
  return out;
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : texts(key)) out.push_back(to_number(key, s));
  return out;
}

std::vector<double> Config::numbers(const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? numbers(key) : fallback;
}

std::vector<std::string> Config::unused() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

std::string Config::canonical() const {
  std::string s;
  for (const auto& [k, v] : values_) s += k + " = " + v + "\n";
  return s;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace ergolab::harness
