#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "intellimove/errors.hpp"

namespace intellimove::detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.emplace_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double parse_double(std::string_view text, std::string_view what) {
  std::string s(trim(text));
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw ConfigError("invalid number for " + std::string(what) + ": '" + s + "'");
  return v;
}

inline long long parse_int(std::string_view text, std::string_view what) {
  auto s = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("invalid integer for " + std::string(what) + ": '" + std::string(s) + "'");
  return v;
}

// Parses "key: value" lines. Blank lines and lines starting with '#' are
// skipped. Keys outside `allowed` and repeated keys are rejected.
inline std::map<std::string, std::string> parse_key_values(std::string_view text,
                                                           const std::set<std::string>& allowed,
                                                           std::string_view source) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto colon = t.find(':');
    if (colon == std::string_view::npos)
      throw ConfigError(std::string(source) + ":" + std::to_string(lineno) + ": expected 'key: value'");
    std::string key(trim(t.substr(0, colon)));
    std::string value(trim(t.substr(colon + 1)));
    if (!allowed.count(key))
      throw ConfigError(std::string(source) + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!out.emplace(key, value).second)
      throw ConfigError(std::string(source) + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }
  return out;
}

// Fixed-point rendering used wherever output must be byte-stable.
inline std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s(buf);
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) s.erase(0, s.front() == '-' ? 1 : 0);
  return s;
}

}  // namespace intellimove::detail
