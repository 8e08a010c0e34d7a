#include "pfcone/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pfcone/errors.hpp"

namespace pfcone {

namespace {

std::string trim(std::string_view s) {
  const auto* first = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  const auto* last = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return first < last ? std::string(first, last) : std::string();
}

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::ConfigInvalid, "field '" + field + "': " + what);
}

double to_double(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(out)) {
    invalid(field, "expected a finite number, got '" + text + "'");
  }
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::ConfigInvalid,
                  source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorKind::ConfigInvalid, source + ":" + std::to_string(lineno) + ": empty key");
    }
    cfg.set(key, trim(body.substr(eq + 1)));
  }
  return cfg;
}

Config Config::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigInvalid, "cannot open config '" + path + "'");
  return parse(in, path);
}

bool Config::has(const std::string& key) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.first == key; });
}

void Config::set(const std::string& key, const std::string& value) {
  for (auto& e : entries_) {
    if (e.first == key) {
      e.second = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

const std::string& Config::get_string(const std::string& key) const {
  for (const auto& e : entries_) {
    if (e.first == key) return e.second;
  }
  invalid(key, "missing");
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const { return to_double(get_string(key), key); }

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long Config::get_int(const std::string& key) const {
  const std::string& t = get_string(key);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    invalid(key, "expected an integer, got '" + t + "'");
  }
  return out;
}

long long Config::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_uint64(const std::string& key) const {
  const std::string& t = get_string(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    invalid(key, "expected an unsigned 64-bit integer, got '" + t + "'");
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& field) {
  if (trim(text).empty()) invalid(field, "empty list");
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) invalid(field, "range must be 'lo:hi:n'");
    const double lo = to_double(parts[0], field);
    const double hi = to_double(parts[1], field);
    long long n = 0;
    const auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), n);
    if (ec != std::errc() || ptr != parts[2].data() + parts[2].size() || n < 1) {
      invalid(field, "range count must be a positive integer");
    }
    if (n == 1) return {lo};
    std::vector<double> out(static_cast<std::size_t>(n));
    for (long long k = 0; k < n; ++k) {
      out[static_cast<std::size_t>(k)] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(item, field));
  return out;
}

std::vector<double> Config::get_list(const std::string& key) const {
  return parse_double_list(get_string(key), key);
}

std::vector<double> Config::get_list(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? get_list(key) : fallback;
}

std::vector<std::string> Config::get_words(const std::string& key) const {
  auto words = split(get_string(key), ',');
  if (words.empty() || std::any_of(words.begin(), words.end(), [](const auto& w) { return w.empty(); })) {
    invalid(key, "expected a comma-separated list of names");
  }
  return words;
}

std::vector<std::string> Config::get_words(const std::string& key,
                                           std::vector<std::string> fallback) const {
  return has(key) ? get_words(key) : fallback;
}

void Config::require_known(const std::vector<std::string>& known) const {
  for (const auto& [key, value] : entries_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) invalid(key, "unknown field");
  }
}

}  // namespace pfcone
