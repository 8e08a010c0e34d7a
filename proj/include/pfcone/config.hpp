#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pfcone {

/// Ordered `key = value` table. Blank lines and `#` comments are ignored; a
/// repeated key overrides the earlier value in place. Typed getters throw
/// ConfigInvalid naming the offending field.
class Config {
 public:
  using Entry = std::pair<std::string, std::string>;

  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config parse_string(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);
  const std::vector<Entry>& entries() const { return entries_; }

  const std::string& get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint64(const std::string& key) const;

  /// "lo:hi:n" (n evenly spaced points, endpoints included) or "v1, v2, ...".
  std::vector<double> get_list(const std::string& key) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;
  /// Comma-separated words.
  std::vector<std::string> get_words(const std::string& key) const;
  std::vector<std::string> get_words(const std::string& key, std::vector<std::string> fallback) const;

  /// Throws ConfigInvalid for keys outside `known`.
  void require_known(const std::vector<std::string>& known) const;

 private:
  std::vector<Entry> entries_;
};

/// Parses a double list in either Config::get_list form; `field` names the
/// source in diagnostics.
std::vector<double> parse_double_list(const std::string& text, const std::string& field);

}  // namespace pfcone
