#pragma once

#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pfcone/operator.hpp"
#include "pfcone/pf_verifier.hpp"

namespace pfcone {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

/// Header block of `# key = value` lines, one or more CSV tables and a
/// summary block. Everything except the optional timestamp line is a pure
/// function of the inputs.
struct Report {
  std::vector<std::pair<std::string, std::string>> header;
  std::deque<Table> tables;  // add_table references stay valid
  std::vector<std::pair<std::string, std::string>> summary;
  int violations = 0;  // theorem-contract violations found

  void add_header(const std::string& key, const std::string& value);
  void add_summary(const std::string& key, const std::string& value);
  Table& add_table(const std::string& name, std::vector<std::string> columns);
  const Table* find_table(const std::string& name) const;
  std::optional<std::string> header_value(const std::string& key) const;

  void write(std::ostream& out, const std::optional<std::string>& timestamp = std::nullopt) const;
  std::string str(const std::optional<std::string>& timestamp = std::nullopt) const;
};

/// Parses the output of Report::write. The timestamp line is dropped.
Report read_report(std::istream& in);

/// UTC, ISO 8601.
std::string current_timestamp();

/// Entries joined with ';' at 17 significant digits; empty for no vector.
std::string flatten(const std::optional<Vector>& v);
Vector unflatten(const std::string& text);

/// Columns of a verdict row: predicate, instance, status, margin, tolerance,
/// witness, seed.
std::vector<std::string> verdict_columns();
std::vector<std::string> verdict_row(const std::string& predicate, const std::string& instance,
                                     const Verdict& v, std::uint64_t seed);

}  // namespace pfcone
