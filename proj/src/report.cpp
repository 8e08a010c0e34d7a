#include "pfcone/report.hpp"

#include <chrono>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>

#include "pfcone/matrix_io.hpp"

namespace pfcone {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv_line(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_field(fields[i]);
  }
  out << '\n';
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

bool split_kv(const std::string& body, std::string& key, std::string& value) {
  const auto eq = body.find(" = ");
  if (eq == std::string::npos) return false;
  key = body.substr(0, eq);
  value = body.substr(eq + 3);
  return true;
}

}  // namespace

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw Error(ErrorKind::InvalidArgument, "table '" + name + "' row has " +
                                                std::to_string(row.size()) + " fields, expected " +
                                                std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

void Report::add_header(const std::string& key, const std::string& value) {
  header.emplace_back(key, value);
}

void Report::add_summary(const std::string& key, const std::string& value) {
  summary.emplace_back(key, value);
}

Table& Report::add_table(const std::string& name, std::vector<std::string> columns) {
  tables.push_back(Table{name, std::move(columns), {}});
  return tables.back();
}

const Table* Report::find_table(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::optional<std::string> Report::header_value(const std::string& key) const {
  for (const auto& [k, v] : header) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void Report::write(std::ostream& out, const std::optional<std::string>& timestamp) const {
  for (const auto& [k, v] : header) out << "# " << k << " = " << v << '\n';
  if (timestamp) out << "# timestamp = " << *timestamp << '\n';
  for (const auto& t : tables) {
    out << "## table = " << t.name << '\n';
    write_csv_line(out, t.columns);
    for (const auto& row : t.rows) write_csv_line(out, row);
  }
  out << "## summary\n";
  for (const auto& [k, v] : summary) out << "# " << k << " = " << v << '\n';
  out << "# violations = " << violations << '\n';
}

std::string Report::str(const std::optional<std::string>& timestamp) const {
  std::ostringstream out;
  write(out, timestamp);
  return out.str();
}

Report read_report(std::istream& in) {
  Report r;
  std::string line;
  Table* table = nullptr;
  bool expect_columns = false;
  bool in_summary = false;
  while (std::getline(in, line)) {
    if (line.rfind("## table = ", 0) == 0) {
      table = &r.add_table(line.substr(11), {});
      expect_columns = true;
      continue;
    }
    if (line == "## summary") {
      in_summary = true;
      table = nullptr;
      continue;
    }
    if (line.rfind("# ", 0) == 0) {
      std::string k, v;
      if (!split_kv(line.substr(2), k, v)) throw Error(ErrorKind::ParseError, "bad report line: " + line);
      if (k == "timestamp") continue;
      if (in_summary && k == "violations") {
        r.violations = std::stoi(v);
      } else if (in_summary) {
        r.add_summary(k, v);
      } else {
        r.add_header(k, v);
      }
      continue;
    }
    if (!table) throw Error(ErrorKind::ParseError, "report row outside a table: " + line);
    if (expect_columns) {
      table->columns = parse_csv_line(line);
      expect_columns = false;
    } else {
      table->add_row(parse_csv_line(line));
    }
  }
  return r;
}

std::string current_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string flatten(const std::optional<Vector>& v) {
  if (!v) return {};
  std::string out;
  for (Index i = 0; i < v->size(); ++i) {
    if (i) out += ';';
    out += format_double((*v)(i));
  }
  return out;
}

Vector unflatten(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ParseError, "bad witness entry '" + item + "'");
    }
  }
  if (values.empty()) throw Error(ErrorKind::ParseError, "empty witness");
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

std::vector<std::string> verdict_columns() {
  return {"predicate", "instance", "status", "margin", "tolerance", "witness", "seed"};
}

std::vector<std::string> verdict_row(const std::string& predicate, const std::string& instance,
                                     const Verdict& v, std::uint64_t seed) {
  return {predicate,
          instance,
          std::string(to_string(v.status)),
          format_double(v.margin),
          format_double(v.tolerance),
          flatten(v.witness),
          std::to_string(seed)};
}

}  // namespace pfcone
