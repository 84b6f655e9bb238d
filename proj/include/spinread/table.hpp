#pragma once

// Output tables.
//
// CSV: first line "# schema: <name>/<version>", then a header row, then one
// row per record. Doubles are written in shortest round-trip form.
// JSON lines: one object per record, each with a "schema" key.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

namespace spinread {

enum class ColumnType { kText, kReal, kInteger, kBool };

struct Column {
  std::string name;
  ColumnType type;
};

struct Schema {
  std::string name;
  int version = 1;
  std::vector<Column> columns;

  std::string tag() const { return name + "/" + std::to_string(version); }
};

using Cell = std::variant<std::string, double, std::int64_t, bool>;

class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Table {
  Schema schema;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != schema.columns.size()) {
      throw TableError("row width " + std::to_string(row.size()) + " does not match schema " +
                       schema.tag());
    }
    rows.push_back(std::move(row));
  }

  std::size_t column_index(std::string_view name) const {
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
      if (schema.columns[i].name == name) return i;
    }
    throw TableError("no column '" + std::string(name) + "' in " + schema.tag());
  }

  double real(std::size_t row, std::string_view column) const {
    const Cell& c = rows.at(row).at(column_index(column));
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    throw TableError("column '" + std::string(column) + "' is not numeric");
  }
};

enum class OutputFormat { kCsv, kJsonLines };

namespace table_detail {

inline std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw TableError("cannot format value");
  return std::string(buf, ptr);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return csv_escape(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_real(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return std::to_string(v);
        }
      },
      c);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline Cell parse_cell(const std::string& text, ColumnType type) {
  switch (type) {
    case ColumnType::kText:
      return text;
    case ColumnType::kReal: {
      if (text == "inf") return std::numeric_limits<double>::infinity();
      if (text == "-inf") return -std::numeric_limits<double>::infinity();
      if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw TableError("not a real number: '" + text + "'");
      }
      return v;
    }
    case ColumnType::kInteger: {
      std::int64_t v = 0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw TableError("not an integer: '" + text + "'");
      }
      return v;
    }
    case ColumnType::kBool:
      if (text == "true") return true;
      if (text == "false") return false;
      throw TableError("not a boolean: '" + text + "'");
  }
  return text;
}

}  // namespace table_detail

inline void write_csv(const Table& t, std::ostream& out) {
  out << "# schema: " << t.schema.tag() << '\n';
  for (std::size_t i = 0; i < t.schema.columns.size(); ++i) {
    out << (i ? "," : "") << t.schema.columns[i].name;
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << table_detail::to_text(row[i]);
    }
    out << '\n';
  }
}

inline nlohmann::json cell_to_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          // JSON has no infinities; write them as strings.
          if (!std::isfinite(v)) return table_detail::format_real(v);
          return v;
        } else {
          return v;
        }
      },
      c);
}

inline void write_json_lines(const Table& t, std::ostream& out) {
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    obj["schema"] = t.schema.tag();
    for (std::size_t i = 0; i < row.size(); ++i) {
      obj[t.schema.columns[i].name] = cell_to_json(row[i]);
    }
    out << obj.dump() << '\n';
  }
}

inline void write_table(const Table& t, std::ostream& out, OutputFormat format) {
  if (format == OutputFormat::kCsv) {
    write_csv(t, out);
  } else {
    write_json_lines(t, out);
  }
}

/// Reads a CSV table and checks it against the expected schema.
inline Table read_csv(std::istream& in, const Schema& schema) {
  std::string line;
  if (!std::getline(in, line) || line != "# schema: " + schema.tag()) {
    throw TableError("missing or mismatched schema line, expected " + schema.tag());
  }
  if (!std::getline(in, line)) throw TableError("missing header row");
  const auto header = table_detail::split_csv_line(line);
  if (header.size() != schema.columns.size()) throw TableError("header width mismatch");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != schema.columns[i].name) {
      throw TableError("unexpected column '" + header[i] + "', expected '" +
                       schema.columns[i].name + "'");
    }
  }
  Table t{schema, {}};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = table_detail::split_csv_line(line);
    if (fields.size() != schema.columns.size()) throw TableError("row width mismatch");
    std::vector<Cell> row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      row.push_back(table_detail::parse_cell(fields[i], schema.columns[i].type));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline Table read_json_lines(std::istream& in, const Schema& schema) {
  Table t{schema, {}};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto obj = nlohmann::json::parse(line);
    if (obj.at("schema") != schema.tag()) throw TableError("schema mismatch in JSON line");
    if (obj.size() != schema.columns.size() + 1) throw TableError("unexpected key set in JSON line");
    std::vector<Cell> row;
    for (const auto& col : schema.columns) {
      const auto& v = obj.at(col.name);
      switch (col.type) {
        case ColumnType::kText: row.emplace_back(v.get<std::string>()); break;
        case ColumnType::kReal:
          if (v.is_string()) {
            row.push_back(table_detail::parse_cell(v.get<std::string>(), ColumnType::kReal));
          } else {
            row.emplace_back(v.get<double>());
          }
          break;
        case ColumnType::kInteger: row.emplace_back(v.get<std::int64_t>()); break;
        case ColumnType::kBool: row.emplace_back(v.get<bool>()); break;
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace spinread
