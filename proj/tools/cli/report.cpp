#include "report.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "json.hpp"

namespace cannings {
namespace cli {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string value_to_string(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else {
          return std::to_string(x);
        }
      },
      v);
}

}  // namespace

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out += csv_escape(table.columns[c]);
    out += (c + 1 == table.columns.size()) ? '\n' : ',';
  }
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out += csv_escape(value_to_string(row[c]));
      out += (c + 1 == row.size()) ? '\n' : ',';
    }
  }
  return out;
}

std::string to_json(const Table& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit([&](const auto& x) { obj[table.columns[c]] = x; }, row[c]);
    }
    rows.push_back(obj);
  }
  return rows.dump(2) + "\n";
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

void write_table(const Table& table, const std::string& path,
                 const std::string& format) {
  if (format == "csv") {
    write_text(to_csv(table), path);
  } else if (format == "json") {
    write_text(to_json(table), path);
  } else {
    throw std::invalid_argument("unknown format: " + format);
  }
}

}  // namespace cli
}  // namespace cannings
