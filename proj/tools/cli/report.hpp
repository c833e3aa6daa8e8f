#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace cannings {
namespace cli {

using Value = std::variant<std::string, double, std::int64_t, std::uint64_t, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
};

std::string format_double(double v);

// One header line, RFC-style quoting.
std::string to_csv(const Table& table);

// Same rows as an array of objects.
std::string to_json(const Table& table);

// path "-" writes to stdout. format is "csv" or "json".
void write_table(const Table& table, const std::string& path,
                 const std::string& format);

void write_text(const std::string& text, const std::string& path);

}  // namespace cli
}  // namespace cannings
