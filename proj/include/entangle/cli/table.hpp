#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace entangle::cli {

using Cell = std::variant<std::string, std::int64_t, double>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// 6 significant digits; scientific notation when |x| >= 1e4 or |x| < 1e-4.
// Locale independent.
std::string format_number(double x);

void write_csv(std::ostream& out, const Table& table);

// Header row plus one line per row, newline-terminated.
// Throws std::runtime_error when the path cannot be written.
void emit_table(const Table& table, const std::filesystem::path& path);

}  // namespace entangle::cli
