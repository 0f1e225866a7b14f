#pragma once

// Minimal CSV support: comma separated, optional double-quoted fields,
// UTF-8 passed through untouched.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dsm::csv {

using Row = std::vector<std::string>;

struct Table {
  std::vector<Row> rows;  ///< rows[0] is the header when present
  std::vector<std::size_t> line_numbers;  ///< 1-based source line of each row
};

/// Splits one line; throws MalformedCsv on an unterminated quote.
Row split_line(std::string_view line, std::size_t line_number = 0);

/// Reads every non-blank line. Throws MissingFile if the path cannot be opened.
Table read_file(const std::filesystem::path& path);

/// Quotes a field only when it contains a comma, quote or newline.
std::string escape_field(std::string_view field);
std::string join_row(const Row& row);

/// Strict decimal parse of a whole cell; nullopt-like failure via bool.
bool parse_double(std::string_view cell, double& out);

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

}  // namespace dsm::csv
