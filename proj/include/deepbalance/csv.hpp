#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace deepbalance::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // rows[i] came from this 1-based file line.
  std::vector<std::size_t> line_numbers;
};

// Comma-delimited, header row required. Double-quoted fields may contain
// commas and "" escapes. Blank lines are skipped; CRLF is accepted.
Table read(const std::filesystem::path& path);

std::vector<std::string> split_line(std::string_view line);

// Strict numeric parse of a whole cell (surrounding spaces allowed).
std::optional<double> parse_double(std::string_view cell);

// Shortest decimal representation that round-trips exactly.
std::string format_double(double value);

}  // namespace deepbalance::csv
