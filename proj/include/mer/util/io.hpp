#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mer {

std::string read_text_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// RFC 4180 reader: comma separated, double-quoted fields may contain commas,
// newlines and doubled quotes. A trailing newline does not produce a row.
struct CsvRow {
  std::size_t line = 0;  // 1-based physical line where the row starts
  std::vector<std::string> fields;
};

std::vector<CsvRow> parse_csv(std::string_view text, char delimiter = ',');

std::string csv_escape(std::string_view field);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

}  // namespace mer
