#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace apsim {

// RFC 4180: comma separated, CRLF records, fields with comma, quote, CR or LF
// are quoted and embedded quotes doubled.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const CsvTable&) const = default;
};

std::string format_csv(const CsvTable& table);
// Throws InputError on malformed quoting or ragged rows.
CsvTable parse_csv(std::string_view text);

// Every row must have exactly header.size() fields.
void export_report(const CsvTable& table, const std::filesystem::path& path);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace apsim
