#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tnrisk {

struct CsvRow {
  std::size_t line = 0;  // 1-based line in the source text
  std::vector<std::string> cells;
};

struct CsvDocument {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
};

/// RFC 4180 subset: comma separator, double-quote quoting with "" escapes,
/// LF or CRLF line ends, optional UTF-8 BOM. Blank lines are skipped.
/// Throws Error(MalformedRow) on an unterminated quote.
CsvDocument parse_csv(std::string_view text);

/// Reads and parses a file. Throws Error(MissingFile) when absent and
/// Error(Io) when unreadable.
CsvDocument read_csv(const std::filesystem::path& path);

/// Throws Error(MalformedRow, line 1) unless the header matches `expected` exactly.
void require_header(const CsvDocument& doc, const std::vector<std::string>& expected,
                    const std::filesystem::path& source);

std::string csv_escape(std::string_view cell);
std::string csv_line(const std::vector<std::string>& cells);

std::string read_text_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: truncate and write. Creates
/// parent directories. Throws Error(Io) on failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace tnrisk
