#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace causalbench::csv {

/// One parsed record with its 1-based source line.
struct Row {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// Reads a plain comma-separated file (no quoting). Blank lines and lines
/// starting with '#' are skipped; surrounding whitespace of each field is trimmed.
std::vector<Row> read_file(const std::filesystem::path& path);

std::vector<std::string> split(std::string_view line);

/// Parses a finite double; throws ParseError naming file/line/column on failure.
double parse_double(std::string_view text, const std::string& file, std::size_t line,
                    std::string_view column);

long long parse_int(std::string_view text, const std::string& file, std::size_t line,
                    std::string_view column);

/// True when the whole field is a number (used for header sniffing).
bool looks_numeric(std::string_view text);

std::string join(const std::vector<std::string>& fields, char sep = ',');

/// `path` itself when it is a file, otherwise every *.csv directly inside it
/// in natural order (sim_2.csv before sim_10.csv). Throws IoError when missing or empty.
std::vector<std::filesystem::path> list_csv_files(const std::filesystem::path& path);

/// Name comparison treating embedded digit runs as numbers.
bool natural_less(std::string_view a, std::string_view b);

}  // namespace causalbench::csv
