#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace wprime {

/// Shortest decimal text that round-trips to the same double (std::to_chars).
/// Non-finite values are written as nan, inf, -inf.
std::string format_number(double value);

std::vector<std::string> split(std::string_view text, char sep);

/// Numeric CSV: a header line followed by rows of numbers.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Throws IoError on ragged rows or non-numeric cells (reported with the line
/// number). Blank lines are skipped.
CsvTable parse_csv(std::string_view text, const std::string& origin = "<text>");
CsvTable read_csv(const std::string& path);

void write_text_file(const std::string& path, std::string_view contents);

}  // namespace wprime
