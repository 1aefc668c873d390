#include "wprime/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wprime/errors.hpp"

namespace wprime {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        out.emplace_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

CsvTable parse_csv(std::string_view text, const std::string& origin) {
    CsvTable table;
    std::size_t line_no = 0;
    std::size_t start = 0;
    bool have_header = false;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(start, end - start));
        ++line_no;
        start = end + 1;
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        auto cells = split(line, ',');
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw IoError(origin + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(table.header.size()) + " columns, got " + std::to_string(cells.size()));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& cell : cells) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
                throw IoError(origin + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
            }
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
        if (end == text.size()) break;
    }
    if (!have_header) throw IoError(origin + ": empty CSV");
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), path);
}

void write_text_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace wprime
