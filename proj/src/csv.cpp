#include "causalbench/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "causalbench/errors.hpp"

namespace causalbench::csv {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.emplace_back(trim(line.substr(start)));
            break;
        }
        out.emplace_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

std::vector<Row> read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<Row> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        rows.push_back(Row{lineno, split(body)});
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    return rows;
}

double parse_double(std::string_view text, const std::string& file, std::size_t line,
                    std::string_view column) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError(file, line,
                         "column '" + std::string(column) + "': not a number: '" +
                             std::string(text) + "'");
    }
    if (!std::isfinite(value)) {
        throw ParseError(file, line,
                         "column '" + std::string(column) + "': non-finite value '" +
                             std::string(text) + "'");
    }
    return value;
}

long long parse_int(std::string_view text, const std::string& file, std::size_t line,
                    std::string_view column) {
    text = trim(text);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError(file, line,
                         "column '" + std::string(column) + "': not an integer: '" +
                             std::string(text) + "'");
    }
    return value;
}

bool looks_numeric(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

std::string join(const std::vector<std::string>& fields, char sep) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(sep);
        out += fields[i];
    }
    return out;
}

bool natural_less(std::string_view a, std::string_view b) {
    const auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (is_digit(a[i]) && is_digit(b[j])) {
            std::size_t ie = i, je = j;
            while (ie < a.size() && is_digit(a[ie])) ++ie;
            while (je < b.size() && is_digit(b[je])) ++je;
            auto da = a.substr(i, ie - i);
            auto db = b.substr(j, je - j);
            while (da.size() > 1 && da.front() == '0') da.remove_prefix(1);
            while (db.size() > 1 && db.front() == '0') db.remove_prefix(1);
            if (da.size() != db.size()) return da.size() < db.size();
            if (da != db) return da < db;
            i = ie;
            j = je;
        } else {
            if (a[i] != b[j]) return a[i] < b[j];
            ++i;
            ++j;
        }
    }
    if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
    return a < b;
}

std::vector<std::filesystem::path> list_csv_files(const std::filesystem::path& path) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end(), [](const fs::path& x, const fs::path& y) {
            return natural_less(x.filename().string(), y.filename().string());
        });
    } else if (fs::is_regular_file(path)) {
        files.push_back(path);
    } else {
        throw IoError("path not found: " + path.string());
    }
    if (files.empty()) throw IoError("no .csv files under " + path.string());
    return files;
}

}  // namespace causalbench::csv
