#include "degstab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "degstab/errors.hpp"

namespace degstab {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end != nullptr && *end == '\0';
}

}  // namespace

CsvTable parse_csv(const std::string& text, int expected_columns, const std::string& origin) {
    CsvTable table;
    std::stringstream in(text);
    std::string line;
    int line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line);
        if (expected_columns > 0 && static_cast<int>(cells.size()) != expected_columns)
            fail(ErrorCode::IoError, origin + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(expected_columns) + " columns");
        std::vector<double> row(cells.size());
        bool numeric = true;
        for (size_t i = 0; i < cells.size(); ++i) numeric = numeric && parse_double(cells[i], row[i]);
        if (!numeric) {
            if (first) {
                table.header = cells;
                first = false;
                continue;
            }
            fail(ErrorCode::IoError, origin + ":" + std::to_string(line_no) + ": non-numeric value");
        }
        first = false;
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable read_csv(const std::string& path, int expected_columns) {
    std::ifstream f(path);
    if (!f) fail(ErrorCode::IoError, "cannot open " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_csv(buf.str(), expected_columns, path);
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

}  // namespace degstab
