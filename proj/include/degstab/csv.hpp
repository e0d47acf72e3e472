#pragma once

#include <string>
#include <vector>

namespace degstab {

struct CsvTable {
    std::vector<std::string> header;  // empty when the file has no header row
    std::vector<std::vector<double>> rows;
};

/// Numeric CSV reader. A first row that does not parse as numbers is taken as the header.
CsvTable read_csv(const std::string& path, int expected_columns = -1);
CsvTable parse_csv(const std::string& text, int expected_columns = -1, const std::string& origin = "<string>");

/// Fixed-format number used for every emitted CSV and report value.
std::string format_number(double v);

}  // namespace degstab
