#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kpp {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Writes equal-length columns under a comma-separated header. Optional comment lines
/// (without the leading '#') go first.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns,
               const std::vector<std::string>& comments = {});

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
    std::vector<std::string> comments;
};

/// Reads a numeric CSV written by write_csv. Throws std::runtime_error with the line number.
CsvTable read_csv(const std::string& path);

}  // namespace kpp
