#include "kpp/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace kpp {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns,
               const std::vector<std::string>& comments) {
    if (header.size() != columns.size()) throw std::invalid_argument("write_csv: header/column mismatch");
    const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
    for (auto* c : columns)
        if (c->size() != rows) throw std::invalid_argument("write_csv: ragged columns");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    for (const auto& c : comments) out << "# " << c << '\n';
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << format_double((*columns[j])[i]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.comments.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            t.header = cells;
            t.columns.resize(cells.size());
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": wrong number of fields");
        for (std::size_t j = 0; j < cells.size(); ++j) {
            double v = 0;
            auto [p, ec] = std::from_chars(cells[j].data(), cells[j].data() + cells[j].size(), v);
            if (ec != std::errc() || p != cells[j].data() + cells[j].size())
                throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + cells[j] + "'");
            t.columns[j].push_back(v);
        }
    }
    if (!have_header) throw std::runtime_error(path + ": empty file");
    return t;
}

}  // namespace kpp
