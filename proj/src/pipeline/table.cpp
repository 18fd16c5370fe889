#include "faultcast/pipeline/table.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace faultcast::pipeline {

std::size_t Csv::column(const std::string& name) const {
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == name) return j;
    throw std::invalid_argument("csv: no column named '" + name + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

}  // namespace

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto cells = split_line(line);
        if (csv.header.empty()) {
            csv.header = std::move(cells);
        } else {
            if (cells.size() != csv.header.size())
                throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected " +
                                            std::to_string(csv.header.size()) + " cells, got " +
                                            std::to_string(cells.size()));
            csv.rows.push_back(std::move(cells));
        }
    }
    if (csv.header.empty()) throw std::invalid_argument("csv: empty input");
    return csv;
}

Csv read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

std::string write_csv(const Csv& csv) {
    std::ostringstream out;
    for (std::size_t j = 0; j < csv.header.size(); ++j)
        out << (j ? "," : "") << csv.header[j];
    out << '\n';
    for (const auto& row : csv.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
        out << '\n';
    }
    return out.str();
}

void save_csv(const Csv& csv, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write '" + path + "'");
    out << write_csv(csv);
}

double to_number(const std::string& cell, const std::string& column, std::size_t row) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto res = std::from_chars(cell.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw std::invalid_argument("column '" + column + "', row " + std::to_string(row + 1) +
                                    ": '" + cell + "' is not a number");
    return v;
}

std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

}  // namespace faultcast::pipeline
