#ifndef FAULTCAST_PIPELINE_TABLE_HPP
#define FAULTCAST_PIPELINE_TABLE_HPP

#include <string>
#include <vector>

namespace faultcast::pipeline {

// Minimal string-typed CSV surface: values round-trip byte-exactly, numeric
// formatting (shortest form that reparses to the same double) is applied
// only when cells are produced from numbers.
struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // throws if absent
};

Csv parse_csv(const std::string& text);
Csv read_csv(const std::string& path);
std::string write_csv(const Csv& csv);
void save_csv(const Csv& csv, const std::string& path);

double to_number(const std::string& cell, const std::string& column, std::size_t row);
std::string format_number(double v);

}  // namespace faultcast::pipeline

#endif
