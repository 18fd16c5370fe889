#include "faultcast/pipeline/guard.hpp"

#include <limits>
#include <sstream>

namespace faultcast::pipeline {

namespace {

std::string cell_key(const design::EncodedTable& table, const std::vector<std::string>& cats,
                     Eigen::Index row) {
    std::string key;
    for (const auto& c : cats) {
        const auto& col = table.at(c);
        if (!key.empty()) key += '|';
        key += col.schema.levels[static_cast<std::size_t>(
            col.codes[static_cast<std::size_t>(row)])];
    }
    return key;
}

}  // namespace

TrainingRange fit_ranges(
    const design::EncodedTable& train, const std::vector<std::string>& numeric_columns,
    const std::vector<std::pair<std::vector<std::string>, std::string>>& interactions) {
    TrainingRange out;
    for (const auto& name : numeric_columns) {
        const auto& col = train.at(name);
        out.numeric[name] = {col.raw.minCoeff(), col.raw.maxCoeff()};
    }
    for (const auto& [cats, num] : interactions) {
        InteractionGuard g;
        g.categorical = cats;
        g.numeric = num;
        const auto& col = train.at(num);
        for (Eigen::Index i = 0; i < train.n; ++i) {
            const std::string key = cell_key(train, cats, i);
            auto it = g.per_cell.find(key);
            if (it == g.per_cell.end())
                g.per_cell[key] = {col.raw[i], col.raw[i]};
            else {
                it->second.first = std::min(it->second.first, col.raw[i]);
                it->second.second = std::max(it->second.second, col.raw[i]);
            }
        }
        out.interactions.push_back(std::move(g));
    }
    return out;
}

std::vector<std::string> extrapolation_check(const TrainingRange& ranges,
                                             const design::EncodedTable& table,
                                             Eigen::Index row) {
    std::vector<std::string> warnings;
    for (const auto& [name, range] : ranges.numeric) {
        const double v = table.at(name).raw[row];
        if (v < range.first || v > range.second) {
            std::ostringstream msg;
            msg << name << "=" << v << " outside training range [" << range.first << ", "
                << range.second << "]";
            warnings.push_back(msg.str());
        }
    }
    for (const auto& g : ranges.interactions) {
        const std::string key = cell_key(table, g.categorical, row);
        const auto it = g.per_cell.find(key);
        std::string label = g.numeric;
        for (const auto& c : g.categorical) label += "x" + c;
        if (it == g.per_cell.end()) {
            warnings.push_back(label + ": no comparable training data for cell '" + key + "'");
            continue;
        }
        const double v = table.at(g.numeric).raw[row];
        if (v < it->second.first || v > it->second.second) {
            std::ostringstream msg;
            msg << label << ": " << g.numeric << "=" << v << " outside cell '" << key
                << "' training range [" << it->second.first << ", " << it->second.second << "]";
            warnings.push_back(msg.str());
        }
    }
    return warnings;
}

}  // namespace faultcast::pipeline
