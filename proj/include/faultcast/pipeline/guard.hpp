#ifndef FAULTCAST_PIPELINE_GUARD_HPP
#define FAULTCAST_PIPELINE_GUARD_HPP

#include <map>
#include <string>
#include <vector>

#include "faultcast/design/schema.hpp"

namespace faultcast::pipeline {

// Training-data covariate ranges backing the extrapolation warnings. For a
// configured interaction the numeric range is tracked per categorical cell
// (levels joined with '|'), so a new (region, direction) combination can be
// flagged even when each marginal value was seen in training.
struct InteractionGuard {
    std::vector<std::string> categorical;
    std::string numeric;
    std::map<std::string, std::pair<double, double>> per_cell;
};

struct TrainingRange {
    std::map<std::string, std::pair<double, double>> numeric;  // raw scale
    std::vector<InteractionGuard> interactions;
};

TrainingRange fit_ranges(
    const design::EncodedTable& train, const std::vector<std::string>& numeric_columns,
    const std::vector<std::pair<std::vector<std::string>, std::string>>& interactions = {});

// Warnings for one row; never blocks prediction.
std::vector<std::string> extrapolation_check(const TrainingRange& ranges,
                                             const design::EncodedTable& table,
                                             Eigen::Index row);

}  // namespace faultcast::pipeline

#endif
