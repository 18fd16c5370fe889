#ifndef FAULTCAST_PIPELINE_TERMS_HPP
#define FAULTCAST_PIPELINE_TERMS_HPP

#include <string>
#include <vector>

#include "faultcast/design/block.hpp"
#include "faultcast/engine/boost.hpp"

namespace faultcast::pipeline {

// Declarative base-learner description, as it appears in model configs.
// type: intercept | linear | smooth | ridge | ordinal | mrf | interaction |
//       tree | aggregate_linear | aggregate_smooth
struct TermSpec {
    std::string type;
    std::vector<std::string> columns;
    double df = 1.0;
    design::SplineConfig spline{};
    bool standardize = true;        // aggregate_linear
    learn::TreeConfig tree{};       // tree
};

// Builds the learner(s) for one spec against an encoded training table.
// "smooth" expands into the linear + centered-smooth decomposition, so a
// single spec may yield two learners. MRF terms need the adjacency graph;
// passing nullptr for one throws ("adjacency required").
std::vector<engine::BaseLearner> build_term(const design::EncodedTable& table,
                                            const TermSpec& spec,
                                            const design::AdjacencyGraph* graph);

// Per-parameter expansion of spec lists into learner lists.
std::vector<std::vector<engine::BaseLearner>> build_parameter_terms(
    const design::EncodedTable& table, const std::vector<std::vector<TermSpec>>& specs,
    const design::AdjacencyGraph* graph);

}  // namespace faultcast::pipeline

#endif
