#include "faultcast/pipeline/terms.hpp"

#include <stdexcept>

namespace faultcast::pipeline {

namespace {

const std::string& single_column(const TermSpec& spec) {
    if (spec.columns.size() != 1)
        throw std::invalid_argument("term '" + spec.type + "': exactly one column expected");
    return spec.columns.front();
}

}  // namespace

std::vector<engine::BaseLearner> build_term(const design::EncodedTable& table,
                                            const TermSpec& spec,
                                            const design::AdjacencyGraph* graph) {
    using engine::penalized_learner;
    std::vector<engine::BaseLearner> out;
    if (spec.type == "intercept") {
        out.push_back(penalized_learner(design::intercept_block(table)));
    } else if (spec.type == "linear") {
        out.push_back(penalized_learner(design::linear_block(table, single_column(spec))));
    } else if (spec.type == "smooth") {
        auto [lin, smooth] =
            design::decompose_linear_smooth(table, single_column(spec), spec.spline, spec.df);
        out.push_back(penalized_learner(std::move(lin)));
        out.push_back(penalized_learner(std::move(smooth)));
    } else if (spec.type == "ridge") {
        out.push_back(
            penalized_learner(design::ridge_categorical_block(table, single_column(spec), spec.df)));
    } else if (spec.type == "ordinal") {
        out.push_back(
            penalized_learner(design::ordinal_block(table, single_column(spec), spec.df)));
    } else if (spec.type == "mrf") {
        if (graph == nullptr)
            throw std::invalid_argument("term 'mrf(" + single_column(spec) +
                                        ")': adjacency required");
        out.push_back(
            penalized_learner(design::mrf_block(table, single_column(spec), *graph, spec.df)));
    } else if (spec.type == "interaction") {
        out.push_back(penalized_learner(design::interaction_block(table, spec.columns, spec.df)));
    } else if (spec.type == "aggregate_linear") {
        out.push_back(penalized_learner(
            design::aggregate_linear_block(table, spec.columns, spec.standardize)));
    } else if (spec.type == "aggregate_smooth") {
        out.push_back(
            penalized_learner(design::aggregate_smooth_block(table, spec.columns, spec.spline)));
    } else if (spec.type == "tree") {
        if (spec.columns.empty())
            throw std::invalid_argument("term 'tree': at least one column expected");
        out.push_back(engine::tree_learner("tree", spec.tree, spec.columns));
    } else {
        throw std::invalid_argument("unknown term type '" + spec.type + "'");
    }
    return out;
}

std::vector<std::vector<engine::BaseLearner>> build_parameter_terms(
    const design::EncodedTable& table, const std::vector<std::vector<TermSpec>>& specs,
    const design::AdjacencyGraph* graph) {
    std::vector<std::vector<engine::BaseLearner>> out;
    out.reserve(specs.size());
    for (const auto& param_specs : specs) {
        std::vector<engine::BaseLearner> learners;
        for (const auto& spec : param_specs)
            for (auto& l : build_term(table, spec, graph)) learners.push_back(std::move(l));
        out.push_back(std::move(learners));
    }
    return out;
}

}  // namespace faultcast::pipeline
