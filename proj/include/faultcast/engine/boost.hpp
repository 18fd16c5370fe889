#ifndef FAULTCAST_ENGINE_BOOST_HPP
#define FAULTCAST_ENGINE_BOOST_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "faultcast/design/block.hpp"
#include "faultcast/dist/family.hpp"
#include "faultcast/learn/penalized.hpp"
#include "faultcast/learn/tree.hpp"

namespace faultcast::engine {

// One candidate base learner bound to a distribution parameter: either a
// calibrated penalized design block or a regression-tree recipe over a set
// of covariate columns.
struct BaseLearner {
    enum class Kind { penalized, tree };

    Kind kind = Kind::penalized;
    std::string term_id;
    design::DesignBlock block;            // penalized
    learn::TreeConfig tree_config;        // tree
    std::vector<std::string> tree_columns;
};

BaseLearner penalized_learner(design::DesignBlock block);
BaseLearner tree_learner(std::string term_id, learn::TreeConfig config,
                         std::vector<std::string> columns);

// Covariate matrix a tree learner sees: standardized values for numeric and
// binary columns, level codes for categorical/ordinal ones.
Eigen::MatrixXd tree_features(const design::EncodedTable& table,
                              const std::vector<std::string>& columns);

// One accepted boosting update (before shrinkage is applied to predictions).
struct Update {
    int iteration = 0;
    int param = 0;
    int learner = 0;  // index into the parameter's learner list
    double delta_insample = 0.0;
    Eigen::VectorXd beta;  // penalized payload
    learn::Tree tree;      // tree payload
};

struct ImportanceEntry {
    std::string term_id;
    int param = 0;
    double total = 0.0;  // summed in-sample log-likelihood gain
};

struct FittedEnsemble {
    std::string family;
    std::vector<std::vector<BaseLearner>> learners;  // indexed by parameter
    std::vector<double> offsets;                     // link scale
    double nu = 0.3;
    int m_stop = 0;
    std::vector<Update> updates;        // truncated at m_stop
    std::vector<double> insample_trace;  // index m; entry 0 is the offset fit
    std::vector<double> holdout_trace;

    // Linear predictors (n x K) for arbitrary encoded data, using the first
    // m_limit iterations (all of them when m_limit < 0).
    Eigen::MatrixXd predict_eta(const design::EncodedTable& table, int m_limit = -1) const;

    std::vector<ImportanceEntry> importance() const;
};

struct StoppingRule {
    int batch = 50;
    int patience = 100;
};

struct TrainConfig {
    double nu = 0.3;
    int max_iterations = 1000;
    std::uint64_t seed = 1;
    StoppingRule stopping;
    std::ostream* log = nullptr;  // progress lines when set
};

// Per-row score vectors d log f / d eta_k at the current linear predictors;
// throws naming the row and parameter on a non-finite gradient.
Eigen::MatrixXd compute_gradients(const dist::Family& family, const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& eta);

// In-place u <- u / max(median|u|, 1e-10).
void mad_stabilize(Eigen::Ref<Eigen::VectorXd> u);

double log_likelihood(const dist::Family& family, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& eta);

// Component-wise gradient boosting: per iteration the RSS-best learner of
// every parameter competes, the in-sample-likelihood-best candidate is added
// (always, even on a non-improving step), and training stops once the
// holdout likelihood has not improved for `patience` iterations, checked
// every `batch`. The result is truncated at the holdout optimum.
FittedEnsemble train(const dist::Family& family, const Eigen::VectorXd& y_train,
                     const design::EncodedTable& train, const Eigen::VectorXd& y_holdout,
                     const design::EncodedTable& holdout,
                     std::vector<std::vector<BaseLearner>> learners, const TrainConfig& config);

}  // namespace faultcast::engine

#endif
