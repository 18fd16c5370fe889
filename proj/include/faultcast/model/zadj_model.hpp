#ifndef FAULTCAST_MODEL_ZADJ_MODEL_HPP
#define FAULTCAST_MODEL_ZADJ_MODEL_HPP

#include <functional>
#include <string>
#include <vector>

#include "faultcast/design/schema.hpp"
#include "faultcast/dist/zero_adjusted.hpp"
#include "faultcast/engine/boost.hpp"
#include "faultcast/pipeline/guard.hpp"

namespace faultcast::model {

// Two-stage zero-adjusted model: a Bernoulli ensemble for P(y = 0) on all
// rows (the positive class is "zero faults") and a positive-continuous LSS
// ensemble fitted to the nonzero rows only.
struct ZeroAdjustedModel {
    std::string positive_family;
    std::vector<design::ColumnSchema> schema;
    engine::FittedEnsemble bern;
    engine::FittedEnsemble pos;
    pipeline::TrainingRange ranges;

    dist::FamilyPtr family() const { return dist::make_family(positive_family); }
};

struct Prediction {
    double xi0 = 0.0;
    dist::ParameterVector theta;
    std::vector<std::string> warnings;

    dist::ZeroAdjusted distribution(const dist::FamilyPtr& fam) const {
        return {xi0, fam, theta};
    }
};

// Learner lists are rebuilt per stage because the positive-stage blocks must
// be calibrated on the nonzero-row subset.
using LearnerFactory =
    std::function<std::vector<std::vector<engine::BaseLearner>>(const design::EncodedTable&)>;

struct TwoStageConfig {
    std::string family = "gamma";
    engine::TrainConfig bern;
    engine::TrainConfig pos;
};

ZeroAdjustedModel fit_two_stage(const Eigen::VectorXd& y_train,
                                const design::EncodedTable& train,
                                const Eigen::VectorXd& y_holdout,
                                const design::EncodedTable& holdout,
                                const LearnerFactory& bern_learners,
                                const LearnerFactory& pos_learners,
                                const std::vector<design::ColumnSchema>& schema,
                                const pipeline::TrainingRange& ranges,
                                const TwoStageConfig& config);

std::vector<Prediction> predict_distribution(const ZeroAdjustedModel& model,
                                             const design::EncodedTable& table);

// (l_total, l_average) of the joint zero-adjusted density.
std::pair<double, double> log_score(const ZeroAdjustedModel& model, const Eigen::VectorXd& y,
                                    const design::EncodedTable& table);

struct RocPoint {
    double threshold = 0.0;  // score cutoff
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    std::vector<RocPoint> points;
    double auc = 0.0;
};

// ROC over the event 1(y >= t) scored by the predicted exceedance
// probability; AUC is the Mann-Whitney statistic (ties count one half).
RocResult roc_curve(const ZeroAdjustedModel& model, const Eigen::VectorXd& y,
                    const design::EncodedTable& table, double t);
RocResult roc_from_scores(const std::vector<double>& scores, const std::vector<int>& labels);

struct ImportanceRow {
    std::string stage;  // "zero" | "positive"
    std::string param;
    std::string term_id;
    double total = 0.0;
};

std::vector<ImportanceRow> importance(const ZeroAdjustedModel& model);

struct PartialPoint {
    double x = 0.0;       // raw covariate value
    double effect = 0.0;  // accumulated shrunken contribution, link scale
    bool extrapolated = false;
};

// Accumulated contribution of one single-column penalized term for a
// distribution parameter, other covariates held fixed, interactions ignored.
std::vector<PartialPoint> partial_effect(const ZeroAdjustedModel& model,
                                         const std::string& stage, int param,
                                         const std::string& term_id,
                                         const std::vector<double>& grid);

}  // namespace faultcast::model

#endif
