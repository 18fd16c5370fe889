#include "faultcast/model/zadj_model.hpp"

#include <cmath>
#include <stdexcept>

namespace faultcast::model {

ZeroAdjustedModel fit_two_stage(const Eigen::VectorXd& y_train,
                                const design::EncodedTable& train,
                                const Eigen::VectorXd& y_holdout,
                                const design::EncodedTable& holdout,
                                const LearnerFactory& bern_learners,
                                const LearnerFactory& pos_learners,
                                const std::vector<design::ColumnSchema>& schema,
                                const pipeline::TrainingRange& ranges,
                                const TwoStageConfig& config) {
    auto partition = [](const Eigen::VectorXd& y, const char* which) {
        std::vector<Eigen::Index> nonzero;
        Eigen::Index zeros = 0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (y[i] < 0.0)
                throw std::domain_error("negative response in " + std::string(which) + " data");
            if (y[i] == 0.0)
                ++zeros;
            else
                nonzero.push_back(i);
        }
        if (zeros == 0 || nonzero.empty())
            throw std::invalid_argument(std::string(which) +
                                        " data lacks a zero or a nonzero response; fit a "
                                        "single-stage model instead");
        return nonzero;
    };
    const std::vector<Eigen::Index> pos_train_idx = partition(y_train, "training");
    const std::vector<Eigen::Index> pos_hold_idx = partition(y_holdout, "holdout");

    ZeroAdjustedModel model;
    model.positive_family = config.family;
    model.schema = schema;
    model.ranges = ranges;

    // Stage one: indicator of a zero day over every row.
    Eigen::VectorXd z_train(y_train.size()), z_hold(y_holdout.size());
    for (Eigen::Index i = 0; i < y_train.size(); ++i) z_train[i] = y_train[i] == 0.0 ? 1.0 : 0.0;
    for (Eigen::Index i = 0; i < y_holdout.size(); ++i) z_hold[i] = y_holdout[i] == 0.0 ? 1.0 : 0.0;
    const auto bernoulli = dist::make_family("bernoulli");
    model.bern = engine::train(*bernoulli, z_train, train, z_hold, holdout,
                               bern_learners(train), config.bern);

    // Stage two: the positive family on nonzero rows only.
    const design::EncodedTable train_pos = design::subset(train, pos_train_idx);
    const design::EncodedTable hold_pos = design::subset(holdout, pos_hold_idx);
    Eigen::VectorXd yp(static_cast<Eigen::Index>(pos_train_idx.size()));
    Eigen::VectorXd yhp(static_cast<Eigen::Index>(pos_hold_idx.size()));
    for (std::size_t i = 0; i < pos_train_idx.size(); ++i)
        yp[static_cast<Eigen::Index>(i)] = y_train[pos_train_idx[i]];
    for (std::size_t i = 0; i < pos_hold_idx.size(); ++i)
        yhp[static_cast<Eigen::Index>(i)] = y_holdout[pos_hold_idx[i]];
    const auto fam = dist::make_family(config.family);
    model.pos = engine::train(*fam, yp, train_pos, yhp, hold_pos, pos_learners(train_pos),
                              config.pos);
    return model;
}

std::vector<Prediction> predict_distribution(const ZeroAdjustedModel& model,
                                             const design::EncodedTable& table) {
    const auto fam = model.family();
    const int K = fam->param_count();
    const Eigen::MatrixXd eta_b = model.bern.predict_eta(table);
    const Eigen::MatrixXd eta_p = model.pos.predict_eta(table);
    const auto bernoulli = dist::make_family("bernoulli");

    std::vector<Prediction> out(static_cast<std::size_t>(table.n));
    for (Eigen::Index i = 0; i < table.n; ++i) {
        Prediction& p = out[static_cast<std::size_t>(i)];
        p.xi0 = bernoulli->link(0).inverse(eta_b(i, 0));
        p.theta.resize(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k)
            p.theta[static_cast<std::size_t>(k)] = fam->link(k).inverse(eta_p(i, k));
        p.warnings = pipeline::extrapolation_check(model.ranges, table, i);
    }
    return out;
}

std::vector<ImportanceRow> importance(const ZeroAdjustedModel& model) {
    std::vector<ImportanceRow> out;
    const auto bernoulli = dist::make_family("bernoulli");
    const auto fam = model.family();
    for (const auto& e : model.bern.importance())
        out.push_back({"zero", bernoulli->param_name(e.param), e.term_id, e.total});
    for (const auto& e : model.pos.importance())
        out.push_back({"positive", fam->param_name(e.param), e.term_id, e.total});
    return out;
}

std::vector<PartialPoint> partial_effect(const ZeroAdjustedModel& model,
                                         const std::string& stage, int param,
                                         const std::string& term_id,
                                         const std::vector<double>& grid) {
    const engine::FittedEnsemble& ens = stage == "zero" ? model.bern : model.pos;
    if (param < 0 || param >= static_cast<int>(ens.learners.size()))
        throw std::invalid_argument("partial_effect: no parameter index " +
                                    std::to_string(param));
    const auto& list = ens.learners[static_cast<std::size_t>(param)];
    int idx = -1;
    for (std::size_t j = 0; j < list.size(); ++j)
        if (list[j].term_id == term_id) idx = static_cast<int>(j);
    if (idx < 0)
        throw std::invalid_argument("partial_effect: no term '" + term_id +
                                    "' for this parameter");
    const engine::BaseLearner& l = list[static_cast<std::size_t>(idx)];
    if (l.kind != engine::BaseLearner::Kind::penalized || l.block.columns.size() != 1)
        throw std::invalid_argument("partial_effect: term '" + term_id +
                                    "' is not a single-covariate penalized term");
    const std::string& column = l.block.columns[0];

    // Accumulated shrunken coefficients for this term up to m_stop.
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(l.block.cols() > 0 ? l.block.cols() : 0);
    for (const auto& up : ens.updates) {
        if (up.param != param || up.learner != idx) continue;
        if (beta.size() == 0) beta = Eigen::VectorXd::Zero(up.beta.size());
        beta += ens.nu * up.beta;
    }

    // Encode the grid with the stored schema for that column.
    const design::ColumnSchema* sch = nullptr;
    for (const auto& s : model.schema)
        if (s.name == column) sch = &s;
    if (!sch || sch->kind == design::ColumnKind::categorical ||
        sch->kind == design::ColumnKind::ordinal)
        throw std::invalid_argument("partial_effect: term '" + term_id +
                                    "' needs a numeric covariate grid");
    design::RawTable raw;
    raw.columns.push_back({column, true, grid, {}});
    const design::EncodedTable gtab = design::encode({*sch}, raw);

    std::vector<PartialPoint> out(grid.size());
    Eigen::VectorXd effect = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
    if (beta.size() > 0) effect = design::build_rows(l.block, gtab) * beta;
    const auto range = model.ranges.numeric.find(column);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out[i].x = grid[i];
        out[i].effect = effect[static_cast<Eigen::Index>(i)];
        if (range != model.ranges.numeric.end())
            out[i].extrapolated =
                grid[i] < range->second.first || grid[i] > range->second.second;
    }
    return out;
}

}  // namespace faultcast::model
