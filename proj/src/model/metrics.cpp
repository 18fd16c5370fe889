#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "faultcast/model/zadj_model.hpp"

namespace faultcast::model {

std::pair<double, double> log_score(const ZeroAdjustedModel& model, const Eigen::VectorXd& y,
                                    const design::EncodedTable& table) {
    if (y.size() != table.n) throw std::invalid_argument("log_score: response/table mismatch");
    const auto fam = model.family();
    const auto preds = predict_distribution(model, table);
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] < 0.0) throw std::domain_error("log_score: negative response");
        const dist::ZeroAdjusted d{preds[static_cast<std::size_t>(i)].xi0, fam,
                                   preds[static_cast<std::size_t>(i)].theta};
        total += dist::zadj_log_density(d, y[i]);
    }
    return {total, total / static_cast<double>(y.size())};
}

RocResult roc_from_scores(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("roc: score/label size mismatch");
    const double n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    const double n_neg = static_cast<double>(labels.size()) - n_pos;
    if (n_pos == 0.0 || n_neg == 0.0)
        throw std::invalid_argument("roc: need both classes present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocResult out;
    out.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    double tp = 0.0, fp = 0.0, prev_tpr = 0.0, prev_fpr = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        // Consume the whole tie group before emitting a point: trapezoidal
        // AUC then matches Mann-Whitney with half-credit for tied pairs.
        while (i < order.size() && scores[order[i]] == s) {
            if (labels[order[i]] == 1)
                tp += 1.0;
            else
                fp += 1.0;
            ++i;
        }
        const double tpr = tp / n_pos, fpr = fp / n_neg;
        out.auc += (fpr - prev_fpr) * 0.5 * (tpr + prev_tpr);
        out.points.push_back({s, fpr, tpr});
        prev_tpr = tpr;
        prev_fpr = fpr;
    }
    return out;
}

RocResult roc_curve(const ZeroAdjustedModel& model, const Eigen::VectorXd& y,
                    const design::EncodedTable& table, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("roc: threshold must be positive");
    const auto fam = model.family();
    const auto preds = predict_distribution(model, table);
    std::vector<double> scores(static_cast<std::size_t>(table.n));
    std::vector<int> labels(static_cast<std::size_t>(table.n));
    for (Eigen::Index i = 0; i < table.n; ++i) {
        const dist::ZeroAdjusted d{preds[static_cast<std::size_t>(i)].xi0, fam,
                                   preds[static_cast<std::size_t>(i)].theta};
        scores[static_cast<std::size_t>(i)] = dist::exceedance_probability(d, t);
        labels[static_cast<std::size_t>(i)] = y[i] >= t ? 1 : 0;
    }
    return roc_from_scores(scores, labels);
}

}  // namespace faultcast::model
