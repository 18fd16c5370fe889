#include "faultcast/engine/boost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>

namespace faultcast::engine {

BaseLearner penalized_learner(design::DesignBlock block) {
    BaseLearner l;
    l.kind = BaseLearner::Kind::penalized;
    l.term_id = block.term_id;
    l.block = std::move(block);
    return l;
}

BaseLearner tree_learner(std::string term_id, learn::TreeConfig config,
                         std::vector<std::string> columns) {
    BaseLearner l;
    l.kind = BaseLearner::Kind::tree;
    l.term_id = std::move(term_id);
    l.tree_config = config;
    l.tree_columns = std::move(columns);
    return l;
}

Eigen::MatrixXd tree_features(const design::EncodedTable& table,
                              const std::vector<std::string>& columns) {
    Eigen::MatrixXd X(table.n, static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto& col = table.at(columns[j]);
        if (col.codes.empty()) {
            X.col(static_cast<Eigen::Index>(j)) = col.values;
        } else {
            for (Eigen::Index i = 0; i < table.n; ++i)
                X(i, static_cast<Eigen::Index>(j)) =
                    static_cast<double>(col.codes[static_cast<std::size_t>(i)]);
        }
    }
    return X;
}

Eigen::MatrixXd compute_gradients(const dist::Family& family, const Eigen::VectorXd& y,
                                  const Eigen::MatrixXd& eta) {
    const int K = family.param_count();
    Eigen::MatrixXd u(y.size(), K);
    dist::ParameterVector theta(static_cast<std::size_t>(K));
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        for (int k = 0; k < K; ++k)
            theta[static_cast<std::size_t>(k)] = family.link(k).inverse(eta(i, k));
        for (int k = 0; k < K; ++k) {
            const double g = family.grad_eta(y[i], theta, k);
            if (!std::isfinite(g))
                throw std::runtime_error("non-finite gradient at row " + std::to_string(i) +
                                         " for parameter " + family.param_name(k));
            u(i, k) = g;
        }
    }
    return u;
}

void mad_stabilize(Eigen::Ref<Eigen::VectorXd> u) {
    std::vector<double> a(u.data(), u.data() + u.size());
    for (auto& v : a) v = std::fabs(v);
    const auto mid = a.begin() + a.size() / 2;
    std::nth_element(a.begin(), mid, a.end());
    double med = *mid;
    if (a.size() % 2 == 0) {
        const auto lo = std::max_element(a.begin(), mid);
        med = 0.5 * (med + *lo);
    }
    u /= std::max(med, 1e-10);
}

double log_likelihood(const dist::Family& family, const Eigen::VectorXd& y,
                      const Eigen::MatrixXd& eta) {
    const int K = family.param_count();
    dist::ParameterVector theta(static_cast<std::size_t>(K));
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        for (int k = 0; k < K; ++k)
            theta[static_cast<std::size_t>(k)] = family.link(k).inverse(eta(i, k));
        total += family.log_density(y[i], theta);
    }
    return total;
}

namespace {

// Per-learner state reused across iterations: cached factorizations on the
// training rows plus the holdout-side design so updates can be pushed onto
// both linear predictors without rebuilding anything.
struct LearnerCache {
    std::unique_ptr<learn::PenalizedSolver> solver;  // penalized
    Eigen::MatrixXd holdout_basis;
    Eigen::MatrixXd train_X, holdout_X;  // tree
};

struct Champion {
    int learner = -1;
    double rss = std::numeric_limits<double>::infinity();
    Eigen::VectorXd beta;
    learn::Tree tree;
    Eigen::VectorXd fitted;
};

}  // namespace

Eigen::MatrixXd FittedEnsemble::predict_eta(const design::EncodedTable& table,
                                            int m_limit) const {
    if (m_limit < 0) m_limit = m_stop;
    const int K = static_cast<int>(learners.size());
    Eigen::MatrixXd eta(table.n, K);
    for (int k = 0; k < K; ++k)
        eta.col(k).setConstant(offsets[static_cast<std::size_t>(k)]);

    std::map<std::pair<int, int>, Eigen::MatrixXd> built;  // (param, learner) -> basis/features
    for (const Update& up : updates) {
        if (up.iteration > m_limit) continue;
        const BaseLearner& l =
            learners[static_cast<std::size_t>(up.param)][static_cast<std::size_t>(up.learner)];
        auto it = built.find({up.param, up.learner});
        if (it == built.end()) {
            Eigen::MatrixXd M = l.kind == BaseLearner::Kind::penalized
                                    ? design::build_rows(l.block, table)
                                    : tree_features(table, l.tree_columns);
            it = built.emplace(std::pair{up.param, up.learner}, std::move(M)).first;
        }
        if (l.kind == BaseLearner::Kind::penalized)
            eta.col(up.param) += nu * (it->second * up.beta);
        else
            eta.col(up.param) += nu * up.tree.predict(it->second);
    }
    return eta;
}

std::vector<ImportanceEntry> FittedEnsemble::importance() const {
    std::map<std::pair<int, int>, double> totals;
    for (const Update& up : updates) totals[{up.param, up.learner}] += up.delta_insample;
    std::vector<ImportanceEntry> out;
    for (const auto& [key, total] : totals) {
        ImportanceEntry e;
        e.param = key.first;
        e.term_id = learners[static_cast<std::size_t>(key.first)][static_cast<std::size_t>(
                                 key.second)]
                        .term_id;
        e.total = total;
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const ImportanceEntry& a, const ImportanceEntry& b) {
        if (a.total != b.total) return a.total > b.total;
        if (a.param != b.param) return a.param < b.param;
        return a.term_id < b.term_id;
    });
    return out;
}

FittedEnsemble train(const dist::Family& family, const Eigen::VectorXd& y_train,
                     const design::EncodedTable& train, const Eigen::VectorXd& y_holdout,
                     const design::EncodedTable& holdout,
                     std::vector<std::vector<BaseLearner>> learners, const TrainConfig& config) {
    const int K = family.param_count();
    if (static_cast<int>(learners.size()) != K)
        throw std::invalid_argument("train: need one learner list per distribution parameter");

    FittedEnsemble ens;
    ens.family = family.name();
    ens.learners = std::move(learners);
    ens.nu = config.nu;

    const dist::ParameterVector theta0 =
        family.offset_init(std::span<const double>(y_train.data(),
                                                   static_cast<std::size_t>(y_train.size())));
    ens.offsets.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
        ens.offsets[static_cast<std::size_t>(k)] =
            family.link(k).forward(theta0[static_cast<std::size_t>(k)]);

    Eigen::MatrixXd eta(y_train.size(), K), eta_hold(y_holdout.size(), K);
    for (int k = 0; k < K; ++k) {
        eta.col(k).setConstant(ens.offsets[static_cast<std::size_t>(k)]);
        eta_hold.col(k).setConstant(ens.offsets[static_cast<std::size_t>(k)]);
    }

    std::vector<std::vector<LearnerCache>> caches(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        for (const BaseLearner& l : ens.learners[static_cast<std::size_t>(k)]) {
            LearnerCache c;
            if (l.kind == BaseLearner::Kind::penalized) {
                c.solver = std::make_unique<learn::PenalizedSolver>(l.block);
                c.holdout_basis = design::build_rows(l.block, holdout);
            } else {
                c.train_X = tree_features(train, l.tree_columns);
                c.holdout_X = tree_features(holdout, l.tree_columns);
            }
            caches[static_cast<std::size_t>(k)].push_back(std::move(c));
        }
    }

    double insample = log_likelihood(family, y_train, eta);
    double hold = log_likelihood(family, y_holdout, eta_hold);
    ens.insample_trace.push_back(insample);
    ens.holdout_trace.push_back(hold);
    double best_hold = hold;
    int m_best = 0;

    for (int m = 1; m <= config.max_iterations; ++m) {
        Eigen::MatrixXd u = compute_gradients(family, y_train, eta);
        for (int k = 0; k < K; ++k) mad_stabilize(u.col(k));

        // Stage one: RSS-best learner within each parameter.
        std::vector<Champion> champs(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) {
            const auto& list = ens.learners[static_cast<std::size_t>(k)];
            for (std::size_t j = 0; j < list.size(); ++j) {
                const BaseLearner& l = list[j];
                auto& cache = caches[static_cast<std::size_t>(k)][j];
                Champion cand;
                cand.learner = static_cast<int>(j);
                if (l.kind == BaseLearner::Kind::penalized) {
                    auto fit = cache.solver->fit(u.col(k));
                    cand.rss = fit.rss;
                    cand.beta = std::move(fit.beta);
                    cand.fitted = std::move(fit.fitted);
                } else {
                    std::seed_seq seq{config.seed, static_cast<std::uint64_t>(m),
                                      static_cast<std::uint64_t>(k),
                                      static_cast<std::uint64_t>(j)};
                    std::mt19937_64 rng(seq);
                    auto fit = learn::fit_tree(l.tree_config, cache.train_X, u.col(k), rng);
                    cand.rss = fit.rss;
                    cand.tree = std::move(fit.tree);
                    cand.fitted = std::move(fit.fitted);
                }
                if (cand.rss < champs[static_cast<std::size_t>(k)].rss)
                    champs[static_cast<std::size_t>(k)] = std::move(cand);
            }
        }

        // Stage two: the candidate that maximizes the overall in-sample
        // likelihood wins, improving or not.
        int k_star = -1;
        double ll_star = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
            if (champs[static_cast<std::size_t>(k)].learner < 0) continue;
            Eigen::MatrixXd cand_eta = eta;
            cand_eta.col(k) += config.nu * champs[static_cast<std::size_t>(k)].fitted;
            const double ll = log_likelihood(family, y_train, cand_eta);
            if (ll > ll_star) {
                ll_star = ll;
                k_star = k;
            }
        }
        if (k_star < 0) throw std::runtime_error("train: no fittable learner");

        Champion& ch = champs[static_cast<std::size_t>(k_star)];
        eta.col(k_star) += config.nu * ch.fitted;
        const BaseLearner& l =
            ens.learners[static_cast<std::size_t>(k_star)][static_cast<std::size_t>(ch.learner)];
        auto& cache = caches[static_cast<std::size_t>(k_star)][static_cast<std::size_t>(ch.learner)];
        if (l.kind == BaseLearner::Kind::penalized)
            eta_hold.col(k_star) += config.nu * (cache.holdout_basis * ch.beta);
        else
            eta_hold.col(k_star) += config.nu * ch.tree.predict(cache.holdout_X);

        Update up;
        up.iteration = m;
        up.param = k_star;
        up.learner = ch.learner;
        up.delta_insample = ll_star - insample;
        up.beta = std::move(ch.beta);
        up.tree = std::move(ch.tree);
        ens.updates.push_back(std::move(up));

        insample = ll_star;
        hold = log_likelihood(family, y_holdout, eta_hold);
        if (!std::isfinite(hold))
            throw std::runtime_error("holdout log-likelihood diverged at iteration " +
                                     std::to_string(m));
        ens.insample_trace.push_back(insample);
        ens.holdout_trace.push_back(hold);
        if (hold > best_hold) {
            best_hold = hold;
            m_best = m;
        }

        if (config.log)
            (*config.log) << "iter=" << m << " insample=" << insample << " holdout=" << hold
                          << " param=" << family.param_name(k_star) << " term=" << l.term_id
                          << "\n";

        if (m % config.stopping.batch == 0 && m - m_best >= config.stopping.patience) break;
    }

    // Keep the prefix up to the holdout optimum.
    ens.m_stop = m_best;
    ens.updates.erase(std::remove_if(ens.updates.begin(), ens.updates.end(),
                                     [&](const Update& u) { return u.iteration > m_best; }),
                      ens.updates.end());
    return ens;
}

}  // namespace faultcast::engine
