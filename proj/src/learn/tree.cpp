#include "faultcast/learn/tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace faultcast::learn {

double Tree::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    int i = 0;
    while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(i)];
        i = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

Eigen::VectorXd Tree::predict(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict_row(X.row(i));
    return out;
}

namespace {

struct Builder {
    const TreeConfig& cfg;
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& u;
    std::mt19937_64& rng;
    Tree tree;
    Eigen::VectorXd fitted;

    std::vector<int> sample_features() {
        const int p = static_cast<int>(X.cols());
        const int k = std::min(cfg.mtry, p);
        std::vector<int> all(static_cast<std::size_t>(p));
        std::iota(all.begin(), all.end(), 0);
        for (int j = 0; j < k; ++j) {
            std::uniform_int_distribution<int> pick(j, p - 1);
            std::swap(all[static_cast<std::size_t>(j)], all[static_cast<std::size_t>(pick(rng))]);
        }
        all.resize(static_cast<std::size_t>(k));
        std::sort(all.begin(), all.end());
        return all;
    }

    int build(std::vector<int>& idx, int depth) {
        const auto n = static_cast<double>(idx.size());
        double sum = 0.0, ss = 0.0;
        for (int i : idx) {
            sum += u[i];
            ss += u[i] * u[i];
        }
        const double mean = sum / n;
        const double node_rss = ss - sum * sum / n;

        const int self = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.back().value = mean;

        if (depth >= cfg.max_depth || static_cast<int>(idx.size()) < cfg.min_split) {
            for (int i : idx) fitted[i] = mean;
            return self;
        }

        // Best split: lowest summed child RSS; strict < keeps the earliest
        // (lowest feature, lowest threshold) candidate on ties.
        double best_rss = std::numeric_limits<double>::infinity();
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<std::pair<double, double>> xv(idx.size());  // (x, u) sorted per feature
        for (int f : sample_features()) {
            for (std::size_t j = 0; j < idx.size(); ++j)
                xv[j] = {X(idx[j], f), u[idx[j]]};
            std::sort(xv.begin(), xv.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            double sl = 0.0, ssl = 0.0;
            for (std::size_t j = 0; j + 1 < xv.size(); ++j) {
                sl += xv[j].second;
                ssl += xv[j].second * xv[j].second;
                const auto nl = static_cast<double>(j + 1);
                const auto nr = n - nl;
                if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
                if (!(xv[j].first < xv[j + 1].first)) continue;  // split only between distinct values
                const double sr = sum - sl, ssr = ss - ssl;
                const double rss = (ssl - sl * sl / nl) + (ssr - sr * sr / nr);
                if (rss < best_rss) {
                    best_rss = rss;
                    best_feature = f;
                    best_threshold = 0.5 * (xv[j].first + xv[j + 1].first);
                }
            }
        }

        if (best_feature < 0 || !(node_rss - best_rss > cfg.min_gain)) {
            for (int i : idx) fitted[i] = mean;
            return self;
        }

        std::vector<int> left_idx, right_idx;
        for (int i : idx)
            (X(i, best_feature) <= best_threshold ? left_idx : right_idx).push_back(i);
        const int left = build(left_idx, depth + 1);
        const int right = build(right_idx, depth + 1);
        tree.nodes[static_cast<std::size_t>(self)].feature = best_feature;
        tree.nodes[static_cast<std::size_t>(self)].threshold = best_threshold;
        tree.nodes[static_cast<std::size_t>(self)].left = left;
        tree.nodes[static_cast<std::size_t>(self)].right = right;
        return self;
    }
};

}  // namespace

TreeFit fit_tree(const TreeConfig& config, const Eigen::MatrixXd& X, const Eigen::VectorXd& u,
                 std::mt19937_64& rng) {
    Builder b{config, X, u, rng, {}, Eigen::VectorXd::Zero(u.size())};
    std::vector<int> idx(static_cast<std::size_t>(u.size()));
    std::iota(idx.begin(), idx.end(), 0);
    b.build(idx, 0);
    TreeFit out;
    out.tree = std::move(b.tree);
    out.fitted = std::move(b.fitted);
    out.rss = (u - out.fitted).squaredNorm();
    return out;
}

}  // namespace faultcast::learn
