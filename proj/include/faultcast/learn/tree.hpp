#ifndef FAULTCAST_LEARN_TREE_HPP
#define FAULTCAST_LEARN_TREE_HPP

#include <Eigen/Dense>
#include <random>
#include <vector>

namespace faultcast::learn {

struct TreeConfig {
    int max_depth = 2;      // edges from the root; root-only = depth 0
    int min_split = 200;    // observations required to attempt a split
    int min_leaf = 50;      // observations required in each child
    int mtry = 8;           // covariates sampled (without replacement) per node
    double min_gain = 0.0;  // required RSS reduction
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

struct TreeFit {
    Tree tree;
    Eigen::VectorXd fitted;
    double rss = 0.0;
};

// Greedy binary regression tree on raw covariate columns: splits minimize the
// summed child RSS, thresholds sit at midpoints of adjacent sorted values,
// ties resolve to the lowest feature index then the lowest threshold. The rng
// drives mtry covariate sampling only.
TreeFit fit_tree(const TreeConfig& config, const Eigen::MatrixXd& X, const Eigen::VectorXd& u,
                 std::mt19937_64& rng);

}  // namespace faultcast::learn

#endif
